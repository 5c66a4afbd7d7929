#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lanebandit/data.hpp"
#include "lanebandit/random.hpp"

namespace lanebandit {

/// A simulated subject: a linear acceptance rule over normalized features plus
/// feedback flip noise. LaneChange is preferred where weights . f + bias >= 0.
struct SimulatedUser {
  std::array<double, 3> weights{};  // front gap, rear gap, rear velocity
  double bias = 0.0;
  double flip_noise = 0.0;  // in [0, 0.5)
  std::uint64_t seed = 0;

  void validate() const;
};

struct SubjectProfile {
  std::string name;
  SimulatedUser user;
};

inline constexpr double kGoodSubjectNoise = 0.07;
inline constexpr double kBadSubjectNoise = 0.35;

/// eager, cautious, distance-keeper: the three reliable subjects.
std::vector<SubjectProfile> shipped_presets();
/// The three reliable presets plus "unreliable", a high-noise subject.
std::vector<SubjectProfile> all_presets();
std::optional<SubjectProfile> find_preset(std::string_view name);

/// Profile file: `weights = a b c`, `bias = d`, `flip_noise = e`, `seed = n`.
SimulatedUser parse_profile(const std::string& text);
SimulatedUser load_profile(const std::filesystem::path& path);
std::string format_profile(const SimulatedUser& u);

/// Noise-free preferred action.
Action user_true_action(const SimulatedUser& u, const Context& c);

/// Behavior policy: a fair coin independent of context.
Action behavior_policy_draw(Rng& gen);

/// +1 when the pulled arm matches the user's preference, -1 otherwise; the
/// sign flips with probability flip_noise.
int feedback(const SimulatedUser& u, const Context& c, Action pulled, Rng& gen);

/// Session-1 episode schedule: the grid cycled until `count` episodes, each
/// with a coin-drawn proposed arm.
std::vector<std::pair<Context, Action>> feedback_schedule(std::size_t count, Rng& gen);
inline constexpr std::size_t kDefaultSession1Episodes = 2 * kGridSize;

/// Session 1 over an explicit schedule.
std::vector<Observation> generate_session1(const SimulatedUser& u,
                                           const std::vector<std::pair<Context, Action>>& episodes,
                                           Rng& gen);
/// Session 1 over the default schedule (each grid context twice).
std::vector<Observation> generate_session1(const SimulatedUser& u, Rng& gen,
                                           std::size_t episodes = kDefaultSession1Episodes);

/// Session 2: noise-free designations, one per context.
std::vector<LabeledExample> generate_session2(const SimulatedUser& u,
                                              const std::vector<Context>& contexts);
std::vector<LabeledExample> generate_session2(const SimulatedUser& u);

/// Probability that two trials of one context agree under flip noise eps.
constexpr double pair_consistency(double eps) noexcept { return eps * eps + (1 - eps) * (1 - eps); }

}  // namespace lanebandit
