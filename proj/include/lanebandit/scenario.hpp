#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace lanebandit {

/// Traffic situation seen by the user car.
///   gap_front     distance from the preceding car (#1) to the user car [m]
///   gap_rear_adj  distance from the user car back to the adjacent-lane rear car (#2) [m]
///   rear_vel      velocity of car #2 [km/h]
struct Context {
  double gap_front = 0.0;
  double gap_rear_adj = 0.0;
  double rear_vel = 0.0;

  friend bool operator==(const Context&, const Context&) = default;
};

enum class Action : int { LaneChange = 0, LaneKeep = 1 };

constexpr int encode(Action a) noexcept { return static_cast<int>(a); }
Action decode_action(int code);  // throws DataError outside {0, 1}
constexpr Action opposite(Action a) noexcept {
  return a == Action::LaneChange ? Action::LaneKeep : Action::LaneChange;
}
std::string_view to_string(Action a) noexcept;

/// Normalized context features, one per Context field.
using FeatureVector = std::array<double, 3>;

/// Closed range of one context variable.
struct Range {
  double min = 0.0;
  double max = 1.0;
  friend bool operator==(const Range&, const Range&) = default;
};

/// Min-max scaling of the three context variables. The default ranges are the
/// experiment grid bounds.
struct FeatureScaling {
  std::array<Range, 3> ranges{{{40.0, 80.0}, {10.0, 60.0}, {80.0, 100.0}}};

  friend bool operator==(const FeatureScaling&, const FeatureScaling&) = default;
};

inline constexpr FeatureScaling kGridScaling{};

struct ScenarioConstants {
  double user_vel = 90.0;          // km/h
  double front_vel = 80.0;         // km/h
  double safety_threshold = 40.0;  // m
};

inline constexpr ScenarioConstants kDefaultConstants{};

/// Requires front_vel < user_vel and a positive safety threshold.
void validate(const ScenarioConstants& k);

/// Throws InvalidContextError unless every field is finite and strictly positive.
void validate(const Context& c);

/// True when the context lies outside the experiment grid bounds.
bool is_extrapolated(const Context& c, const FeatureScaling& s = kGridScaling) noexcept;

FeatureVector normalize(const Context& c, const FeatureScaling& s = kGridScaling);
Context denormalize(const FeatureVector& f, const FeatureScaling& s = kGridScaling) noexcept;

/// Grid levels per variable.
inline constexpr std::array<double, 5> kGapFrontLevels{40, 50, 60, 70, 80};
inline constexpr std::array<double, 6> kGapRearLevels{10, 20, 30, 40, 50, 60};
inline constexpr std::array<double, 3> kRearVelLevels{80, 90, 100};
inline constexpr std::size_t kGridSize =
    kGapFrontLevels.size() * kGapRearLevels.size() * kRearVelLevels.size();

/// Full factorial grid, gap_front outermost and rear_vel innermost.
std::vector<Context> enumerate_grid();

enum class GateResult { SafeGapFollow, DiscretionaryZone };

/// Gaps at or below the safety threshold divert to gap following.
GateResult safety_gate(double gap_front, const ScenarioConstants& k = kDefaultConstants);

}  // namespace lanebandit
