#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lanebandit/scenario.hpp"

namespace lanebandit {

/// One logged trial: the context, the arm pulled by the behavior policy, and
/// the user's binary feedback.
struct Observation {
  Context context;
  Action action = Action::LaneKeep;
  int reward = 1;  // -1 or +1

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct LabeledExample {
  Context context;
  Action true_action = Action::LaneKeep;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

/// Throws InvalidRewardError unless reward is -1 or +1.
void validate_reward(int reward);

/// The action the user actually prefers: agreement keeps the pulled arm,
/// disagreement implies the other arm.
Action reconstruct_true_action(Action pulled, int reward);

std::vector<LabeledExample> to_labeled(const std::vector<Observation>& data);

// --- CSV ----------------------------------------------------------------------

inline constexpr std::string_view kObservationHeader = "x1_m,x2_m,x3_kph,action,reward";
inline constexpr std::string_view kLabeledHeader = "x1_m,x2_m,x3_kph,true_action";

std::string format_observations(const std::vector<Observation>& rows);
std::string format_labeled(const std::vector<LabeledExample>& rows);
/// Throws ParseError carrying the 1-based line number.
std::vector<Observation> parse_observations(const std::string& csv);
std::vector<LabeledExample> parse_labeled(const std::string& csv);

std::vector<Observation> read_observations(const std::filesystem::path& path);
void write_observations(const std::vector<Observation>& rows, const std::filesystem::path& path);
std::vector<LabeledExample> read_labeled(const std::filesystem::path& path);
void write_labeled(const std::vector<LabeledExample>& rows, const std::filesystem::path& path);

// --- consistency screen -------------------------------------------------------

enum class ScreenDecision { Accept, Reject };

inline constexpr double kDefaultConsistencyCutoff = 0.6;
inline constexpr double kDefaultContextTolerance = 1e-9;

struct ConsistencyReport {
  double ratio = 1.0;
  std::size_t total_trials = 0;
  std::size_t consistent_trials = 0;
  /// Trials sharing their context with at least one other trial.
  std::size_t paired_trials = 0;
  /// Unordered pairs of same-context trials whose feedback contradicts.
  std::size_t inconsistent_pairs = 0;
  ScreenDecision decision = ScreenDecision::Accept;
};

ScreenDecision screen(double ratio, double cutoff = kDefaultConsistencyCutoff) noexcept;

/// Groups trials by context (fields equal within `tolerance`). Two trials in a
/// group contradict when their feedback implies different preferred actions;
/// a trial is consistent when it contradicts no other trial of its group.
/// ratio = consistent trials / total trials.
ConsistencyReport consistency_ratio(const std::vector<Observation>& data,
                                    double cutoff = kDefaultConsistencyCutoff,
                                    double tolerance = kDefaultContextTolerance);

std::string_view to_string(ScreenDecision d) noexcept;
std::ostream& operator<<(std::ostream& os, const ConsistencyReport& r);

}  // namespace lanebandit
