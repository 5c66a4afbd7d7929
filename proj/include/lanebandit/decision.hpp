#pragma once

#include <optional>
#include <string>

#include "lanebandit/policy.hpp"
#include "lanebandit/scenario.hpp"

namespace lanebandit {

enum class Maneuver { InitiateLaneChange, LaneKeep, SafeGapFollow };
enum class DecisionStage { Gate, Policy };

struct ManeuverDecision {
  Maneuver maneuver = Maneuver::SafeGapFollow;
  DecisionStage stage = DecisionStage::Gate;
  /// Present only when the policy was consulted.
  std::optional<ArmProbabilities> probabilities;
  /// The policy decided on a context outside the grid it was trained on.
  bool extrapolated = false;
};

/// Safety gate first; only contexts in the discretionary zone reach the policy.
ManeuverDecision decide(const Model& model, const Context& c,
                        const ScenarioConstants& k = kDefaultConstants);
ManeuverDecision decide(const PolicyParams& theta, const Context& c,
                        const ScenarioConstants& k = kDefaultConstants);

std::string_view to_string(Maneuver m) noexcept;
std::string_view to_string(DecisionStage s) noexcept;

/// e.g. `SafeGapFollow (gate)`, `LaneKeep (policy, 0.5000/0.5000)`.
std::string describe(const ManeuverDecision& d);

}  // namespace lanebandit
