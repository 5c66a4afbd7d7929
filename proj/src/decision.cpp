#include "lanebandit/decision.hpp"

#include "lanebandit/text.hpp"

namespace lanebandit {

ManeuverDecision decide(const Model& model, const Context& c, const ScenarioConstants& k) {
  validate(c);
  validate(k);
  ManeuverDecision d;
  if (safety_gate(c.gap_front, k) == GateResult::SafeGapFollow) {
    d.maneuver = Maneuver::SafeGapFollow;
    d.stage = DecisionStage::Gate;
    return d;
  }
  const auto f = normalize(c, model.scaling);
  d.stage = DecisionStage::Policy;
  d.extrapolated = is_extrapolated(c, model.scaling);
  d.probabilities = forward(model.params, f);
  d.maneuver = select_action(model.params, f) == Action::LaneChange ? Maneuver::InitiateLaneChange
                                                                    : Maneuver::LaneKeep;
  return d;
}

ManeuverDecision decide(const PolicyParams& theta, const Context& c, const ScenarioConstants& k) {
  return decide(Model{theta, kGridScaling, {}}, c, k);
}

std::string_view to_string(Maneuver m) noexcept {
  switch (m) {
    case Maneuver::InitiateLaneChange: return "InitiateLaneChange";
    case Maneuver::LaneKeep: return "LaneKeep";
    case Maneuver::SafeGapFollow: return "SafeGapFollow";
  }
  return "?";
}

std::string_view to_string(DecisionStage s) noexcept {
  return s == DecisionStage::Gate ? "gate" : "policy";
}

std::string describe(const ManeuverDecision& d) {
  std::string out(to_string(d.maneuver));
  out += " (";
  out += to_string(d.stage);
  if (d.probabilities) {
    out += ", " + text::format_fixed(d.probabilities->p_change, 4) + '/' +
           text::format_fixed(d.probabilities->p_keep, 4);
  }
  out += ')';
  if (d.extrapolated) out += " [extrapolated]";
  return out;
}

}  // namespace lanebandit
