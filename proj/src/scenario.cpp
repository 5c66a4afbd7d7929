#include "lanebandit/scenario.hpp"

#include <cmath>
#include <string>

#include "lanebandit/errors.hpp"

namespace lanebandit {

Action decode_action(int code) {
  if (code == 0) return Action::LaneChange;
  if (code == 1) return Action::LaneKeep;
  throw DataError("action code must be 0 or 1, got " + std::to_string(code));
}

std::string_view to_string(Action a) noexcept {
  return a == Action::LaneChange ? "LaneChange" : "LaneKeep";
}

void validate(const Context& c) {
  const double fields[] = {c.gap_front, c.gap_rear_adj, c.rear_vel};
  const char* names[] = {"gap_front", "gap_rear_adj", "rear_vel"};
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(fields[i]) || fields[i] <= 0.0) {
      throw InvalidContextError(std::string(names[i]) + " must be finite and positive");
    }
  }
}

void validate(const ScenarioConstants& k) {
  if (!(k.front_vel < k.user_vel)) {
    throw InvalidContextError("preceding car must be slower than the user car");
  }
  if (!(k.safety_threshold > 0.0) || !std::isfinite(k.safety_threshold)) {
    throw InvalidContextError("safety threshold must be positive");
  }
}

bool is_extrapolated(const Context& c, const FeatureScaling& s) noexcept {
  const double v[] = {c.gap_front, c.gap_rear_adj, c.rear_vel};
  for (int i = 0; i < 3; ++i) {
    if (v[i] < s.ranges[i].min || v[i] > s.ranges[i].max) return true;
  }
  return false;
}

FeatureVector normalize(const Context& c, const FeatureScaling& s) {
  const double v[] = {c.gap_front, c.gap_rear_adj, c.rear_vel};
  FeatureVector f{};
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(v[i])) throw InvalidContextError("context field is not finite");
    const Range& r = s.ranges[i];
    f[i] = (v[i] - r.min) / (r.max - r.min);
  }
  return f;
}

Context denormalize(const FeatureVector& f, const FeatureScaling& s) noexcept {
  auto back = [&](int i) { return s.ranges[i].min + f[i] * (s.ranges[i].max - s.ranges[i].min); };
  return Context{back(0), back(1), back(2)};
}

std::vector<Context> enumerate_grid() {
  std::vector<Context> grid;
  grid.reserve(kGridSize);
  for (double x1 : kGapFrontLevels) {
    for (double x2 : kGapRearLevels) {
      for (double x3 : kRearVelLevels) grid.push_back({x1, x2, x3});
    }
  }
  return grid;
}

GateResult safety_gate(double gap_front, const ScenarioConstants& k) {
  if (!std::isfinite(gap_front) || gap_front < 0.0) {
    throw InvalidContextError("gap to the preceding car must be finite and non-negative");
  }
  return gap_front <= k.safety_threshold ? GateResult::SafeGapFollow
                                         : GateResult::DiscretionaryZone;
}

}  // namespace lanebandit
