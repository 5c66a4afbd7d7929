#include "lanebandit/usersim.hpp"

#include <cmath>
#include <sstream>

#include "lanebandit/errors.hpp"
#include "lanebandit/text.hpp"

namespace lanebandit {

void SimulatedUser::validate() const {
  for (double w : weights)
    if (!std::isfinite(w)) throw SchemaError("weights", "weights must be finite");
  if (!std::isfinite(bias)) throw SchemaError("bias", "bias must be finite");
  if (!(flip_noise >= 0.0 && flip_noise < 0.5))
    throw SchemaError("flip_noise", "flip_noise must lie in [0, 0.5)");
}

std::vector<SubjectProfile> shipped_presets() {
  // Features are normalized to [0, 1] over the grid.
  return {
      // Changes lanes unless the adjacent-lane rear car is close.
      {"eager", {{0.2, 1.0, -0.3}, -0.35, kGoodSubjectNoise, 11}},
      // Keeps lane unless the rear gap is large and the rear car slow.
      {"cautious", {{0.3, 1.0, -0.8}, -0.55, kGoodSubjectNoise, 22}},
      // Mostly driven by the gap to the preceding car.
      {"distance-keeper", {{1.0, 0.25, -0.25}, -0.45, kGoodSubjectNoise, 33}},
  };
}

std::vector<SubjectProfile> all_presets() {
  auto presets = shipped_presets();
  presets.push_back({"unreliable", {{0.2, 1.0, -0.3}, -0.35, kBadSubjectNoise, 44}});
  return presets;
}

std::optional<SubjectProfile> find_preset(std::string_view name) {
  for (auto& p : all_presets())
    if (p.name == name) return p;
  return std::nullopt;
}

SimulatedUser parse_profile(const std::string& contents) {
  SimulatedUser u;
  bool seen[4] = {false, false, false, false};
  std::size_t line_no = 0;
  for (auto line : text::split(contents, '\n')) {
    ++line_no;
    line = text::trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    auto number = [&](std::string_view tok, const char* field) {
      const auto v = text::parse_double(tok);
      if (!v) throw SchemaError(field, "bad number '" + std::string(tok) + "'");
      return *v;
    };
    if (key == "weights") {
      std::vector<std::string_view> toks;
      for (auto t : text::split(value, ' '))
        if (!text::trim(t).empty()) toks.push_back(t);
      if (toks.size() != 3) throw SchemaError("weights", "expected three weights");
      for (int i = 0; i < 3; ++i) u.weights[i] = number(toks[i], "weights");
      seen[0] = true;
    } else if (key == "bias") {
      u.bias = number(value, "bias");
      seen[1] = true;
    } else if (key == "flip_noise") {
      u.flip_noise = number(value, "flip_noise");
      seen[2] = true;
    } else if (key == "seed") {
      const auto v = text::parse_int(value);
      if (!v || *v < 0) throw SchemaError("seed", "seed must be a non-negative integer");
      u.seed = static_cast<std::uint64_t>(*v);
      seen[3] = true;
    } else {
      throw SchemaError(std::string(key), "unknown profile key");
    }
  }
  const char* names[] = {"weights", "bias", "flip_noise", "seed"};
  for (int i = 0; i < 4; ++i)
    if (!seen[i]) throw SchemaError(names[i], std::string("missing ") + names[i]);
  u.validate();
  return u;
}

SimulatedUser load_profile(const std::filesystem::path& path) {
  return parse_profile(text::read_file(path));
}

std::string format_profile(const SimulatedUser& u) {
  std::ostringstream out;
  out << "weights = " << text::format_double(u.weights[0]) << ' '
      << text::format_double(u.weights[1]) << ' ' << text::format_double(u.weights[2]) << '\n'
      << "bias = " << text::format_double(u.bias) << '\n'
      << "flip_noise = " << text::format_double(u.flip_noise) << '\n'
      << "seed = " << u.seed << '\n';
  return out.str();
}

Action user_true_action(const SimulatedUser& u, const Context& c) {
  const auto f = normalize(c);
  double score = u.bias;
  for (int i = 0; i < 3; ++i) score += u.weights[i] * f[i];
  return score >= 0.0 ? Action::LaneChange : Action::LaneKeep;
}

Action behavior_policy_draw(Rng& gen) {
  return (gen() >> 63) == 0 ? Action::LaneChange : Action::LaneKeep;
}

int feedback(const SimulatedUser& u, const Context& c, Action pulled, Rng& gen) {
  int reward = pulled == user_true_action(u, c) ? 1 : -1;
  if (uniform01(gen) < u.flip_noise) reward = -reward;
  return reward;
}

std::vector<std::pair<Context, Action>> feedback_schedule(std::size_t count, Rng& gen) {
  const auto grid = enumerate_grid();
  std::vector<std::pair<Context, Action>> episodes;
  episodes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    episodes.emplace_back(grid[i % grid.size()], behavior_policy_draw(gen));
  }
  return episodes;
}

std::vector<Observation> generate_session1(const SimulatedUser& u,
                                           const std::vector<std::pair<Context, Action>>& episodes,
                                           Rng& gen) {
  u.validate();
  std::vector<Observation> out;
  out.reserve(episodes.size());
  for (const auto& [context, arm] : episodes) {
    out.push_back({context, arm, feedback(u, context, arm, gen)});
  }
  return out;
}

std::vector<Observation> generate_session1(const SimulatedUser& u, Rng& gen,
                                           std::size_t episodes) {
  const auto schedule = feedback_schedule(episodes, gen);
  return generate_session1(u, schedule, gen);
}

std::vector<LabeledExample> generate_session2(const SimulatedUser& u,
                                              const std::vector<Context>& contexts) {
  std::vector<LabeledExample> out;
  out.reserve(contexts.size());
  for (const auto& c : contexts) out.push_back({c, user_true_action(u, c)});
  return out;
}

std::vector<LabeledExample> generate_session2(const SimulatedUser& u) {
  return generate_session2(u, enumerate_grid());
}

}  // namespace lanebandit
