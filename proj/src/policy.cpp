#include "lanebandit/policy.hpp"

#include <cmath>
#include <sstream>

#include "lanebandit/errors.hpp"
#include "lanebandit/random.hpp"
#include "lanebandit/text.hpp"

namespace lanebandit {

std::array<double, kParamCount> PolicyParams::flatten() const noexcept {
  std::array<double, kParamCount> flat{};
  std::size_t k = 0;
  for (const auto& row : w1)
    for (double v : row) flat[k++] = v;
  for (double v : b1) flat[k++] = v;
  for (const auto& row : w2)
    for (double v : row) flat[k++] = v;
  for (double v : b2) flat[k++] = v;
  return flat;
}

PolicyParams PolicyParams::unflatten(const std::array<double, kParamCount>& flat) noexcept {
  PolicyParams p;
  std::size_t k = 0;
  for (auto& row : p.w1)
    for (double& v : row) v = flat[k++];
  for (double& v : p.b1) v = flat[k++];
  for (auto& row : p.w2)
    for (double& v : row) v = flat[k++];
  for (double& v : p.b2) v = flat[k++];
  return p;
}

PolicyParams& PolicyParams::operator+=(const PolicyParams& o) noexcept {
  for (std::size_t j = 0; j < kHidden; ++j) {
    for (std::size_t i = 0; i < kInputs; ++i) w1[j][i] += o.w1[j][i];
    b1[j] += o.b1[j];
  }
  for (std::size_t a = 0; a < kArms; ++a) {
    for (std::size_t j = 0; j < kHidden; ++j) w2[a][j] += o.w2[a][j];
    b2[a] += o.b2[a];
  }
  return *this;
}

PolicyParams& PolicyParams::operator*=(double s) noexcept {
  for (auto& row : w1)
    for (double& v : row) v *= s;
  for (double& v : b1) v *= s;
  for (auto& row : w2)
    for (double& v : row) v *= s;
  for (double& v : b2) v *= s;
  return *this;
}

bool PolicyParams::all_finite() const noexcept {
  for (double v : flatten())
    if (!std::isfinite(v)) return false;
  return true;
}

double PolicyParams::weight_norm_sq() const noexcept {
  double s = 0.0;
  for (const auto& row : w1)
    for (double v : row) s += v * v;
  for (const auto& row : w2)
    for (double v : row) s += v * v;
  return s;
}

PolicyParams init_params(std::uint64_t seed) {
  Rng gen(seed);
  PolicyParams p;
  for (auto& row : p.w1)
    for (double& v : row) v = uniform(gen, -0.5, 0.5);
  for (auto& row : p.w2)
    for (double& v : row) v = uniform(gen, -0.5, 0.5);
  return p;
}

double sigmoid(double t) noexcept {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

namespace {

struct Activations {
  std::array<double, kHidden> hidden{};
  std::array<double, kArms> out{};
};

Activations propagate(const PolicyParams& theta, const FeatureVector& f) {
  Activations act;
  for (std::size_t j = 0; j < kHidden; ++j) {
    double h = theta.b1[j];
    for (std::size_t i = 0; i < kInputs; ++i) h += theta.w1[j][i] * f[i];
    act.hidden[j] = h;
  }
  for (std::size_t a = 0; a < kArms; ++a) {
    double z = theta.b2[a];
    for (std::size_t j = 0; j < kHidden; ++j) z += theta.w2[a][j] * act.hidden[j];
    if (!std::isfinite(z)) throw NumericOverflowError("non-finite logit in policy forward pass");
    act.out[a] = z;
  }
  return act;
}

}  // namespace

Logits logits(const PolicyParams& theta, const FeatureVector& f) {
  const auto act = propagate(theta, f);
  return {act.out[0], act.out[1]};
}

ArmProbabilities forward(const PolicyParams& theta, const FeatureVector& f) {
  const auto z = logits(theta, f);
  return {sigmoid(z.change), sigmoid(z.keep)};
}

PolicyParams grad_term(const PolicyParams& theta, const FeatureVector& f, Action arm, int reward) {
  const auto act = propagate(theta, f);
  const auto a = static_cast<std::size_t>(encode(arm));
  const double p = sigmoid(act.out[a]);
  const double g = static_cast<double>(reward) * p * (1.0 - p);

  PolicyParams grad;
  grad.b2[a] = g;
  for (std::size_t j = 0; j < kHidden; ++j) {
    grad.w2[a][j] = g * act.hidden[j];
    const double dh = g * theta.w2[a][j];
    grad.b1[j] = dh;
    for (std::size_t i = 0; i < kInputs; ++i) grad.w1[j][i] = dh * f[i];
  }
  return grad;
}

Action select_action(const PolicyParams& theta, const FeatureVector& f) {
  const auto z = logits(theta, f);
  return z.change > z.keep ? Action::LaneChange : Action::LaneKeep;
}

// --- model file -------------------------------------------------------------

std::string serialize_model(const Model& model) {
  std::ostringstream out;
  out << kModelMagic << " v" << kModelVersion << '\n';
  out << kInputs << ' ' << kHidden << ' ' << kArms << '\n';
  for (std::size_t i = 0; i < 3; ++i) {
    if (i) out << ' ';
    out << text::format_double(model.scaling.ranges[i].min) << ' '
        << text::format_double(model.scaling.ranges[i].max);
  }
  out << '\n';
  auto line = [&](auto first, auto last) {
    for (auto it = first; it != last; ++it) {
      if (it != first) out << ' ';
      out << text::format_double(*it);
    }
    out << '\n';
  };
  const auto& p = model.params;
  for (const auto& row : p.w1) line(row.begin(), row.end());
  line(p.b1.begin(), p.b1.end());
  for (const auto& row : p.w2) line(row.begin(), row.end());
  line(p.b2.begin(), p.b2.end());
  if (!model.meta.empty()) {
    out << "meta";
    for (const auto& [k, v] : model.meta) out << ' ' << k << '=' << v;
    out << '\n';
  }
  return out.str();
}

namespace {

std::string param_field_name(std::size_t k) {
  auto idx = [](std::size_t i) { return "[" + std::to_string(i) + "]"; };
  if (k < 12) return "w1" + idx(k / kInputs) + idx(k % kInputs);
  k -= 12;
  if (k < 4) return "b1" + idx(k);
  k -= 4;
  if (k < 8) return "w2" + idx(k / kHidden) + idx(k % kHidden);
  k -= 8;
  return "b2" + idx(k);
}

std::vector<std::string_view> tokens_of(std::string_view line) {
  std::vector<std::string_view> out;
  for (auto tok : text::split(line, ' ')) {
    tok = text::trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

}  // namespace

Model parse_model(const std::string& contents) {
  auto lines = text::split(contents, '\n');
  if (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw SchemaError("header", "empty model file");

  const auto header = tokens_of(lines[0]);
  if (header.size() != 2 || header[0] != kModelMagic) {
    throw SchemaError("header", "expected '" + std::string(kModelMagic) + " v1'");
  }
  if (header[1].size() < 2 || header[1][0] != 'v') {
    throw SchemaError("version", "malformed version token");
  }
  const auto version = text::parse_int(header[1].substr(1));
  if (!version) throw SchemaError("version", "malformed version token");
  if (*version != kModelVersion) {
    throw UnsupportedVersionError("version",
                                  "unsupported model version " + std::to_string(*version));
  }

  if (lines.size() < 2) throw SchemaError("dims", "missing layer dimensions");
  const auto dims = tokens_of(lines[1]);
  if (dims.size() != 3 || text::parse_int(dims[0]) != static_cast<long long>(kInputs) ||
      text::parse_int(dims[1]) != static_cast<long long>(kHidden) ||
      text::parse_int(dims[2]) != static_cast<long long>(kArms)) {
    throw SchemaError("dims", "layer dimensions must be '3 4 2'");
  }

  Model model;
  if (lines.size() < 3) throw SchemaError("scaling", "missing normalization ranges");
  const auto ranges = tokens_of(lines[2]);
  if (ranges.size() != 6) throw SchemaError("scaling", "expected six normalization bounds");
  for (std::size_t i = 0; i < 6; ++i) {
    const auto v = text::parse_double(ranges[i]);
    if (!v || !std::isfinite(*v)) {
      throw SchemaError("scaling[" + std::to_string(i) + "]", "bad normalization bound");
    }
    (i % 2 == 0 ? model.scaling.ranges[i / 2].min : model.scaling.ranges[i / 2].max) = *v;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(model.scaling.ranges[i].max > model.scaling.ranges[i].min)) {
      throw SchemaError("scaling[" + std::to_string(2 * i + 1) + "]", "empty normalization range");
    }
  }

  std::array<double, kParamCount> flat{};
  std::size_t k = 0;
  std::size_t li = 3;
  for (; li < lines.size() && k < kParamCount; ++li) {
    const auto toks = tokens_of(lines[li]);
    if (!toks.empty() && toks[0] == "meta") break;
    for (auto tok : toks) {
      if (k == kParamCount) throw SchemaError("trailing", "extra value after b2");
      const auto v = text::parse_double(tok);
      if (!v || !std::isfinite(*v)) {
        throw SchemaError(param_field_name(k), "bad value '" + std::string(tok) + "'");
      }
      flat[k++] = *v;
    }
  }
  if (k < kParamCount) throw SchemaError(param_field_name(k), "missing value");
  model.params = PolicyParams::unflatten(flat);

  for (; li < lines.size(); ++li) {
    const auto toks = tokens_of(lines[li]);
    if (toks.empty()) continue;
    if (toks[0] != "meta") throw SchemaError("trailing", "unexpected content after b2");
    for (std::size_t t = 1; t < toks.size(); ++t) {
      const auto eq = toks[t].find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw SchemaError("meta", "expected key=value, got '" + std::string(toks[t]) + "'");
      }
      model.meta[std::string(toks[t].substr(0, eq))] = std::string(toks[t].substr(eq + 1));
    }
  }
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  text::write_file_atomic(path, serialize_model(model));
}

Model load_model(const std::filesystem::path& path) {
  return parse_model(text::read_file(path));
}

void save_params(const PolicyParams& theta, const std::filesystem::path& path) {
  save_model(Model{theta, kGridScaling, {}}, path);
}

PolicyParams load_params(const std::filesystem::path& path) { return load_model(path).params; }

}  // namespace lanebandit
