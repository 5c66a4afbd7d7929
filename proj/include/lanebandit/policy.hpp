#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "lanebandit/scenario.hpp"

namespace lanebandit {

inline constexpr std::size_t kInputs = 3;
inline constexpr std::size_t kHidden = 4;
inline constexpr std::size_t kArms = 2;
inline constexpr std::size_t kParamCount =
    kHidden * kInputs + kHidden + kArms * kHidden + kArms;

/// Weights of the 3-4-2 policy network. The hidden layer is linear; each
/// output unit is an independent sigmoid giving the probability that pulling
/// that arm earns positive feedback. Also used as the gradient container.
struct PolicyParams {
  std::array<std::array<double, kInputs>, kHidden> w1{};
  std::array<double, kHidden> b1{};
  std::array<std::array<double, kHidden>, kArms> w2{};
  std::array<double, kArms> b2{};

  /// Flat view in file order: w1 row-major, b1, w2 row-major, b2.
  std::array<double, kParamCount> flatten() const noexcept;
  static PolicyParams unflatten(const std::array<double, kParamCount>& flat) noexcept;

  PolicyParams& operator+=(const PolicyParams& o) noexcept;
  PolicyParams& operator*=(double s) noexcept;
  friend PolicyParams operator+(PolicyParams a, const PolicyParams& b) noexcept { return a += b; }
  friend PolicyParams operator*(double s, PolicyParams a) noexcept { return a *= s; }

  bool all_finite() const noexcept;
  /// Sum of squared weight entries; biases excluded.
  double weight_norm_sq() const noexcept;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

struct ArmProbabilities {
  double p_change = 0.5;
  double p_keep = 0.5;

  double of(Action a) const noexcept { return a == Action::LaneChange ? p_change : p_keep; }
};

/// Pre-sigmoid output values.
struct Logits {
  double change = 0.0;
  double keep = 0.0;
};

/// Weights i.i.d. uniform in [-0.5, 0.5], biases zero.
PolicyParams init_params(std::uint64_t seed);

double sigmoid(double t) noexcept;

Logits logits(const PolicyParams& theta, const FeatureVector& f);
ArmProbabilities forward(const PolicyParams& theta, const FeatureVector& f);

/// Analytic gradient of reward * pi_theta(arm | f) with respect to theta.
/// Only the pulled arm's output unit receives gradient.
PolicyParams grad_term(const PolicyParams& theta, const FeatureVector& f, Action arm, int reward);

/// Higher output unit wins; an exact tie goes to LaneKeep. Compared on the
/// logits so saturated sigmoids still rank correctly.
Action select_action(const PolicyParams& theta, const FeatureVector& f);

/// A saved policy: parameters plus the feature scaling they were trained with.
struct Model {
  PolicyParams params;
  FeatureScaling scaling = kGridScaling;
  std::map<std::string, std::string> meta;
};

inline constexpr std::string_view kModelMagic = "lanebandit-model";
inline constexpr int kModelVersion = 1;

void save_model(const Model& model, const std::filesystem::path& path);
/// Throws SchemaError (naming the field) or UnsupportedVersionError.
Model load_model(const std::filesystem::path& path);

void save_params(const PolicyParams& theta, const std::filesystem::path& path);
PolicyParams load_params(const std::filesystem::path& path);

std::string serialize_model(const Model& model);
Model parse_model(const std::string& text);

}  // namespace lanebandit
