#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lanebandit/data.hpp"
#include "lanebandit/policy.hpp"

namespace lanebandit {

struct TrainerConfig {
  double learning_rate = 0.1;
  std::size_t batch_size = 32;
  double reg_lambda = 0.0;
  std::size_t stop_window = 1000;
  double stop_std = 0.01;
  double stop_val_acc = 0.80;
  std::size_t max_epochs = 50000;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  FeatureScaling scaling = kGridScaling;

  /// Throws DataError naming the first violated constraint.
  void validate() const;
};

/// J = sum_t reward_t * pi(a_t | x_t) - lambda * ||weights||^2.
double objective(const PolicyParams& theta, std::span<const Observation> batch, double lambda,
                 const FeatureScaling& scaling = kGridScaling);

/// Gradient of `objective` with respect to theta, summed in batch order.
PolicyParams objective_gradient(const PolicyParams& theta, std::span<const Observation> batch,
                                double lambda, const FeatureScaling& scaling = kGridScaling);

/// One full-batch gradient ascent step. Throws DivergenceError tagged with `epoch`.
PolicyParams step(const PolicyParams& theta, std::span<const Observation> batch,
                  const TrainerConfig& cfg, std::size_t epoch = 0);

struct ValidationSplit {
  std::vector<Observation> train;
  std::vector<Observation> validation;
  /// False when only one preferred action occurs and the split fell back to a plain shuffle.
  bool stratified = true;
};

/// Seeded shuffle, stratified by reconstructed true action.
ValidationSplit split_validation(const std::vector<Observation>& data, const TrainerConfig& cfg);

/// Fraction of examples where select_action matches the label. Throws on an empty set.
double accuracy(const PolicyParams& theta, std::span<const LabeledExample> labeled,
                const FeatureScaling& scaling = kGridScaling);

enum class StopReason { StdConverged, MaxEpochs };
std::string_view to_string(StopReason r) noexcept;

struct EpochRecord {
  std::size_t epoch = 0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  double objective = 0.0;
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;
  StopReason stop_reason = StopReason::MaxEpochs;
  /// Population STD of validation accuracy over the last stop_window epochs.
  double final_val_std = 0.0;
  bool stratified_split = true;

  const EpochRecord& last() const { return epochs.back(); }
};

struct TrainingResult {
  PolicyParams params;
  TrainingLog log;
};

TrainingResult train(const std::vector<Observation>& data, const TrainerConfig& cfg);

/// CSV `epoch,train_acc,val_acc,objective` followed by `# key=value` summary lines.
std::string format_training_log(const TrainingLog& log);
void write_training_log(const TrainingLog& log, const std::filesystem::path& path);

}  // namespace lanebandit
