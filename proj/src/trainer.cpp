#include "lanebandit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lanebandit/errors.hpp"
#include "lanebandit/random.hpp"
#include "lanebandit/text.hpp"

namespace lanebandit {

namespace {

constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kBatchStream = 2;

void shuffle(std::vector<std::size_t>& v, Rng& gen) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(gen, i)]);
  }
}

double population_std(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / n);
}

}  // namespace

void TrainerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw DataError("learning rate must be positive");
  if (batch_size < 1) throw DataError("batch size must be at least 1");
  if (!(reg_lambda >= 0.0) || !std::isfinite(reg_lambda))
    throw DataError("regularization coefficient must be non-negative");
  if (stop_window < 1) throw DataError("stop window must be at least 1");
  if (max_epochs < 1) throw DataError("max epochs must be at least 1");
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw DataError("validation fraction must lie strictly between 0 and 1");
  if (!(stop_std >= 0.0)) throw DataError("stop STD must be non-negative");
}

double objective(const PolicyParams& theta, std::span<const Observation> batch, double lambda,
                 const FeatureScaling& scaling) {
  double sum = 0.0;
  for (const auto& o : batch) {
    sum += forward(theta, normalize(o.context, scaling)).of(o.action) * o.reward;
  }
  return sum - lambda * theta.weight_norm_sq();
}

PolicyParams objective_gradient(const PolicyParams& theta, std::span<const Observation> batch,
                                double lambda, const FeatureScaling& scaling) {
  PolicyParams grad;
  for (const auto& o : batch) {
    grad += grad_term(theta, normalize(o.context, scaling), o.action, o.reward);
  }
  for (std::size_t j = 0; j < kHidden; ++j)
    for (std::size_t i = 0; i < kInputs; ++i) grad.w1[j][i] -= 2.0 * lambda * theta.w1[j][i];
  for (std::size_t a = 0; a < kArms; ++a)
    for (std::size_t j = 0; j < kHidden; ++j) grad.w2[a][j] -= 2.0 * lambda * theta.w2[a][j];
  return grad;
}

PolicyParams step(const PolicyParams& theta, std::span<const Observation> batch,
                  const TrainerConfig& cfg, std::size_t epoch) {
  if (batch.empty()) throw DataError("gradient step needs a non-empty batch");
  PolicyParams next;
  try {
    next = theta + cfg.learning_rate * objective_gradient(theta, batch, cfg.reg_lambda, cfg.scaling);
  } catch (const NumericOverflowError& e) {
    throw DivergenceError(epoch, "training diverged at epoch " + std::to_string(epoch) + ": " +
                                     e.what());
  }
  if (!next.all_finite()) {
    throw DivergenceError(epoch, "training diverged at epoch " + std::to_string(epoch));
  }
  return next;
}

ValidationSplit split_validation(const std::vector<Observation>& data, const TrainerConfig& cfg) {
  const std::size_t n = data.size();
  if (n < 5) throw DataError("need at least 5 observations to split off a validation set");
  if (!(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0))
    throw DataError("validation fraction must lie strictly between 0 and 1");

  const auto n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(cfg.val_fraction * static_cast<double>(n))), 1, n - 1);

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = reconstruct_true_action(data[i].action, data[i].reward);
    by_class[static_cast<std::size_t>(encode(t))].push_back(i);
  }

  Rng gen = derive_rng(cfg.seed, kSplitStream);
  ValidationSplit out;
  std::vector<bool> in_val(n, false);

  if (by_class[0].empty() || by_class[1].empty()) {
    out.stratified = false;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    shuffle(all, gen);
    for (std::size_t k = 0; k < n_val; ++k) in_val[all[k]] = true;
  } else {
    // Largest-remainder allocation of the validation quota across classes.
    std::array<std::size_t, 2> quota{};
    std::array<double, 2> rem{};
    for (std::size_t c = 0; c < 2; ++c) {
      const double exact = static_cast<double>(n_val) * static_cast<double>(by_class[c].size()) /
                           static_cast<double>(n);
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      rem[c] = exact - static_cast<double>(quota[c]);
    }
    if (quota[0] + quota[1] < n_val) ++quota[rem[1] > rem[0] ? 1 : 0];
    for (std::size_t c = 0; c < 2; ++c) {
      if (quota[c] == 0 && quota[1 - c] > 1) {
        quota[c] = 1;
        --quota[1 - c];
      }
    }
    for (std::size_t c = 0; c < 2; ++c) {
      shuffle(by_class[c], gen);
      for (std::size_t k = 0; k < quota[c]; ++k) in_val[by_class[c][k]] = true;
    }
  }

  for (std::size_t i = 0; i < n; ++i) (in_val[i] ? out.validation : out.train).push_back(data[i]);
  return out;
}

double accuracy(const PolicyParams& theta, std::span<const LabeledExample> labeled,
                const FeatureScaling& scaling) {
  if (labeled.empty()) throw DataError("accuracy needs at least one labeled example");
  std::size_t hits = 0;
  for (const auto& e : labeled) {
    if (select_action(theta, normalize(e.context, scaling)) == e.true_action) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labeled.size());
}

std::string_view to_string(StopReason r) noexcept {
  return r == StopReason::StdConverged ? "StdConverged" : "MaxEpochs";
}

TrainingResult train(const std::vector<Observation>& data, const TrainerConfig& cfg) {
  cfg.validate();
  auto split = split_validation(data, cfg);
  const auto train_labels = to_labeled(split.train);
  const auto val_labels = to_labeled(split.validation);
  const auto& pool = split.train;

  TrainingResult result;
  result.params = init_params(cfg.seed);
  result.log.stratified_split = split.stratified;
  result.log.epochs.reserve(std::min<std::size_t>(cfg.max_epochs, 1 << 16));

  Rng gen = derive_rng(cfg.seed, kBatchStream);
  std::vector<Observation> batch(cfg.batch_size);
  std::vector<std::size_t> indices(pool.size());
  std::vector<double> val_history;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (pool.size() < cfg.batch_size) {
      for (auto& row : batch) row = pool[uniform_index(gen, pool.size())];
    } else {
      std::iota(indices.begin(), indices.end(), 0);
      for (std::size_t k = 0; k < cfg.batch_size; ++k) {
        std::swap(indices[k], indices[k + uniform_index(gen, pool.size() - k)]);
        batch[k] = pool[indices[k]];
      }
    }
    result.params = step(result.params, batch, cfg, epoch);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_acc = accuracy(result.params, train_labels, cfg.scaling);
    rec.val_acc = accuracy(result.params, val_labels, cfg.scaling);
    rec.objective = objective(result.params, pool, cfg.reg_lambda, cfg.scaling);
    result.log.epochs.push_back(rec);
    val_history.push_back(rec.val_acc);

    if (epoch >= cfg.stop_window) {
      const std::span<const double> window(val_history.end() - static_cast<std::ptrdiff_t>(cfg.stop_window),
                                           val_history.end());
      result.log.final_val_std = population_std(window);
      if (result.log.final_val_std < cfg.stop_std && rec.val_acc >= cfg.stop_val_acc) {
        result.log.stop_reason = StopReason::StdConverged;
        return result;
      }
    }
  }
  result.log.stop_reason = StopReason::MaxEpochs;
  return result;
}

std::string format_training_log(const TrainingLog& log) {
  std::string out = "epoch,train_acc,val_acc,objective\n";
  for (const auto& r : log.epochs) {
    out += std::to_string(r.epoch);
    out += ',';
    out += text::format_double(r.train_acc);
    out += ',';
    out += text::format_double(r.val_acc);
    out += ',';
    out += text::format_double(r.objective);
    out += '\n';
  }
  out += "# stop_reason=";
  out += to_string(log.stop_reason);
  out += '\n';
  out += "# epochs=" + std::to_string(log.epochs.size()) + '\n';
  if (!log.epochs.empty()) {
    out += "# final_train_acc=" + text::format_double(log.last().train_acc) + '\n';
    out += "# final_val_acc=" + text::format_double(log.last().val_acc) + '\n';
    out += "# final_objective=" + text::format_double(log.last().objective) + '\n';
  }
  out += "# final_val_std=" + text::format_double(log.final_val_std) + '\n';
  out += std::string("# stratified_split=") + (log.stratified_split ? "true" : "false") + '\n';
  return out;
}

void write_training_log(const TrainingLog& log, const std::filesystem::path& path) {
  text::write_file_atomic(path, format_training_log(log));
}

}  // namespace lanebandit
