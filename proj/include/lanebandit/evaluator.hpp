#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lanebandit/data.hpp"
#include "lanebandit/policy.hpp"

namespace lanebandit {

/// Cross-subject accuracy grid. Row i is the model trained on subject i,
/// column j the test set of subject j; the diagonal holds customized models.
class EvalMatrix {
 public:
  /// `cells` is row-major, subjects.size() squared entries in [0, 1].
  EvalMatrix(std::vector<std::string> subjects, std::vector<double> cells);

  std::size_t size() const noexcept { return subjects_.size(); }
  const std::vector<std::string>& subjects() const noexcept { return subjects_; }
  double at(std::size_t model, std::size_t test) const { return cells_.at(model * size() + test); }

  double customized_mean() const noexcept;
  double non_customized_mean() const noexcept;
  double customized_std() const noexcept;
  double non_customized_std() const noexcept;
  /// Customized accuracy on test set j minus the mean of the other models on it.
  double subject_delta(std::size_t test) const;

 private:
  std::vector<double> diagonal() const;
  std::vector<double> off_diagonal() const;

  std::vector<std::string> subjects_;
  std::vector<double> cells_;
};

/// Evaluates every model on every test set. Key sets must match, at least two subjects.
EvalMatrix cross_evaluate(const std::map<std::string, Model>& models,
                          const std::map<std::string, std::vector<LabeledExample>>& testsets);

/// CSV body: `model_subject,test_subject,accuracy,customized` rows then `# key=value` summary.
std::string format_report(const EvalMatrix& m);
/// One line per cell tagged customized / non-customized, sorted by accuracy.
std::string format_scatter(const EvalMatrix& m);
/// Writes the CSV to `path` and the scatter summary next to it (`<path>.scatter.txt`).
void report(const EvalMatrix& m, const std::filesystem::path& path);

/// Table of published cross-subject accuracies (three subjects).
EvalMatrix published_reference_matrix();

}  // namespace lanebandit
