#include "lanebandit/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lanebandit/errors.hpp"
#include "lanebandit/text.hpp"
#include "lanebandit/trainer.hpp"

namespace lanebandit {

namespace {

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace

EvalMatrix::EvalMatrix(std::vector<std::string> subjects, std::vector<double> cells)
    : subjects_(std::move(subjects)), cells_(std::move(cells)) {
  if (subjects_.size() < 2) throw DataError("evaluation matrix needs at least two subjects");
  if (cells_.size() != subjects_.size() * subjects_.size())
    throw DataError("evaluation matrix must be square");
  for (double v : cells_)
    if (!(v >= 0.0 && v <= 1.0)) throw DataError("accuracy outside [0, 1]");
}

std::vector<double> EvalMatrix::diagonal() const {
  std::vector<double> d;
  for (std::size_t i = 0; i < size(); ++i) d.push_back(at(i, i));
  return d;
}

std::vector<double> EvalMatrix::off_diagonal() const {
  std::vector<double> o;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      if (i != j) o.push_back(at(i, j));
  return o;
}

double EvalMatrix::customized_mean() const noexcept { return mean(diagonal()); }
double EvalMatrix::non_customized_mean() const noexcept { return mean(off_diagonal()); }
double EvalMatrix::customized_std() const noexcept { return stddev(diagonal()); }
double EvalMatrix::non_customized_std() const noexcept { return stddev(off_diagonal()); }

double EvalMatrix::subject_delta(std::size_t test) const {
  double others = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    if (i != test) others += at(i, test);
  return at(test, test) - others / static_cast<double>(size() - 1);
}

EvalMatrix cross_evaluate(const std::map<std::string, Model>& models,
                          const std::map<std::string, std::vector<LabeledExample>>& testsets) {
  if (models.size() != testsets.size() ||
      !std::equal(models.begin(), models.end(), testsets.begin(),
                  [](const auto& m, const auto& t) { return m.first == t.first; })) {
    throw DataError("model and test-set subject keys differ");
  }
  std::vector<std::string> subjects;
  for (const auto& [name, _] : models) subjects.push_back(name);
  std::vector<double> cells;
  for (const auto& [_, model] : models) {
    for (const auto& [name, rows] : testsets) {
      if (rows.empty()) throw DataError("test set for '" + name + "' is empty");
      cells.push_back(accuracy(model.params, rows, model.scaling));
    }
  }
  return EvalMatrix(std::move(subjects), std::move(cells));
}

std::string format_report(const EvalMatrix& m) {
  std::string out = "model_subject,test_subject,accuracy,customized\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      out += m.subjects()[i] + ',' + m.subjects()[j] + ',' + text::format_double(m.at(i, j)) + ',' +
             (i == j ? "true" : "false") + '\n';
    }
  }
  out += "# customized_mean=" + text::format_double(m.customized_mean()) + '\n';
  out += "# non_customized_mean=" + text::format_double(m.non_customized_mean()) + '\n';
  out += "# customized_std=" + text::format_double(m.customized_std()) + '\n';
  out += "# non_customized_std=" + text::format_double(m.non_customized_std()) + '\n';
  for (std::size_t j = 0; j < m.size(); ++j) {
    out += "# delta_" + m.subjects()[j] + '=' + text::format_double(m.subject_delta(j)) + '\n';
  }
  return out;
}

std::string format_scatter(const EvalMatrix& m) {
  struct Entry {
    double acc;
    bool customized;
    std::size_t i, j;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) entries.push_back({m.at(i, j), i == j, i, j});
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.acc > b.acc; });

  std::string out;
  for (const auto& e : entries) {
    out += text::format_fixed(e.acc, 4) + (e.customized ? "  customized      " : "  non-customized  ") +
           m.subjects()[e.i] + " -> " + m.subjects()[e.j] + '\n';
  }
  out += "customized mean " + text::format_fixed(m.customized_mean(), 4) + " (std " +
         text::format_fixed(m.customized_std(), 4) + ")\n";
  out += "non-customized mean " + text::format_fixed(m.non_customized_mean(), 4) + " (std " +
         text::format_fixed(m.non_customized_std(), 4) + ")\n";
  return out;
}

void report(const EvalMatrix& m, const std::filesystem::path& path) {
  text::write_file_atomic(path, format_report(m));
  auto scatter = path;
  scatter += ".scatter.txt";
  text::write_file_atomic(scatter, format_scatter(m));
}

EvalMatrix published_reference_matrix() {
  return EvalMatrix({"subject1", "subject2", "subject3"},
                    {0.8541, 0.5625, 0.8542,  //
                     0.75, 0.8333, 0.875,     //
                     0.8541, 0.6458, 0.8958});
}

}  // namespace lanebandit
