#include <gtest/gtest.h>

#include <filesystem>

#include "lanebandit/errors.hpp"
#include "lanebandit/evaluator.hpp"
#include "lanebandit/text.hpp"
#include "lanebandit/trainer.hpp"
#include "lanebandit/usersim.hpp"

namespace lanebandit {
namespace {

namespace fs = std::filesystem;

TEST(EvalMatrix, PublishedTableMeans) {
  const auto m = published_reference_matrix();
  // (0.8541 + 0.8333 + 0.8958) / 3 and the mean of the six off-diagonal cells.
  EXPECT_NEAR(m.customized_mean(), 2.5832 / 3.0, 1e-15);
  EXPECT_NEAR(m.non_customized_mean(), 4.5416 / 6.0, 1e-15);
  EXPECT_EQ(text::format_fixed(m.customized_mean(), 4), "0.8611");
  EXPECT_EQ(text::format_fixed(m.non_customized_mean(), 4), "0.7569");
}

TEST(EvalMatrix, Validation) {
  EXPECT_THROW(EvalMatrix({"a"}, {1.0}), DataError);
  EXPECT_THROW(EvalMatrix({"a", "b"}, {1.0, 0.5, 0.5}), DataError);
  EXPECT_THROW(EvalMatrix({"a", "b"}, {1.0, 0.5, 0.5, 1.5}), DataError);
}

TEST(EvalMatrix, SubjectDelta) {
  const EvalMatrix m({"a", "b", "c"}, {0.9, 0.5, 0.6, 0.7, 0.8, 0.6, 0.5, 0.5, 1.0});
  EXPECT_DOUBLE_EQ(m.subject_delta(0), 0.9 - (0.7 + 0.5) / 2);
  EXPECT_DOUBLE_EQ(m.subject_delta(2), 1.0 - (0.6 + 0.6) / 2);
}

TEST(Report, ArityAndRecomputableSummary) {
  const auto m = published_reference_matrix();
  const auto path = fs::temp_directory_path() / "lanebandit_report.csv";
  report(m, path);
  const auto csv = text::read_file(path);
  auto lines = text::split(csv, '\n');
  if (lines.back().empty()) lines.pop_back();
  EXPECT_EQ(lines[0], "model_subject,test_subject,accuracy,customized");

  std::size_t cells = 0;
  double diag = 0, off = 0, reported_diag = -1, reported_off = -1;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.rfind("# customized_mean=", 0) == 0)
      reported_diag = *text::parse_double(line.substr(18));
    else if (line.rfind("# non_customized_mean=", 0) == 0)
      reported_off = *text::parse_double(line.substr(22));
    else if (line[0] != '#') {
      const auto f = text::split(line, ',');
      ASSERT_EQ(f.size(), 4u);
      ++cells;
      (f[3] == "true" ? diag : off) += *text::parse_double(f[2]);
      EXPECT_EQ(f[3] == "true", f[0] == f[1]);
    }
  }
  EXPECT_EQ(cells, 9u);
  EXPECT_EQ(reported_diag, diag / 3);
  EXPECT_EQ(reported_off, off / 6);

  auto scatter_path = path;
  scatter_path += ".scatter.txt";
  const auto scatter = text::read_file(scatter_path);
  EXPECT_NE(scatter.find("customized mean 0.8611"), std::string::npos);
  EXPECT_NE(scatter.find("non-customized mean 0.7569"), std::string::npos);
  fs::remove(path);
  fs::remove(scatter_path);
}

struct TrainedSubjects {
  std::map<std::string, Model> models;
  std::map<std::string, std::vector<LabeledExample>> tests;
};

TrainedSubjects train_subjects(const std::vector<SubjectProfile>& profiles, std::uint64_t seed) {
  TrainedSubjects out;
  for (const auto& p : profiles) {
    Rng gen(p.user.seed * 1000 + seed);
    TrainerConfig cfg;
    cfg.seed = seed * 100 + p.user.seed;
    out.models[p.name] = Model{train(generate_session1(p.user, gen), cfg).params};
    out.tests[p.name] = generate_session2(p.user);
  }
  return out;
}

TEST(CrossEvaluate, IdenticalUsersGiveFlatMatrix) {
  auto user = find_preset("eager")->user;
  user.flip_noise = 0.0;
  std::vector<SubjectProfile> same{{"a", user}, {"b", user}, {"c", user}};
  same[1].user.seed = 5;
  same[2].user.seed = 6;
  const auto subjects = train_subjects(same, 1);
  const auto m = cross_evaluate(subjects.models, subjects.tests);
  EXPECT_NEAR(m.customized_mean(), m.non_customized_mean(), 0.03);
}

TEST(CrossEvaluate, PresetsSeparate) {
  const auto subjects = train_subjects(shipped_presets(), 1);
  const auto m = cross_evaluate(subjects.models, subjects.tests);
  EXPECT_GE(m.customized_mean() - m.non_customized_mean(), 0.05);
  // Deterministic end to end.
  const auto again = train_subjects(shipped_presets(), 1);
  EXPECT_EQ(format_report(cross_evaluate(again.models, again.tests)), format_report(m));
}

TEST(CrossEvaluate, PermutationEquivariant) {
  const auto subjects = train_subjects(shipped_presets(), 2);
  const auto m = cross_evaluate(subjects.models, subjects.tests);
  // Renaming subjects reorders rows and columns together.
  const std::map<std::string, std::string> rename{
      {"eager", "z"}, {"cautious", "y"}, {"distance-keeper", "x"}};
  TrainedSubjects renamed;
  for (const auto& [k, v] : subjects.models) renamed.models[rename.at(k)] = v;
  for (const auto& [k, v] : subjects.tests) renamed.tests[rename.at(k)] = v;
  const auto r = cross_evaluate(renamed.models, renamed.tests);
  auto index = [](const EvalMatrix& mat, const std::string& name) {
    return static_cast<std::size_t>(
        std::find(mat.subjects().begin(), mat.subjects().end(), name) - mat.subjects().begin());
  };
  for (const auto& [a, ra] : rename)
    for (const auto& [b, rb] : rename)
      EXPECT_EQ(m.at(index(m, a), index(m, b)), r.at(index(r, ra), index(r, rb)));
}

TEST(CrossEvaluate, KeyMismatch) {
  std::map<std::string, Model> models{{"a", Model{}}, {"b", Model{}}};
  std::map<std::string, std::vector<LabeledExample>> tests{
      {"a", {{{50, 20, 90}, Action::LaneKeep}}}, {"c", {{{50, 20, 90}, Action::LaneKeep}}}};
  EXPECT_THROW(cross_evaluate(models, tests), DataError);
  tests.erase("c");
  tests["b"] = {};
  EXPECT_THROW(cross_evaluate(models, tests), DataError);
}

}  // namespace
}  // namespace lanebandit
