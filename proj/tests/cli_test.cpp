#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>

#include "lanebandit/data.hpp"
#include "lanebandit/text.hpp"

namespace lanebandit {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(LANEBANDIT_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Every context answered twice with contradicting feedback: ratio 0.
void write_contradictory(const std::string& path) {
  std::vector<Observation> rows;
  for (const auto& c : enumerate_grid()) {
    rows.push_back({c, Action::LaneChange, 1});
    rows.push_back({c, Action::LaneChange, -1});
  }
  write_observations(rows, path);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lanebandit_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, SimulateRowCountsAndDeterminism) {
  ASSERT_EQ(run("simulate --profile eager --seed 5 --out " + p("a")).code, 0);
  ASSERT_EQ(run("simulate --profile eager --seed 5 --out " + p("b")).code, 0);
  EXPECT_EQ(read_observations(p("a.train.csv")).size(), 180u);
  EXPECT_EQ(read_labeled(p("a.test.csv")).size(), 90u);
  EXPECT_EQ(text::read_file(p("a.train.csv")), text::read_file(p("b.train.csv")));
  EXPECT_EQ(text::read_file(p("a.test.csv")), text::read_file(p("b.test.csv")));
  EXPECT_TRUE(fs::exists(p("a.manifest.json")));

  ASSERT_EQ(run("simulate --profile eager --seed 5 --episodes 360 --out " + p("c")).code, 0);
  EXPECT_EQ(read_observations(p("c.train.csv")).size(), 360u);
}

TEST_F(CliTest, SimulateFromProfileFile) {
  text::write_file_atomic(p("u.profile"),
                          "weights = 0 0 0\nbias = 1\nflip_noise = 0\nseed = 3\n");
  ASSERT_EQ(run("simulate --profile " + p("u.profile") + " --out " + p("u")).code, 0);
  for (const auto& row : read_labeled(p("u.test.csv"))) EXPECT_EQ(row.true_action, Action::LaneChange);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("simulate --out " + p("x")).code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("simulate --profile nobody --out " + p("x")).code, 2);
  EXPECT_EQ(run("--version").code, 0);
}

TEST_F(CliTest, CheckExitCodes) {
  write_contradictory(p("bad.train.csv"));
  const auto reject = run("check " + p("bad.train.csv"));
  EXPECT_EQ(reject.code, 3);
  EXPECT_NE(reject.out.find("decision=Reject"), std::string::npos);
  const auto lenient = run("check " + p("bad.train.csv") + " --cutoff 0");
  EXPECT_EQ(lenient.code, 0);
  EXPECT_NE(lenient.out.find("decision=Accept"), std::string::npos);

  ASSERT_EQ(run("simulate --profile cautious --out " + p("good")).code, 0);
  const auto accept = run("check " + p("good.train.csv"));
  EXPECT_EQ(accept.code, 0);
  EXPECT_NE(accept.out.find("consistency_ratio="), std::string::npos);
}

TEST_F(CliTest, TrainRefusesRejectedDataUnlessForced) {
  write_contradictory(p("bad.train.csv"));
  EXPECT_EQ(run("train " + p("bad.train.csv") + " --out " + p("m")).code, 3);
  EXPECT_FALSE(fs::exists(p("m")));
  EXPECT_EQ(run("train " + p("bad.train.csv") + " --out " + p("m") + " --force --max-epochs 20").code, 0);
  EXPECT_TRUE(fs::exists(p("m")));
}

TEST_F(CliTest, TrainEvalDecide) {
  ASSERT_EQ(run("simulate --profile eager --seed 7 --out " + p("s")).code, 0);
  ASSERT_EQ(run("train " + p("s.train.csv") + " --out " + p("m1") + " --seed 1").code, 0);
  ASSERT_EQ(run("train " + p("s.train.csv") + " --out " + p("m2") + " --seed 1").code, 0);
  EXPECT_EQ(text::read_file(p("m1")), text::read_file(p("m2")));
  EXPECT_EQ(text::read_file(p("m1.log.csv")), text::read_file(p("m2.log.csv")));
  EXPECT_TRUE(fs::exists(p("m1.manifest.json")));

  const auto eval = run("eval " + p("m1") + " " + p("s.test.csv"));
  EXPECT_EQ(eval.code, 0);
  const auto value = text::parse_double(text::trim(eval.out));
  ASSERT_TRUE(value.has_value()) << eval.out;
  EXPECT_EQ(text::trim(eval.out).size(), 6u);  // d.dddd
  EXPECT_GE(*value, 0.0);
  EXPECT_LE(*value, 1.0);

  EXPECT_EQ(text::trim(run("decide " + p("m1") + " 35 30 90").out), "SafeGapFollow (gate)");
  const auto d = run("decide " + p("m1") + " 80 60 80");
  EXPECT_EQ(d.code, 0);
  EXPECT_EQ(d.out.rfind("InitiateLaneChange (policy, ", 0), 0u) << d.out;
  EXPECT_EQ(run("decide " + p("m1") + " -5 30 90").code, 2);
}

TEST_F(CliTest, EvalRejectsEmptyTestSet) {
  ASSERT_EQ(run("simulate --profile eager --out " + p("s")).code, 0);
  ASSERT_EQ(run("train " + p("s.train.csv") + " --out " + p("m") + " --max-epochs 5").code, 0);
  text::write_file_atomic(p("empty.csv"), std::string(kLabeledHeader) + "\n");
  EXPECT_EQ(run("eval " + p("m") + " " + p("empty.csv")).code, 2);
  EXPECT_EQ(run("eval " + p("m") + " " + p("missing.csv")).code, 2);
}

TEST_F(CliTest, CrossReport) {
  std::string specs;
  for (const std::string name : {"eager", "cautious"}) {
    ASSERT_EQ(run("simulate --profile " + name + " --out " + p(name)).code, 0);
    ASSERT_EQ(run("train " + p(name + ".train.csv") + " --out " + p(name + ".model")).code, 0);
    specs += " " + name + "=" + p(name + ".model") + "," + p(name + ".test.csv");
  }
  const auto r = run("cross" + specs + " --out " + p("report.csv"));
  EXPECT_EQ(r.code, 0) << r.out;
  const auto report = text::read_file(p("report.csv"));
  EXPECT_NE(report.find("# customized_mean="), std::string::npos);
  EXPECT_TRUE(fs::exists(p("report.csv.scatter.txt")));
  EXPECT_EQ(run("cross eager=" + p("eager.model") + "," + p("eager.test.csv")).code, 2);
}

}  // namespace
}  // namespace lanebandit
