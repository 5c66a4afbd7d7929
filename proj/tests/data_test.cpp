#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "lanebandit/data.hpp"
#include "lanebandit/errors.hpp"
#include "lanebandit/random.hpp"
#include "lanebandit/text.hpp"
#include "lanebandit/usersim.hpp"

namespace lanebandit {
namespace {

namespace fs = std::filesystem;

const std::string kHeader = "x1_m,x2_m,x3_kph,action,reward\n";

TEST(ReadObservations, MapsFields) {
  const auto rows = parse_observations(kHeader + "40,10,80,0,1\n60,35.5,90,1,-1\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (Observation{{40, 10, 80}, Action::LaneChange, 1}));
  EXPECT_EQ(rows[1], (Observation{{60, 35.5, 90}, Action::LaneKeep, -1}));
}

TEST(ReadObservations, ReportsLineOfBadAction) {
  try {
    parse_observations(kHeader + "40,10,80,0,1\n40,10,80,2,1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ReadObservations, ErrorPaths) {
  EXPECT_THROW(parse_observations("x1,x2,x3,a,r\n40,10,80,0,1\n"), ParseError);
  EXPECT_THROW(parse_observations(""), ParseError);
  EXPECT_THROW(parse_observations(kHeader + "40,10,80,0\n"), ParseError);
  EXPECT_THROW(parse_observations(kHeader + "40,10,80,0,0\n"), ParseError);
  EXPECT_THROW(parse_observations(kHeader + "40,abc,80,0,1\n"), ParseError);
  EXPECT_THROW(parse_observations(kHeader + "-40,10,80,0,1\n"), ParseError);
}

TEST(WriteObservations, CanonicalRoundTrip) {
  const std::string canonical = kHeader + "40,10,80,0,1\n52.25,17.125,93.5,1,-1\n";
  EXPECT_EQ(format_observations(parse_observations(canonical)), canonical);
  // Non-canonical spellings normalize.
  EXPECT_EQ(format_observations(parse_observations(kHeader + "40.0,10.00,80,0,+1\n")),
            kHeader + "40,10,80,0,1\n");
}

TEST(WriteObservations, LosslessForArbitraryDoubles) {
  Rng gen(21);
  std::vector<Observation> rows;
  for (int i = 0; i < 500; ++i) {
    rows.push_back({{uniform(gen, 1, 100), uniform(gen, 1, 100), uniform(gen, 1, 150)},
                    (gen() & 1) ? Action::LaneKeep : Action::LaneChange,
                    (gen() & 1) ? 1 : -1});
  }
  const auto path = fs::temp_directory_path() / "lanebandit_obs_roundtrip.csv";
  write_observations(rows, path);
  EXPECT_EQ(read_observations(path), rows);
  fs::remove(path);
}

TEST(ReadLabeled, FieldsEmptyAndDuplicates) {
  const std::string h = "x1_m,x2_m,x3_kph,true_action\n";
  const auto rows = parse_labeled(h + "60,30,90,1\n60,30,90,1\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (LabeledExample{{60, 30, 90}, Action::LaneKeep}));
  EXPECT_EQ(rows[0], rows[1]);
  EXPECT_TRUE(parse_labeled(h).empty());
  EXPECT_THROW(parse_labeled(h + "60,30,90,3\n"), ParseError);
  EXPECT_THROW(parse_labeled(kHeader + "60,30,90,1,1\n"), ParseError);
}

TEST(TrueAction, Reconstruction) {
  EXPECT_EQ(reconstruct_true_action(Action::LaneChange, 1), Action::LaneChange);
  EXPECT_EQ(reconstruct_true_action(Action::LaneChange, -1), Action::LaneKeep);
  EXPECT_EQ(reconstruct_true_action(Action::LaneKeep, -1), Action::LaneChange);
  EXPECT_EQ(reconstruct_true_action(Action::LaneKeep, 1), Action::LaneKeep);
  EXPECT_THROW(reconstruct_true_action(Action::LaneKeep, 0), InvalidRewardError);
  for (Action t : {Action::LaneChange, Action::LaneKeep}) {
    EXPECT_EQ(reconstruct_true_action(t, 1), t);
    EXPECT_EQ(reconstruct_true_action(opposite(t), -1), t);
  }
}

TEST(ToLabeled, RowWise) {
  const Context x{50, 20, 90};
  const auto out = to_labeled({{x, Action::LaneChange, 1}, {x, Action::LaneChange, -1}});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].true_action, Action::LaneChange);
  EXPECT_EQ(out[1].true_action, Action::LaneKeep);
}

TEST(Consistency, ComplementaryPairIsConsistent) {
  const Context x{50, 20, 90};
  const auto rep = consistency_ratio({{x, Action::LaneChange, 1}, {x, Action::LaneKeep, -1}});
  EXPECT_EQ(rep.ratio, 1.0);
  EXPECT_EQ(rep.inconsistent_pairs, 0u);
  EXPECT_EQ(rep.paired_trials, 2u);
  EXPECT_EQ(rep.decision, ScreenDecision::Accept);
}

TEST(Consistency, EndorsingBothActionsIsContradictory) {
  const Context x{50, 20, 90};
  const auto rep = consistency_ratio({{x, Action::LaneChange, 1}, {x, Action::LaneKeep, 1}});
  EXPECT_EQ(rep.ratio, 0.0);
  EXPECT_EQ(rep.consistent_trials, 0u);
  EXPECT_EQ(rep.inconsistent_pairs, 1u);
  EXPECT_EQ(rep.decision, ScreenDecision::Reject);
}

TEST(Consistency, SameActionOppositeRewardsContradict) {
  const Context x{50, 20, 90}, y{60, 20, 90};
  const auto rep = consistency_ratio(
      {{x, Action::LaneKeep, 1}, {x, Action::LaneKeep, -1}, {y, Action::LaneKeep, 1}});
  EXPECT_DOUBLE_EQ(rep.ratio, 1.0 / 3.0);
  EXPECT_EQ(rep.paired_trials, 2u);
}

TEST(Consistency, PublishedRatiosScreenAtDefaultCutoff) {
  EXPECT_EQ(screen(0.89), ScreenDecision::Accept);
  EXPECT_EQ(screen(0.867), ScreenDecision::Accept);
  EXPECT_EQ(screen(0.787), ScreenDecision::Accept);
  EXPECT_EQ(screen(0.44), ScreenDecision::Reject);
}

TEST(Consistency, EmptyIsError) { EXPECT_THROW(consistency_ratio({}), DataError); }

TEST(Consistency, ToleranceGroupsNearlyEqualContexts) {
  const std::vector<Observation> rows{{{50, 20, 90}, Action::LaneChange, 1},
                                      {{50 + 1e-12, 20, 90}, Action::LaneChange, -1}};
  EXPECT_EQ(consistency_ratio(rows).ratio, 0.0);
  EXPECT_EQ(consistency_ratio(rows, kDefaultConsistencyCutoff, 0.0).ratio, 1.0);
}

TEST(Consistency, PermutationInvariant) {
  SimulatedUser u{{0.5, 1.0, -0.5}, -0.4, 0.2, 1};
  Rng gen(4);
  auto rows = generate_session1(u, gen);
  const auto base = consistency_ratio(rows);
  for (int i = 0; i < 20; ++i) {
    for (std::size_t k = rows.size(); k > 1; --k) std::swap(rows[k - 1], rows[uniform_index(gen, k)]);
    const auto rep = consistency_ratio(rows);
    EXPECT_EQ(rep.ratio, base.ratio);
    EXPECT_EQ(rep.inconsistent_pairs, base.inconsistent_pairs);
  }
}

TEST(Consistency, DuplicatingConsistentTrialKeepsOthersClassified) {
  SimulatedUser u{{0.5, 1.0, -0.5}, -0.4, 0.2, 1};
  Rng gen(6);
  const auto rows = generate_session1(u, gen);
  const auto base = consistency_ratio(rows);
  // Find a trial whose context group is consistent and duplicate it.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto group_ok = true;
    const auto t = reconstruct_true_action(rows[i].action, rows[i].reward);
    for (const auto& o : rows)
      if (o.context == rows[i].context && reconstruct_true_action(o.action, o.reward) != t)
        group_ok = false;
    if (!group_ok) continue;
    auto more = rows;
    more.push_back(rows[i]);
    const auto rep = consistency_ratio(more);
    EXPECT_EQ(rep.consistent_trials, base.consistent_trials + 1);
    EXPECT_GE(rep.ratio, base.ratio);
    return;
  }
  FAIL() << "no consistent trial found";
}

}  // namespace
}  // namespace lanebandit
