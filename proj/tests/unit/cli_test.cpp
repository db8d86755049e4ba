#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dse/cli/cli.hpp"
#include "test_util.hpp"

namespace dse::cli {
namespace {

TEST(Summarize, MatchesRecomputation) {
  HeuristicSummary h;
  h.coverage = {3, 5, 5, 9};
  summarize(h);
  EXPECT_DOUBLE_EQ(h.mean, 5.5);
  EXPECT_EQ(h.max, 9);
  // population variance: (6.25 + 0.25 + 0.25 + 12.25) / 4 = 4.75
  EXPECT_NEAR(h.std, std::sqrt(4.75), 1e-12);

  HeuristicSummary one;
  one.coverage = {7};
  summarize(one);
  EXPECT_EQ(one.mean, 7);
  EXPECT_EQ(one.max, 7);
  EXPECT_EQ(one.std, 0);
}

TEST(FillExclusive, CoveredByExactlyOne) {
  std::vector<HeuristicSummary> hs(3);
  hs[0].union_covered = {0, 1, 2};
  hs[1].union_covered = {1, 3};
  hs[2].union_covered = {1, 2, 5};
  fill_exclusive(hs);
  EXPECT_EQ(hs[0].exclusive, (std::vector<lang::BranchId>{0}));
  EXPECT_EQ(hs[1].exclusive, (std::vector<lang::BranchId>{3}));
  EXPECT_EQ(hs[2].exclusive, (std::vector<lang::BranchId>{5}));

  std::vector<HeuristicSummary> same(2);
  same[0].union_covered = same[1].union_covered = {0, 1, 4};
  fill_exclusive(same);
  EXPECT_TRUE(same[0].exclusive.empty());
  EXPECT_TRUE(same[1].exclusive.empty());
}

TEST(ReportFeatures, OneHotAndTruncation) {
  heuristics::ParamVector e3(40, 0.0);
  e3[2] = 1;
  FeatureReport r = cmd_report_features(e3, 5);
  EXPECT_EQ(r.mode, features::Mode::Concolic);
  ASSERT_EQ(r.positive.size(), 1u);
  EXPECT_EQ(r.positive[0].index, 3);
  EXPECT_EQ(r.positive[0].description, features::branch_catalog()[2].description);
  EXPECT_TRUE(r.negative.empty());

  heuristics::ParamVector m5(26, 0.0);
  m5[4] = -1;
  r = cmd_report_features(m5, 3);
  EXPECT_EQ(r.mode, features::Mode::Egt);
  ASSERT_EQ(r.negative.size(), 1u);
  EXPECT_EQ(r.negative[0].index, 5);
  EXPECT_TRUE(r.positive.empty());

  heuristics::ParamVector mixed(40, 0.0);
  mixed[0] = 0.2;
  mixed[9] = 0.9;
  mixed[19] = 0.5;
  mixed[29] = -0.4;
  r = cmd_report_features(mixed, 2);
  ASSERT_EQ(r.positive.size(), 2u);
  EXPECT_EQ(r.positive[0].index, 10);
  EXPECT_EQ(r.positive[1].index, 20);
  ASSERT_EQ(r.negative.size(), 1u);
  EXPECT_NE(format(r).find("#30"), std::string::npos);

  EXPECT_THROW(cmd_report_features(heuristics::ParamVector(7, 0.1), 3), UsageError);
}

TEST(Config, FileValuesThenUnknownKeysRejected) {
  RunSpec s;
  apply_json(s, {{"budget", 12}, {"mode", "egt"}, {"solver", "builtin"}, {"trials", 4}});
  EXPECT_EQ(s.budget, 12);
  EXPECT_EQ(s.mode, features::Mode::Egt);
  EXPECT_EQ(s.trials, 4);
  EXPECT_THROW(apply_json(s, {{"budgett", 1}}), UsageError);
  EXPECT_THROW(apply_json(s, {{"budget", "many"}}), UsageError);
  learn::LearnConfig lc;
  apply_json(lc, {{"n", 8}, {"K", 3}, {"check_trials", 2}});
  EXPECT_EQ(lc.n, 8);
  EXPECT_EQ(lc.K, 3);
  EXPECT_EQ(lc.trials, 2);
}

TEST(Run, TriFullCoverageWithDfs) {
  RunSpec s;
  s.program = test::corpus_path("tri.mc");
  s.heuristic = "dfs";
  s.budget = 50;
  nlohmann::json out = cmd_run(s);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0]["coverage"], 6);
}

TEST(MainEntry, ExitCodes) {
  std::ostringstream out, err;
  std::string missing = test::corpus_path("missing.mc");
  std::vector<std::string> args = {"dse", "run", missing};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  EXPECT_EQ(main_entry(static_cast<int>(argv.size()), argv.data(), out, err), kExitUsage);
  EXPECT_NE(err.str().find(missing), std::string::npos);

  std::vector<std::string> help = {"dse", "--help"};
  std::vector<char*> hv;
  for (auto& a : help) hv.push_back(a.data());
  EXPECT_EQ(main_entry(static_cast<int>(hv.size()), hv.data(), out, err), kExitOk);
}

}  // namespace
}  // namespace dse::cli
