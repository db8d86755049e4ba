#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "dse/learn/learn.hpp"
#include "test_util.hpp"

namespace dse::learn {
namespace {

const char* kIf = "void main(){ int x = input(); if (x > 0) { x = 1; } }";

TEST(SampleParams, DegenerateIntervals) {
  std::mt19937_64 rng(1);
  SampleSpaces s(40, Interval{0, 0});
  for (const auto& t : sample_params(s, 20, rng)) EXPECT_EQ(t, ParamVector(40, 0.0));
}

TEST(SampleParams, UniformMeans) {
  std::mt19937_64 rng(2);
  auto samples = sample_params(initial_spaces(40), 10000, rng);
  ASSERT_EQ(samples.size(), 10000u);
  for (size_t i = 0; i < 40; ++i) {
    double sum = 0;
    for (const auto& t : samples) {
      ASSERT_GE(t[i], -1.0);
      ASSERT_LE(t[i], 1.0);
      sum += t[i];
    }
    EXPECT_NEAR(sum / 10000.0, 0.0, 0.05) << i;
  }
}

TEST(SampleParams, RangeContainment) {
  std::mt19937_64 rng(3);
  SampleSpaces s = initial_spaces(5);
  s[2] = {0.5, 1};
  for (const auto& t : sample_params(s, 2000, rng)) {
    EXPECT_GE(t[2], 0.5);
    EXPECT_LE(t[2], 1.0);
  }
}

TEST(Refine, Rules) {
  SampleSpaces s = initial_spaces(4);
  SampleSpaces r = refine(s, {0.3, -0.7, -0.1, 0.0}, {0.5, -0.2, 0.4, 0.6});
  EXPECT_EQ(r[0], (Interval{0.3, 1}));
  EXPECT_EQ(r[1], (Interval{-1, -0.2}));
  EXPECT_EQ(r[2], (Interval{-1, 1}));
  EXPECT_EQ(r[3], (Interval{-1, 1}));
}

TEST(Refine, IntervalsNest) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    SampleSpaces s = initial_spaces(10);
    for (int step = 0; step < 6; ++step) {
      auto two = sample_params(s, 2, rng);
      SampleSpaces r = refine(s, two[0], two[1]);
      for (size_t i = 0; i < s.size(); ++i) {
        EXPECT_LE(r[i].lo, r[i].hi);
        EXPECT_GE(r[i].lo, s[i].lo);
        EXPECT_LE(r[i].hi, s[i].hi);
        EXPECT_GE(r[i].lo, -1.0);
        EXPECT_LE(r[i].hi, 1.0);
      }
      s = r;
    }
  }
}

TEST(Evaluate, TwoBranchProgram) {
  lang::Program p = lang::parse(kIf);
  lang::Cfg cfg = lang::build_cfg(p);
  EvalConfig ec;
  ec.budget = 2;
  EXPECT_EQ(evaluate(p, cfg, ParamVector(40, 0.0), ec, 9), 2);
  ec.budget = 1;
  EXPECT_EQ(evaluate(p, cfg, ParamVector(40, 0.0), ec, 9), 1);
}

TEST(Evaluate, Deterministic) {
  lang::Program p = lang::parse_file(test::corpus_path("switchy.mc"));
  lang::Cfg cfg = lang::build_cfg(p);
  std::mt19937_64 rng(5);
  auto theta = sample_params(initial_spaces(40), 1, rng)[0];
  EvalConfig ec;
  ec.budget = 40;
  EXPECT_EQ(evaluate(p, cfg, theta, ec, 17), evaluate(p, cfg, theta, ec, 17));
  ec.mode = features::Mode::Egt;
  auto theta26 = sample_params(initial_spaces(26), 1, rng)[0];
  EXPECT_EQ(evaluate(p, cfg, theta26, ec, 17), evaluate(p, cfg, theta26, ec, 17));
}

TEST(Optimize, FlatObjectiveConvergesAtSecondIteration) {
  lang::Program p = lang::parse("void main(){ int x = input(); x = x + 1; }");
  LearnConfig cfg;
  cfg.n = 4;
  cfg.K = 2;
  cfg.trials = 2;
  cfg.eval.budget = 3;
  OptResult r = optimize(p, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.converged_at, 2);
  ASSERT_EQ(r.log.size(), 2u);
  EXPECT_EQ(r.theta_max, r.log[0].shortlist[static_cast<size_t>(r.log[0].top1)].theta);
}

// Audits the logged data of an optimize run.
void audit(const OptResult& r, const LearnConfig& cfg) {
  double running = -1;
  for (size_t t = 0; t < r.log.size(); ++t) {
    const IterationLog& it = r.log[t];
    ASSERT_EQ(static_cast<int>(it.find.size()), cfg.n);
    ASSERT_EQ(static_cast<int>(it.shortlist.size()), cfg.K);
    double worst_short = 1e18;
    std::set<int> picked;
    for (const auto& s : it.shortlist) {
      picked.insert(s.index);
      worst_short = std::min(worst_short, it.find[static_cast<size_t>(s.index)].coverage);
      double mean = std::accumulate(s.trials.begin(), s.trials.end(), 0.0) / cfg.trials;
      EXPECT_NEAR(s.coverage, mean, 1e-9);
    }
    for (const auto& f : it.find) {
      if (!picked.count(f.index)) EXPECT_LE(f.coverage, worst_short);
    }
    const auto& t1 = it.shortlist[static_cast<size_t>(it.top1)];
    const auto& t2 = it.shortlist[static_cast<size_t>(it.top2)];
    EXPECT_NE(it.top1, it.top2);
    for (const auto& s : it.shortlist) EXPECT_LE(s.coverage, t1.coverage);
    for (size_t j = 0; j < it.shortlist.size(); ++j) {
      if (static_cast<int>(j) != it.top1) EXPECT_LE(it.shortlist[j].coverage, t2.coverage);
    }
    EXPECT_EQ(it.best, t1.coverage);
    if (t + 1 < r.log.size()) {
      EXPECT_FALSE(it.converged);
      EXPECT_GE(it.max, running);
      running = it.max;
      const SampleSpaces& next = r.log[t + 1].spaces;
      EXPECT_EQ(next, refine(it.spaces, t1.theta, t2.theta));
    }
  }
}

TEST(Optimize, LogIsConsistentAndDeterministic) {
  lang::Program p = lang::parse_file(test::corpus_path("wide.mc"));
  LearnConfig cfg;
  cfg.n = 4;
  cfg.K = 2;
  cfg.trials = 2;
  cfg.eval.budget = 20;
  cfg.seed = 99;
  cfg.max_iterations = 3;
  cfg.strict_convergence = true;
  OptResult a = optimize(p, cfg);
  audit(a, cfg);
  cfg.parallelism = 3;
  OptResult b = optimize(p, cfg);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  ASSERT_EQ(a.log.size(), b.log.size());
  for (size_t t = 0; t < a.log.size(); ++t) EXPECT_EQ(to_json(a.log[t]), to_json(b.log[t]));
}

TEST(Optimize, IterationCap) {
  lang::Program p = lang::parse(kIf);
  LearnConfig cfg;
  cfg.n = 3;
  cfg.K = 2;
  cfg.trials = 1;
  cfg.eval.budget = 2;
  cfg.max_iterations = 1;
  OptResult r = optimize(p, cfg);
  EXPECT_EQ(r.log.size(), 1u);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.theta_max.size(), 40u);
}

TEST(Optimize, RejectsBadConfig) {
  lang::Program p = lang::parse(kIf);
  LearnConfig cfg;
  cfg.K = 1;
  EXPECT_THROW(optimize(p, cfg), std::invalid_argument);
  cfg.K = 5;
  cfg.n = 4;
  EXPECT_THROW(optimize(p, cfg), std::invalid_argument);
}

TEST(DeriveSeed, DistinctPerComponent) {
  std::set<std::uint64_t> seen;
  for (int it = 0; it < 4; ++it)
    for (int ph = 0; ph < 3; ++ph)
      for (int i = 0; i < 50; ++i) seen.insert(derive_seed(7, it, ph, i));
  EXPECT_EQ(seen.size(), 4u * 3u * 50u);
  EXPECT_EQ(derive_seed(7, 1, 1, 1), derive_seed(7, 1, 1, 1));
}

TEST(ParallelFor, JoinsByIndexAndRethrows) {
  std::vector<int> out(100, 0);
  parallel_for(100, 4, [&](int i) { out[static_cast<size_t>(i)] = i * i; });
  for (int i = 0; i < 100; ++i) EXPECT_EQ(out[static_cast<size_t>(i)], i * i);
  EXPECT_THROW(parallel_for(10, 3, [](int i) {
                 if (i == 4) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

}  // namespace
}  // namespace dse::learn
