#include <gtest/gtest.h>

#include <set>

#include "dse/concolic/concolic.hpp"
#include "dse/heuristics/heuristics.hpp"
#include "test_util.hpp"

namespace dse::concolic {
namespace {

const char* kIfTwenty = "void main(){ int x = input(); if (x == 20) { error(); } }";

std::vector<std::optional<lang::BranchId>> sites_of(const sym::PathCondition& pc) {
  std::vector<std::optional<lang::BranchId>> out;
  for (const auto& c : pc.conds) out.push_back(c.site);
  return out;
}

std::vector<lang::BranchId> taken_sites(const sym::PathCondition& pc) {
  std::vector<lang::BranchId> out;
  for (const auto& c : pc.conds) {
    if (c.site) out.push_back(*c.site);
  }
  return out;
}

TEST(RunConcrete, EqualityHitOnErrorArm) {
  lang::Program p = lang::parse(kIfTwenty);
  Trace t = run_concrete(p, {20});
  ASSERT_EQ(t.path.size(), 1);
  const auto& c = t.path.at(1);
  ASSERT_TRUE(c.site);
  EXPECT_EQ(*c.site, lang::true_arm(0));
  EXPECT_TRUE(sym::structurally_equal(c.expr, sym::eq(sym::symbol(0, "x"), sym::constant(20))));
  ASSERT_TRUE(t.bug);
  EXPECT_EQ(t.bug->kind, BugKind::Error);
}

TEST(RunConcrete, EqualityMissTakesOtherArm) {
  lang::Program p = lang::parse(kIfTwenty);
  Trace t = run_concrete(p, {0});
  ASSERT_EQ(t.path.size(), 1);
  EXPECT_EQ(*t.path.at(1).site, lang::false_arm(0));
  EXPECT_TRUE(sym::structurally_equal(
      t.path.at(1).expr, sym::lnot(sym::eq(sym::symbol(0, "x"), sym::constant(20)))));
  EXPECT_FALSE(t.bug);
}

TEST(RunConcrete, LoopHeaderEvaluatedThreeTimes) {
  lang::Program p = lang::parse("void main(){ int x = input(); while (x < 2) { x = x + 1; } }");
  Trace t = run_concrete(p, {0});
  ASSERT_EQ(t.path.size(), 3);
  EXPECT_EQ(taken_sites(t.path),
            (std::vector<lang::BranchId>{lang::true_arm(0), lang::true_arm(0), lang::false_arm(0)}));
  // Hand trace: the header sees x, x+1, x+2.
  sym::Expr x = sym::symbol(0, "x");
  EXPECT_TRUE(sym::structurally_equal(t.path.at(1).expr, sym::lt(x, sym::constant(2))));
  EXPECT_TRUE(sym::structurally_equal(t.path.at(2).expr,
                                      sym::lt(sym::add(x, sym::constant(1)), sym::constant(2))));
  EXPECT_TRUE(sym::structurally_equal(
      t.path.at(3).expr,
      sym::lnot(sym::lt(sym::add(sym::add(x, sym::constant(1)), sym::constant(1)), sym::constant(2)))));
}

TEST(RunConcrete, DivisionByZeroIsABug) {
  lang::Program p = lang::parse("void main(){ int x = input(); int y = 10 / x; }");
  Trace t = run_concrete(p, {0});
  ASSERT_TRUE(t.bug);
  EXPECT_EQ(t.bug->kind, BugKind::DivByZero);
  EXPECT_FALSE(run_concrete(p, {3}).bug);
}

TEST(RunConcrete, OutOfBoundsIsABug) {
  lang::Program p = lang::parse("void main(){ int a[3] = input_array(3); int i = input(); int y = a[i]; }");
  Trace t = run_concrete(p, {1, 2, 3, 5});
  ASSERT_TRUE(t.bug);
  EXPECT_EQ(t.bug->kind, BugKind::OutOfBounds);
  EXPECT_FALSE(run_concrete(p, {1, 2, 3, 2}).bug);
}

TEST(RunConcrete, StepLimitIsRecorded) {
  lang::Program p = lang::parse("void main(){ int x = input(); while (x == x) { x = x + 1; } }");
  RunOptions o;
  o.step_limit = 500;
  Trace t = run_concrete(p, {0}, o);
  EXPECT_TRUE(t.step_limit_hit);
  EXPECT_FALSE(t.bug);
}

TEST(RunConcrete, InputSizeMismatchThrows) {
  lang::Program p = lang::parse(kIfTwenty);
  EXPECT_THROW(run_concrete(p, {}), std::invalid_argument);
}

TEST(RunConcrete, ModelOfInputSatisfiesPath) {
  for (const auto& name : test::corpus_names()) {
    lang::Program p = lang::parse_file(test::corpus_path(name));
    std::mt19937_64 rng(7);
    for (int k = 0; k < 40; ++k) {
      InputVector v = random_input(p, rng);
      Trace t = run_concrete(p, v);
      EXPECT_TRUE(sym::holds(t.path.conjuncts(), to_model(v))) << name << " input " << k;
    }
  }
}

TEST(RunConcrete, Deterministic) {
  lang::Program p = lang::parse_file(test::corpus_path("switchy.mc"));
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    InputVector v = random_input(p, rng);
    Trace a = run_concrete(p, v), b = run_concrete(p, v);
    EXPECT_EQ(sites_of(a.path), sites_of(b.path));
    EXPECT_EQ(a.covered, b.covered);
    EXPECT_EQ(a.bug.has_value(), b.bug.has_value());
  }
}

struct Harness {
  lang::Program p;
  lang::Cfg cfg;
  std::unique_ptr<solver::Solver> solver = solver::make_solver(solver::Backend::Builtin, 32);
  explicit Harness(lang::Program prog) : p(std::move(prog)), cfg(lang::build_cfg(p)) {}

  RunReport run(ConcolicHeuristic& h, ConcolicOptions o, ExecutionTree* tree = nullptr) {
    return run_concolic(p, cfg, h, *solver, o, tree);
  }
};

TEST(RunConcolic, BudgetOfOneRunsV0Once) {
  Harness hs(lang::parse(kIfTwenty));
  auto h = heuristics::dfs_concolic();
  ConcolicOptions o;
  o.budget = 1;
  o.v0 = InputVector{0};
  ExecutionTree tree;
  RunReport r = hs.run(*h, o, &tree);
  EXPECT_EQ(r.executions, 1);
  ASSERT_EQ(tree.size(), 1);
  EXPECT_EQ(tree.inputs[0], (InputVector{0}));
  EXPECT_EQ(r.covered, (std::vector<lang::BranchId>{lang::false_arm(0)}));
  EXPECT_EQ(r.curve, (std::vector<int>{1}));
}

TEST(RunConcolic, SecondExecutionFindsTheError) {
  for (const char* name : {"dfs", "random", "cfds", "cgs", "gen"}) {
    Harness hs(lang::parse(kIfTwenty));
    auto h = heuristics::make_concolic(name);
    ConcolicOptions o;
    o.budget = 2;
    o.v0 = InputVector{0};
    ExecutionTree tree;
    RunReport r = hs.run(*h, o, &tree);
    ASSERT_EQ(tree.size(), 2) << name;
    EXPECT_EQ(tree.inputs[1], (InputVector{20})) << name;
    EXPECT_EQ(r.covered.size(), 2u) << name;
    ASSERT_EQ(r.bugs.size(), 1u) << name;
    EXPECT_EQ(r.bugs[0].input, (InputVector{20})) << name;
  }
}

// Oracle: distinct site sequences over a grid that straddles every guard.
std::set<std::vector<lang::BranchId>> enumerate_tri_paths(const lang::Program& p) {
  std::set<std::vector<lang::BranchId>> out;
  for (int a = -5; a <= 20; ++a) {
    for (int b = 0; b <= 5; ++b) {
      for (int c = -5; c <= 25; ++c) {
        out.insert(taken_sites(run_concrete(p, {a, b, c}).path));
      }
    }
  }
  return out;
}

TEST(RunConcolic, DfsEnumeratesAllPathsOfTri) {
  Harness hs(lang::parse_file(test::corpus_path("tri.mc")));
  auto oracle = enumerate_tri_paths(hs.p);
  ASSERT_EQ(oracle.size(), 8u);
  auto h = heuristics::dfs_concolic();
  ConcolicOptions o;
  o.budget = 20;
  o.seed = 11;
  ExecutionTree tree;
  RunReport r = hs.run(*h, o, &tree);
  std::set<std::vector<lang::BranchId>> explored;
  for (const auto& path : tree.paths) explored.insert(taken_sites(path));
  EXPECT_EQ(explored, oracle);
  EXPECT_EQ(r.covered.size(), 6u);
  EXPECT_LE(r.executions, 20);
}

TEST(RunConcolic, NegationsFollowPrefix) {
  for (const auto& name : test::corpus_names()) {
    for (const char* hname : {"dfs", "random", "cgs", "gen", "cfds"}) {
      Harness hs(lang::parse_file(test::corpus_path(name)));
      auto h = heuristics::make_concolic(hname);
      ConcolicOptions o;
      o.budget = 40;
      o.seed = 5;
      int checked = 0;
      o.on_negation = [&](const ExecutionTree& tree, int m, int i, const InputVector& v,
                          const Trace& t) {
        const auto& src = tree.paths[static_cast<size_t>(m)];
        ASSERT_GE(t.path.size(), i) << name << "/" << hname;
        for (int j = 1; j < i; ++j) {
          ASSERT_EQ(t.path.at(j).site, src.at(j).site) << name << "/" << hname << " j=" << j;
        }
        ASSERT_TRUE(t.path.at(i).site);
        EXPECT_EQ(*t.path.at(i).site, lang::opposite(*src.at(i).site)) << name << "/" << hname;
        EXPECT_TRUE(sym::holds(sym::negated_prefix(src, i), to_model(v)));
        ++checked;
      };
      RunReport r = hs.run(*h, o);
      // CFDS has nothing to aim at once every arm is covered.
      if (static_cast<int>(r.covered.size()) < hs.p.branch_count()) {
        EXPECT_GT(checked, 0) << name << "/" << hname;
      }
      EXPECT_LE(r.executions, 40);
    }
  }
}

TEST(RunConcolic, CurveIsMonotoneAndEndsAtCoverage) {
  for (const auto& name : test::corpus_names()) {
    Harness hs(lang::parse_file(test::corpus_path(name)));
    auto h = heuristics::random_branch();
    ConcolicOptions o;
    o.budget = 60;
    o.seed = 9;
    RunReport r = hs.run(*h, o);
    ASSERT_EQ(static_cast<int>(r.curve.size()), r.executions);
    for (size_t k = 1; k < r.curve.size(); ++k) EXPECT_LE(r.curve[k - 1], r.curve[k]);
    EXPECT_EQ(r.curve.back(), static_cast<int>(r.covered.size()));
    EXPECT_LE(r.executions, 60);
  }
}

TEST(RunConcolic, SameSeedSameReport) {
  Harness hs(lang::parse_file(test::corpus_path("switchy.mc")));
  for (const char* hname : {"random", "cgs:3", "gen"}) {
    ConcolicOptions o;
    o.budget = 50;
    o.seed = 1234;
    auto h1 = heuristics::make_concolic(hname);
    auto h2 = heuristics::make_concolic(hname);
    auto s1 = solver::make_solver(solver::Backend::Builtin, 32);
    auto a = to_json(hs.p, run_concolic(hs.p, hs.cfg, *h1, *s1, o));
    auto s2 = solver::make_solver(solver::Backend::Builtin, 32);
    auto b = to_json(hs.p, run_concolic(hs.p, hs.cfg, *h2, *s2, o));
    EXPECT_EQ(a, b) << hname;
  }
}

TEST(RunConcolic, ExhaustionRestartsWithRandomInput) {
  // The guard cannot hold, so every negation fails and each execution after
  // the first is a restart.
  Harness hs(lang::parse("void main(){ int x = input(); if (x * 0 > 1) { x = 1; } }"));
  auto h = heuristics::random_branch();
  ConcolicOptions o;
  o.budget = 6;
  o.seed = 2;
  RunReport r = hs.run(*h, o);
  EXPECT_EQ(r.covered.size(), 1u);
  EXPECT_EQ(r.restarts, 5);
  EXPECT_EQ(r.executions, 6);
}

TEST(ContextOf, LeadsWithTheSite) {
  sym::PathCondition pc;
  pc.push(sym::boolean(true), 4);
  pc.push(sym::boolean(true), std::nullopt);
  pc.push(sym::boolean(true), 6);
  pc.push(sym::boolean(true), 9);
  EXPECT_EQ(context_of(pc, 4, 2), (std::vector<int>{9, 6, 4}));
  EXPECT_EQ(context_of(pc, 4, 5), (std::vector<int>{9, 6, 4}));
  EXPECT_EQ(context_of(pc, 3, 1), (std::vector<int>{6, 4}));
}

}  // namespace
}  // namespace dse::concolic
