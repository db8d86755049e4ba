#include <gtest/gtest.h>

#include <cstdlib>

#include "dse/solver/solver.hpp"
#include "gen.hpp"

namespace dse::solver {
namespace {

using sym::constant;
using sym::Expr;

Expr A() { return sym::symbol(0, "alpha"); }
Expr B() { return sym::symbol(1, "beta"); }

TEST(CheckSat, ContradictoryBounds) {
  auto v = check_sat({sym::lt(A(), constant(1)), sym::gt(A(), constant(5))});
  EXPECT_TRUE(is_unsat(v)) << to_string(v);
}

TEST(CheckSat, NotEqualTwenty) {
  auto v = check_sat({sym::lnot(sym::eq(A(), constant(20)))}, Backend::Builtin, 8);
  ASSERT_TRUE(is_sat(v));
  EXPECT_NE(model_of(v).at(0), 20);
}

TEST(CheckSat, LinearOverFourBits) {
  std::vector<Expr> c = {sym::eq(sym::add(A(), B()), constant(5)), sym::gt(A(), constant(3))};
  auto v = check_sat(c, Backend::Builtin, 4);
  ASSERT_TRUE(is_sat(v));
  const auto& m = model_of(v);
  EXPECT_TRUE(sym::holds(c, m));
  EXPECT_GE(m.at(1), -8);
  EXPECT_LE(m.at(1), 7);
  EXPECT_FALSE(brute_force_models(c, 4).empty());
}

TEST(CheckSat, FullWidthEquality) {
  auto v = check_sat({sym::eq(sym::mul(A(), constant(3)), constant(123456789))});
  ASSERT_TRUE(is_sat(v));
  EXPECT_EQ(sym::evaluate(sym::mul(A(), constant(3)), model_of(v)), 123456789);
}

TEST(CheckSat, WraparoundIsModelled) {
  // alpha + 1 < alpha holds only at INT_MAX.
  auto v = check_sat({sym::lt(sym::add(A(), constant(1)), A())});
  ASSERT_TRUE(is_sat(v)) << to_string(v);
  EXPECT_EQ(model_of(v).at(0), std::numeric_limits<std::int32_t>::max());
}

TEST(CheckSat, HintIsPreferred) {
  BuiltinSolver s;
  sym::Model hint{{0, 42}, {1, -7}};
  auto v = s.check({sym::gt(A(), constant(10)), sym::lt(B(), constant(0))}, &hint);
  ASSERT_TRUE(is_sat(v));
  EXPECT_EQ(model_of(v), hint);
}

TEST(CheckSat, NodeLimitYieldsUnknown) {
  BuiltinOptions o;
  o.node_limit = 5;
  BuiltinSolver s(o);
  // Nonlinear and unsatisfiable: x*x == 2 (mod 2^32) has no solution.
  auto v = s.check({sym::eq(sym::mul(A(), A()), constant(2))});
  ASSERT_TRUE(std::holds_alternative<Unknown>(v));
  EXPECT_EQ(std::get<Unknown>(v).reason, "timeout");
}

TEST(BruteForce, Examples) {
  EXPECT_TRUE(brute_force_models({sym::gt(A(), constant(5))}, 3).empty());
  auto single = brute_force_models({sym::eq(A(), constant(2))}, 3);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0], (sym::Model{{0, 2}}));
  // Pairs with alpha < beta over {-2..1}: 3 + 2 + 1 + 0.
  EXPECT_EQ(brute_force_models({sym::lt(A(), B())}, 2).size(), 6u);
}

TEST(BruteForce, OrderAndLimits) {
  // "beta" sorts before "zeta" even though its id is larger.
  Expr z = sym::symbol(0, "zeta"), b = sym::symbol(1, "beta");
  auto models = brute_force_models({sym::lt(z, b)}, 2);
  ASSERT_EQ(models.size(), 6u);
  EXPECT_EQ(models.front(), (sym::Model{{0, -2}, {1, -1}}));
  EXPECT_EQ(models[1], (sym::Model{{0, -2}, {1, 0}}));
  EXPECT_EQ(models.back(), (sym::Model{{0, 0}, {1, 1}}));
  std::vector<Expr> five;
  for (int i = 0; i < 5; ++i) five.push_back(sym::gt(sym::symbol(i, "s" + std::to_string(i)), constant(0)));
  EXPECT_THROW(brute_force_models(five, 2), std::invalid_argument);
  EXPECT_THROW(brute_force_models({sym::gt(A(), constant(0))}, 13), std::invalid_argument);
}

TEST(OracleAgreement, RandomConstraints) {
  for (int syms = 1; syms <= 3; ++syms) {
    int bits = syms == 1 ? 8 : (syms == 2 ? 6 : 4);
    test::ConstraintGen gen(100 + static_cast<std::uint64_t>(syms), syms, bits);
    BuiltinOptions o;
    o.domain_bits = bits;
    BuiltinSolver s(o);
    for (int trial = 0; trial < 150; ++trial) {
      auto c = gen.constraint();
      auto models = brute_force_models(c, bits);
      auto v = s.check(c);
      ASSERT_FALSE(std::holds_alternative<Unknown>(v)) << to_string(v);
      EXPECT_EQ(is_sat(v), !models.empty());
      if (is_sat(v)) {
        EXPECT_TRUE(sym::holds(c, model_of(v)));
        for (const auto& [id, val] : model_of(v)) {
          EXPECT_GE(val, domain_min(bits));
          EXPECT_LE(val, domain_max(bits));
        }
      }
    }
  }
}

TEST(SmtModel, ParsesCommonForms) {
  auto m = parse_smt_model(
      "(\n  (define-fun |a[1]| () (_ BitVec 32)\n    #x00000014)\n"
      "  (define-fun x () (_ BitVec 32) #b11111111111111111111111111111111)\n"
      "  (define-fun y () (_ BitVec 32) (_ bv7 32))\n)");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0], (std::pair<std::string, std::int32_t>{"a[1]", 20}));
  EXPECT_EQ(m[1].second, -1);
  EXPECT_EQ(m[2].second, 7);
}

TEST(SmtModel, QueryText) {
  std::string q = smtlib_query({sym::gt(A(), constant(3))}, 8);
  EXPECT_NE(q.find("(declare-const |alpha| (_ BitVec 32))"), std::string::npos);
  EXPECT_NE(q.find("(assert (bvsgt |alpha| (_ bv3 32)))"), std::string::npos);
  EXPECT_NE(q.find("(check-sat)"), std::string::npos);
}

bool have_z3() { return std::system("command -v z3 >/dev/null 2>&1") == 0; }

TEST(SmtProcess, AgreesWithOracle) {
  if (!have_z3() && !std::getenv("DSE_SOLVER_CMD")) GTEST_SKIP() << "no SMT solver on PATH";
  auto s = make_solver(Backend::External, 4);
  test::ConstraintGen gen(77, 2, 4);
  for (int trial = 0; trial < 60; ++trial) {
    auto c = gen.constraint();
    auto v = s->check(c);
    ASSERT_FALSE(std::holds_alternative<Unknown>(v)) << to_string(v);
    EXPECT_EQ(is_sat(v), !brute_force_models(c, 4).empty());
    if (is_sat(v)) EXPECT_TRUE(sym::holds(c, model_of(v)));
  }
}

TEST(SmtProcess, MissingBinaryIsUnknown) {
  SmtProcessSolver s("/nonexistent/solver-binary");
  auto v = s.check({sym::gt(A(), constant(3))});
  ASSERT_TRUE(std::holds_alternative<Unknown>(v));
  EXPECT_EQ(std::get<Unknown>(v).reason, "external-process-failure");
}

}  // namespace
}  // namespace dse::solver
