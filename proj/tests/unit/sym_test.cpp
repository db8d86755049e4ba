#include <gtest/gtest.h>

#include <random>

#include "dse/lang/program.hpp"
#include "dse/solver/solver.hpp"
#include "dse/sym/arith.hpp"
#include "dse/sym/memory.hpp"
#include "dse/sym/path.hpp"
#include "gen.hpp"

namespace dse::sym {
namespace {

// Resolves the expression of `x = <expr>;` in a one-statement main with the
// given scalar locals.
lang::ExprPtr resolved(const std::string& decls, const std::string& expr) {
  static std::vector<lang::Program> keep;
  keep.push_back(lang::parse("void main() { " + decls + " int r = " + expr + "; }"));
  const lang::Program& p = keep.back();
  const auto& body = p.ast.functions[0].body;
  return body.back()->init.expr;
}

SymbolicMemory scalars(std::vector<Expr> values) {
  SymbolicMemory m;
  for (auto& v : values) m.locals.push_back({std::move(v)});
  m.locals.push_back({constant(0)});  // r
  return m;
}

TEST(EvalSymbolic, SubstitutesBindings) {
  Expr alpha = symbol(0, "alpha"), beta = symbol(1, "beta");
  auto mem = scalars({alpha, add(beta, constant(1))});
  Expr r = eval_symbolic(mem, *resolved("int x; int y;", "x + y"));
  EXPECT_TRUE(structurally_equal(r, add(alpha, add(beta, constant(1)))));
  EXPECT_EQ(evaluate(r, Model{{0, 10}, {1, 20}}), 31);
}

TEST(EvalSymbolic, Comparison) {
  Expr alpha = symbol(0, "alpha");
  auto mem = scalars({alpha});
  Expr r = eval_symbolic(mem, *resolved("int x;", "x < 1"));
  EXPECT_TRUE(r->is_bool);
  EXPECT_EQ(to_string(r), "(alpha < 1)");
}

TEST(EvalSymbolic, FoldsConstants) {
  auto mem = scalars({constant(4)});
  Expr r = eval_symbolic(mem, *resolved("int x;", "x * 2"));
  ASSERT_TRUE(r->is_const());
  EXPECT_EQ(r->value, 8);
}

TEST(EvalSymbolic, NoAlgebraicSimplification) {
  Expr alpha = symbol(0, "alpha");
  auto mem = scalars({alpha});
  Expr r = eval_symbolic(mem, *resolved("int x;", "x - x + 0"));
  EXPECT_EQ(to_string(r), "((alpha - alpha) + 0)");
}

TEST(EvalSymbolic, SymbolicIndexNeedsHook) {
  lang::Program p = lang::parse("void main() { int a[3]; int i; int r = a[i]; }");
  const auto& e = p.ast.functions[0].body.back()->init.expr;
  SymbolicMemory mem;
  mem.locals = {{constant(5), constant(6), constant(7)}, {symbol(0, "i")}, {constant(0)}};
  EXPECT_THROW(eval_symbolic(mem, *e), EvalError);
  EvalHooks hooks;
  hooks.read_element = [](const std::vector<Expr>& cells, const Expr& idx) {
    return ite(eq(idx, constant(1)), cells[1], cells[0]);
  };
  Expr r = eval_symbolic(mem, *e, hooks);
  EXPECT_EQ(evaluate(r, Model{{0, 1}}), 6);
}

TEST(EvalSymbolic, DivisorHookSeesSymbolicDivisors) {
  lang::Program p = lang::parse("void main() { int x; int y; int r = x / y + x % 3; }");
  const auto& e = p.ast.functions[0].body.back()->init.expr;
  SymbolicMemory mem;
  mem.locals = {{symbol(0, "x")}, {symbol(1, "y")}, {constant(0)}};
  std::vector<std::string> seen;
  EvalHooks hooks;
  hooks.on_divisor = [&](const Expr& d) { seen.push_back(to_string(d)); };
  eval_symbolic(mem, *e, hooks);
  EXPECT_EQ(seen, std::vector<std::string>{"y"});
}

// Compositionality: evaluating the symbolic result under a model equals
// evaluating the operands separately and combining concretely.
TEST(EvalSymbolic, CompositionalUnderRandomModels) {
  test::ConstraintGen gen(11, 3, 8);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    Expr x = gen.int_expr(3), y = gen.int_expr(3);
    Model m{{0, static_cast<std::int32_t>(rng() % 256) - 128},
            {1, static_cast<std::int32_t>(rng() % 256) - 128},
            {2, static_cast<std::int32_t>(rng() % 256) - 128}};
    std::int32_t a = evaluate(x, m), b = evaluate(y, m);
    EXPECT_EQ(evaluate(add(x, y), m), arith::add(a, b));
    EXPECT_EQ(evaluate(mul(x, y), m), arith::mul(a, b));
    EXPECT_EQ(evaluate(div(x, y), m), arith::div(a, b));
    EXPECT_EQ(evaluate(mod(x, y), m), arith::rem(a, b));
    EXPECT_EQ(evaluate(lt(x, y), m), a < b ? 1 : 0);
  }
}

TEST(Arith, TwoComplementAndSmtDivision) {
  const std::int32_t kMin = std::numeric_limits<std::int32_t>::min();
  EXPECT_EQ(arith::add(std::numeric_limits<std::int32_t>::max(), 1), kMin);
  EXPECT_EQ(arith::div(kMin, -1), kMin);
  EXPECT_EQ(arith::rem(kMin, -1), 0);
  EXPECT_EQ(arith::div(7, 0), -1);
  EXPECT_EQ(arith::div(-7, 0), 1);
  EXPECT_EQ(arith::rem(7, 0), 7);
  EXPECT_EQ(arith::div(-7, 2), -3);
  EXPECT_EQ(arith::rem(-7, 2), -1);
}

PathCondition path_of(std::vector<Expr> conds) {
  PathCondition pc;
  int site = 0;
  for (auto& c : conds) pc.push(std::move(c), site++ * 2);
  return pc;
}

TEST(NegatedPrefix, Examples) {
  Expr a = symbol(0, "a"), b = symbol(1, "b");
  auto pc = path_of({lt(a, constant(1)), gt(b, constant(2))});
  auto c = negated_prefix(pc, 2);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(to_string(c[0]), "(a < 1)");
  EXPECT_EQ(to_string(c[1]), "!(b > 2)");

  auto single = negated_prefix(path_of({lt(a, constant(1))}), 1);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(to_string(single[0]), "!(a < 1)");

  auto three = negated_prefix(path_of({gt(a, constant(0)), gt(a, constant(1)), gt(a, constant(2))}), 3);
  ASSERT_EQ(three.size(), 3u);
  EXPECT_EQ(to_string(three[2]), "!(a > 2)");
  EXPECT_EQ(pc.at(2).index, 2);

  EXPECT_THROW(negated_prefix(pc, 0), std::out_of_range);
  EXPECT_THROW(negated_prefix(pc, 3), std::out_of_range);
}

TEST(NegatedPrefix, ExclusiveWithOwnPrefix) {
  test::ConstraintGen gen(3, 2, 4);
  for (int trial = 0; trial < 200; ++trial) {
    auto pc = path_of(gen.constraint(4));
    for (int i = 1; i <= pc.size(); ++i) {
      auto neg = negated_prefix(pc, i);
      std::vector<Expr> both = neg;
      for (int j = 1; j <= i; ++j) both.push_back(pc.at(j).expr);
      EXPECT_TRUE(solver::brute_force_models(both, 4).empty());
    }
  }
}

TEST(Smtlib, Rendering) {
  Expr x = symbol(0, "x");
  EXPECT_EQ(to_smtlib(lt(add(x, constant(-1)), constant(3))),
            "(bvslt (bvadd |x| (_ bv4294967295 32)) (_ bv3 32))");
  EXPECT_EQ(to_smtlib(lnot(eq(x, constant(20)))), "(not (= |x| (_ bv20 32)))");
}

}  // namespace
}  // namespace dse::sym
