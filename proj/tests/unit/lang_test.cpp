#include <gtest/gtest.h>

#include <deque>
#include <set>

#include "dse/lang/cfg.hpp"
#include "dse/lang/program.hpp"
#include "test_util.hpp"

namespace dse::lang {
namespace {

TEST(Parse, SingleIfYieldsTwoArms) {
  Program p = parse("void main(){int x=input(); if(x>0){} }");
  ASSERT_EQ(p.branch_count(), 2);
  EXPECT_TRUE(p.site(0).polarity);
  EXPECT_FALSE(p.site(1).polarity);
  EXPECT_EQ(p.site(0).kind, BranchKind::If);
  EXPECT_EQ(p.site(0).conditional, p.site(1).conditional);
  ASSERT_EQ(p.inputs.size(), 1u);
  EXPECT_EQ(p.inputs[0].name, "x");
}

TEST(Parse, WhileHeaderArms) {
  Program p = parse("void main(){int x=input(); while(x<3){x=x+1;} }");
  ASSERT_EQ(p.branch_count(), 2);
  EXPECT_EQ(p.site(0).kind, BranchKind::WhileHeader);
  EXPECT_EQ(p.site(1).kind, BranchKind::WhileHeader);
  EXPECT_FALSE(p.site(0).in_loop_body);
}

TEST(Parse, SyntaxErrorCarriesPosition) {
  try {
    parse("void main(){\n  if(");
    FAIL() << "expected a syntax error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.loc().line, 2);
    EXPECT_EQ(e.loc().column, 6);
  }
}

TEST(Parse, SemanticErrors) {
  EXPECT_THROW(parse("void main(){ y = 1; }"), SemanticError);
  EXPECT_THROW(parse("void f(){} void f(){} void main(){}"), SemanticError);
  EXPECT_THROW(parse("void f(){}"), SemanticError);
  EXPECT_THROW(parse("int f(int a){ return g(a); } int g(int a){ return f(a); } void main(){}"),
               SemanticError);
  EXPECT_THROW(parse("int f(){ return 1; } void main(){ int x = f() + 1; }"), SemanticError);
  EXPECT_THROW(parse("void f(){ int x = input(); } void main(){ f(); }"), SemanticError);
  EXPECT_THROW(parse("void main(){ int a[3]; a = 1; }"), SemanticError);
  EXPECT_THROW(parse("void main(){ int x; x[0] = 1; }"), SemanticError);
}

TEST(Parse, SitesNumberedInSourceOrder) {
  Program p = parse(R"(
    void helper(int a) { if (a == 1) { halt; } }
    void main() {
      int x = input();
      if (x > 0) { helper(x); }
      while (x < 10) { x = x + 1; if (x == 5) { error(); } }
    })");
  ASSERT_EQ(p.conditionals.size(), 4u);
  EXPECT_EQ(p.functions[static_cast<size_t>(p.conditionals[0].function)].name, "helper");
  EXPECT_EQ(p.conditionals[1].loc.line, 5);
  EXPECT_EQ(p.conditionals[2].kind, BranchKind::WhileHeader);
  EXPECT_TRUE(p.conditionals[3].in_loop_body);
  EXPECT_FALSE(p.conditionals[2].in_loop_body);
}

TEST(Parse, SwitchDesugarsToCaseArms) {
  Program p = parse(R"(
    void main() {
      int x = input();
      switch (x) { case 1: x = 2; case -3: x = 4; default: x = 0; }
    })");
  ASSERT_EQ(p.conditionals.size(), 2u);
  for (const auto& c : p.conditionals) {
    EXPECT_EQ(c.kind, BranchKind::SwitchCase);
    EXPECT_TRUE(c.shape.is_equality);
    EXPECT_TRUE(c.shape.uses_constant);
  }
  EXPECT_EQ(pretty_print(*p.conditionals[1].cond), "x == (-3)");
}

TEST(Parse, ConditionShapes) {
  Program p = parse(R"(
    void main() {
      int a[4] = input_array(4);
      int y = input();
      if (a[y] > y) {}
      if (y > 1 && y < 9) {}
      assert(y != 7);
    })");
  ASSERT_EQ(p.conditionals.size(), 3u);
  EXPECT_TRUE(p.conditionals[0].shape.uses_array_deref);
  EXPECT_FALSE(p.conditionals[0].shape.uses_constant);
  EXPECT_EQ(p.conditionals[1].shape.comparison_count, 2);
  EXPECT_TRUE(p.conditionals[2].shape.is_equality);
  ASSERT_EQ(p.sinks.size(), 1u);
  EXPECT_TRUE(p.sinks[0].from_assert);
  EXPECT_EQ(p.symbol_count(), 5);
  EXPECT_EQ(p.symbol_name(2), "a[2]");
  EXPECT_EQ(p.symbol_name(4), "y");
}

TEST(Parse, PrettyPrintRoundTrips) {
  for (const std::string& name : test::corpus_names()) {
    Program p = parse_file(test::corpus_path(name));
    std::string printed = pretty_print(p.ast);
    Ast again = parse_ast(printed);
    EXPECT_TRUE(equivalent(p.ast, again)) << name << "\n" << printed;
    EXPECT_EQ(pretty_print(again), printed) << name;
  }
  const char* tricky = R"(
    int g = -2147483648;
    void main() {
      int x = input();
      x = -(5) + - -x - (-1) * (x - (x - 1));
      x = !(x < 3) && (x || 0) == 1;
    })";
  Ast a = parse_ast(tricky);
  EXPECT_TRUE(equivalent(a, parse_ast(pretty_print(a))));
}

TEST(Parse, BranchIdsAreDense) {
  for (const std::string& name : test::corpus_names()) {
    Program p = parse_file(test::corpus_path(name));
    std::set<int> ids;
    for (int b = 0; b < p.branch_count(); ++b) {
      BranchSite s = p.site(b);
      EXPECT_EQ(s.id, b);
      ids.insert(b);
      EXPECT_NE(s.polarity, p.site(opposite(b)).polarity);
    }
    EXPECT_EQ(static_cast<int>(ids.size()), p.branch_count());
  }
}

TEST(Cfg, StraightLineIsOneBlock) {
  Program p = parse("void main(){ int x = input(); x = x + 1; }");
  Cfg g = build_cfg(p);
  EXPECT_EQ(g.block_count, 1);
  EXPECT_EQ(g.labeled_edge_count(), 0);
}

TEST(Cfg, IfElseIsDiamond) {
  Program p = parse("void main(){ int x = input(); if (x > 0) { x = 1; } else { x = 2; } }");
  Cfg g = build_cfg(p);
  EXPECT_EQ(g.block_count, 4);
  EXPECT_EQ(g.labeled_edge_count(), 2);
  EXPECT_EQ(branch_distance(g, 0, {0}), 0);
  EXPECT_EQ(branch_distance(g, 0, {1}), std::nullopt);
  EXPECT_EQ(branch_distance(g, 1, {0}), std::nullopt);
}

TEST(Cfg, EveryBranchLabelsExactlyOneEdge) {
  for (const std::string& name : test::corpus_names()) {
    Program p = parse_file(test::corpus_path(name));
    Cfg g = build_cfg(p);
    std::vector<int> seen(static_cast<size_t>(p.branch_count()), 0);
    for (const auto& e : g.edges) {
      if (e.site) ++seen[static_cast<size_t>(*e.site)];
    }
    for (int c : seen) EXPECT_EQ(c, 1) << name;
    for (const auto& f : p.functions) {
      for (const auto& e : g.edges) {
        if (e.kind == CfgEdge::Kind::Intra) EXPECT_NE(e.to, f.entry_block) << name;
      }
    }
  }
}

// Hand-drawn CFG of the nested-loop fixture: entry -> header; header -T0->
// body, -F1-> exit; body -T2-> then, -F3-> join; then -> join; join -> header.
TEST(Cfg, NestedIfInsideWhile) {
  Program p = parse_file(test::corpus_path("loopsum.mc"));
  ASSERT_EQ(p.conditionals.size(), 2u);
  Cfg g = build_cfg(p);
  EXPECT_EQ(p.conditionals[0].kind, BranchKind::WhileHeader);
  EXPECT_FALSE(p.site(0).in_loop_body);
  EXPECT_TRUE(p.site(2).in_loop_body);
  EXPECT_TRUE(p.site(3).in_loop_body);
  int header = p.conditionals[0].block;
  int inner = p.conditionals[1].block;
  bool back_edge = false;
  for (const auto& e : g.edges) {
    if (e.to == header && !e.site && e.from != p.functions[static_cast<size_t>(p.entry)].entry_block) {
      back_edge = true;
    }
  }
  EXPECT_TRUE(back_edge);
  EXPECT_EQ(g.edges[static_cast<size_t>(g.site_edge[0])].to, inner);
  // Either inner arm returns to the header with no labeled edge in between.
  EXPECT_EQ(branch_distance(g, 2, {0}), 0);
  EXPECT_EQ(branch_distance(g, 3, {1}), 0);
  EXPECT_EQ(branch_distance(g, 0, {2}), 0);
  EXPECT_EQ(branch_distance(g, 1, {0}), std::nullopt);
}

// Reference: plain Dijkstra over (block, labeled-edge count) with an explicit
// path search, independent of the 0-1 BFS.
std::optional<int> reference_distance(const Program& p, const Cfg& g, BranchId from,
                                      BranchId to) {
  if (from == to) return 0;
  int start = g.edges[static_cast<size_t>(g.site_edge[static_cast<size_t>(from)])].to;
  int goal = g.edges[static_cast<size_t>(g.site_edge[static_cast<size_t>(to)])].from;
  const int n = static_cast<int>(p.blocks.size());
  // Bellman-Ford style relaxation.
  std::vector<int> d(static_cast<size_t>(n), INT32_MAX);
  d[static_cast<size_t>(start)] = 0;
  for (int round = 0; round < n + 1; ++round) {
    bool changed = false;
    for (const auto& e : g.edges) {
      if (d[static_cast<size_t>(e.from)] == INT32_MAX) continue;
      int nd = d[static_cast<size_t>(e.from)] + (e.site ? 1 : 0);
      if (nd < d[static_cast<size_t>(e.to)]) {
        d[static_cast<size_t>(e.to)] = nd;
        changed = true;
      }
    }
    if (!changed) break;
  }
  if (d[static_cast<size_t>(goal)] == INT32_MAX) return std::nullopt;
  return d[static_cast<size_t>(goal)];
}

TEST(Cfg, ThreeSequentialIfs) {
  Program p = parse_file(test::corpus_path("tri.mc"));
  ASSERT_EQ(p.conditionals.size(), 3u);
  Cfg g = build_cfg(p);
  EXPECT_EQ(reference_distance(p, g, 0, 4), 1);
  EXPECT_EQ(branch_distance(g, 0, {4}), 1);
  EXPECT_EQ(branch_distance(g, 0, {2}), 0);
  EXPECT_EQ(branch_distance(g, 4, {0}), std::nullopt);
}

TEST(Cfg, DistanceMatchesReferenceAndBatchQuery) {
  for (const std::string& name : test::corpus_names()) {
    Program p = parse_file(test::corpus_path(name));
    Cfg g = build_cfg(p);
    int n = p.branch_count();
    for (int t = 0; t < n; ++t) {
      auto batch = distances_to(g, {t});
      for (int f = 0; f < n; ++f) {
        auto d = branch_distance(g, f, {t});
        EXPECT_EQ(d, reference_distance(p, g, f, t)) << name << " " << f << "->" << t;
        EXPECT_EQ(d, batch[static_cast<size_t>(f)]) << name;
      }
    }
  }
}

// The count excludes the target edge itself, so chaining through b adds b's
// own edge: d(a,c) <= d(a,b) + 1 + d(b,c).
TEST(Cfg, TriangleInequality) {
  for (const std::string& name : test::corpus_names()) {
    Program p = parse_file(test::corpus_path(name));
    Cfg g = build_cfg(p);
    int n = p.branch_count();
    std::vector<std::vector<std::optional<int>>> d(static_cast<size_t>(n));
    for (int a = 0; a < n; ++a) {
      for (int c = 0; c < n; ++c) d[static_cast<size_t>(a)].push_back(branch_distance(g, a, {c}));
    }
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          auto ab = d[static_cast<size_t>(a)][static_cast<size_t>(b)];
          auto bc = d[static_cast<size_t>(b)][static_cast<size_t>(c)];
          auto ac = d[static_cast<size_t>(a)][static_cast<size_t>(c)];
          if (!ab || !bc || b == a || b == c) continue;
          ASSERT_TRUE(ac.has_value()) << name;
          EXPECT_LE(*ac, *ab + 1 + *bc) << name;
        }
      }
    }
  }
}

}  // namespace
}  // namespace dse::lang
