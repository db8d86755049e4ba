#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

#include "dse/egt/egt.hpp"

namespace dse::egt {

namespace {

std::vector<int> uncovered_blocks(const lang::Program& p, const std::vector<char>& covered) {
  std::vector<int> out;
  for (const auto& b : p.blocks) {
    for (int i = 0; i < b.instr_count(); ++i) {
      if (!covered[static_cast<size_t>(b.first_instr + i)]) {
        out.push_back(b.id);
        break;
      }
    }
  }
  return out;
}

}  // namespace

EgtReport run_egt(const lang::Program& p, const lang::Cfg& cfg, EgtHeuristic& h,
                  solver::Solver& solver, const EgtOptions& opts) {
  if (!opts.max_iterations && !(opts.budget_seconds > 0)) {
    throw std::invalid_argument("budget must be positive");
  }
  if (opts.max_iterations && *opts.max_iterations <= 0) {
    throw std::invalid_argument("iteration budget must be positive");
  }
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const bool deterministic = opts.max_iterations.has_value();
  std::mt19937_64 rng(opts.seed);

  const size_t nb = static_cast<size_t>(p.branch_count());
  std::vector<SymState> pool;
  ForkTree tree;
  std::vector<char> covered_instrs(static_cast<size_t>(p.total_instrs), 0);
  std::vector<char> covered_branches(nb, 0);
  std::vector<int> covered_in_function(p.functions.size(), 0);
  std::vector<std::int64_t> traversals(nb, 0);
  std::vector<std::int64_t> last_traversal(nb, -1);
  std::vector<int> min_distance;
  std::int64_t next_creation = 1;
  std::int64_t iteration = 0;
  int last_function = p.entry;
  bool coverage_grew = true;
  std::optional<lang::BranchId> last_selected_site;

  StepContext ctx;
  ctx.covered_instrs = &covered_instrs;
  ctx.covered_in_function = &covered_in_function;
  ctx.next_creation = &next_creation;
  ctx.last_function = &last_function;
  ctx.coverage_grew = &coverage_grew;

  EgtReport report;
  report.deterministic = deterministic;
  report.seed = opts.seed;
  std::set<std::string> bug_keys;

  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  auto stamp = [&] { return deterministic ? static_cast<double>(iteration) : elapsed(); };
  auto record_test = [&](TestCase t) {
    t.created_at = stamp();
    if (t.bug && bug_keys.insert(t.bug->key()).second) {
      report.bugs.push_back({*t.bug, t.input, static_cast<int>(report.tests.size())});
    }
    if (opts.on_test) opts.on_test(t);
    report.tests.push_back(std::move(t));
  };
  auto expired = [&] {
    if (deterministic) return iteration >= *opts.max_iterations;
    return elapsed() >= opts.budget_seconds;
  };

  SymState init = initial_state(p);
  init.stats.creation_order = 0;
  init.tree_node = tree.add_root(0);
  pool.push_back(std::move(init));

  while (!pool.empty() && !expired()) {
    if (coverage_grew) {
      min_distance = lang::block_hops_to(cfg, uncovered_blocks(p, covered_instrs));
      coverage_grew = false;
    }
    EgtView view{p,          cfg,       pool,      tree,          covered_instrs,
                 covered_branches, covered_in_function, traversals, last_traversal, iteration,
                 last_selected_site, last_function, min_distance};
    size_t idx = h.choose(view, rng);
    if (idx >= pool.size()) throw std::logic_error(h.name() + " chose outside the pool");
    SymState s = std::move(pool[idx]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    last_selected_site = s.last_site();
    ++iteration;

    for (int n = 0;; ++n) {
      std::vector<sym::Expr> parent_phi;
      if (opts.on_fork) parent_phi = s.phi.conjuncts();
      int node = s.tree_node;
      StepOutcome out = step_state(p, std::move(s), solver, ctx);
      for (auto& t : out.tests) record_test(std::move(t));
      for (lang::BranchId b : out.sites) {
        ++traversals[static_cast<size_t>(b)];
        last_traversal[static_cast<size_t>(b)] = iteration;
        covered_branches[static_cast<size_t>(b)] = 1;
      }
      using K = StepOutcome::Kind;
      if (out.kind == K::Continue || out.kind == K::OneArm) {
        s = std::move(out.next[0]);
        s.tree_node = node;
        bool yield = out.solver_used || n + 1 >= opts.batch_instrs;
        if (!yield) continue;
        pool.push_back(std::move(s));
        break;
      }
      if (out.kind == K::Forked) {
        if (opts.on_fork) {
          opts.on_fork({std::move(parent_phi), out.next[0].phi.conjuncts(),
                        out.next[1].phi.conjuncts()});
        }
        auto kids = tree.fork(node, {out.next[0].stats.creation_order,
                                     out.next[1].stats.creation_order});
        out.next[0].tree_node = kids[0];
        out.next[1].tree_node = kids[1];
        pool.push_back(std::move(out.next[0]));
        pool.push_back(std::move(out.next[1]));
        break;
      }
      if (out.kind == K::Dropped) ++report.dropped;
      tree.remove(node);
      break;
    }
  }

  // Remaining states become tests at expiry.
  for (auto& s : pool) {
    TestCase t;
    t.input.assign(static_cast<size_t>(p.symbol_count()), 0);
    for (const auto& [sym_id, value] : s.model) {
      if (sym_id >= 0 && sym_id < p.symbol_count()) t.input[static_cast<size_t>(sym_id)] = value;
    }
    t.origin = TestCase::Origin::Flush;
    t.phi = s.phi.conjuncts();
    record_test(std::move(t));
  }

  report.iterations = iteration;
  Replay r = replay_coverage(p, report.tests);
  report.covered = std::move(r.covered);
  report.curve = std::move(r.curve);
  report.solver = solver.stats();
  return report;
}

Replay replay_coverage(const lang::Program& p, const std::vector<TestCase>& tests) {
  Replay out;
  std::vector<char> seen(static_cast<size_t>(p.branch_count()), 0);
  int count = 0;
  concolic::RunOptions ro;
  ro.concrete_only = true;
  for (const auto& t : tests) {
    concolic::Trace tr = concolic::run_concrete(p, t.input, ro);
    for (lang::BranchId b : tr.covered) {
      if (!seen[static_cast<size_t>(b)]) {
        seen[static_cast<size_t>(b)] = 1;
        ++count;
      }
    }
    out.curve.push_back({t.created_at, count});
  }
  for (size_t b = 0; b < seen.size(); ++b) {
    if (seen[b]) out.covered.push_back(static_cast<lang::BranchId>(b));
  }
  return out;
}

nlohmann::json to_json(const lang::Program& p, const EgtReport& r) {
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& t : r.tests) {
    nlohmann::json j = {{"input", concolic::input_to_json(p, t.input)},
                        {"created_at", t.created_at},
                        {"origin", to_string(t.origin)}};
    if (t.bug) j["bug"] = concolic::to_string(t.bug->kind);
    tests.push_back(std::move(j));
  }
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& c : r.curve) curve.push_back({c.time, c.coverage});
  nlohmann::json bugs = nlohmann::json::array();
  for (const auto& b : r.bugs) {
    bugs.push_back({{"kind", concolic::to_string(b.event.kind)},
                    {"sink", b.event.sink},
                    {"line", b.event.loc.line},
                    {"column", b.event.loc.column},
                    {"test", b.execution},
                    {"input", concolic::input_to_json(p, b.input)}});
  }
  return {{"mode", "egt"},
          {"seed", r.seed},
          {"time_unit", r.deterministic ? "iterations" : "seconds"},
          {"iterations", r.iterations},
          {"tests", tests},
          {"covered", r.covered},
          {"coverage", r.covered.size()},
          {"branches", p.branch_count()},
          {"curve", curve},
          {"bugs", bugs},
          {"dropped", r.dropped},
          {"solver",
           {{"queries", r.solver.queries},
            {"sat", r.solver.sat},
            {"unsat", r.solver.unsat},
            {"unknown", r.solver.unknown}}}};
}

}  // namespace dse::egt
