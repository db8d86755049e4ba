#include <algorithm>
#include <set>
#include <stdexcept>

#include "dse/concolic/concolic.hpp"

namespace dse::concolic {

std::vector<int> context_of(const sym::PathCondition& path, int i, int k) {
  std::vector<int> ctx;
  ctx.push_back(*path.at(i).site);
  for (int j = i - 1; j >= 1 && static_cast<int>(ctx.size()) <= k; --j) {
    if (path.at(j).site) ctx.push_back(*path.at(j).site);
  }
  return ctx;
}

ExecutionTree::ExecutionTree(int branch_count)
    : sites(static_cast<size_t>(branch_count)), covered(static_cast<size_t>(branch_count), 0) {}

bool ExecutionTree::negatable(int m, int i) const {
  if (m < 0 || m >= size()) return false;
  const auto& path = paths[static_cast<size_t>(m)];
  if (i < 1 || i > path.size()) return false;
  const auto& c = path.at(i);
  return c.site && !c.expr->is_const() && !attempted[static_cast<size_t>(m)][static_cast<size_t>(i - 1)];
}

int ExecutionTree::add(const Trace& t, const InputVector& v, int parent_path, int origin_index) {
  int index = size();
  paths.push_back(t.path);
  inputs.push_back(v);
  parent.push_back(parent_path);
  origin.push_back(origin_index);
  attempted.emplace_back(static_cast<size_t>(t.path.size()), 0);
  for (const auto& c : t.path.conds) {
    if (c.site) ++sites[static_cast<size_t>(*c.site)].occurrences;
  }
  int gained = 0;
  for (lang::BranchId b : t.covered) {
    SiteStats& s = sites[static_cast<size_t>(b)];
    ++s.executions_covering;
    s.last_seen = index;
    if (!covered[static_cast<size_t>(b)]) {
      covered[static_cast<size_t>(b)] = 1;
      ++gained;
    }
  }
  covered_count += gained;
  return gained;
}

void ExecutionTree::record_attempt(int m, int i, bool solved) {
  attempted[static_cast<size_t>(m)][static_cast<size_t>(i - 1)] = 1;
  const auto& path = paths[static_cast<size_t>(m)];
  SiteStats& s = sites[static_cast<size_t>(*path.at(i).site)];
  ++s.negations;
  if (!solved) ++s.failures;
  s.last_failed = !solved;
  for (int k = 1; k <= 5; ++k) contexts[static_cast<size_t>(k - 1)].insert(context_of(path, i, k));
  last_choice_path = m;
  last_choice_index = i;
}

InputVector random_input(const lang::Program& p, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(-128, 127);
  InputVector v(static_cast<size_t>(p.symbol_count()));
  for (auto& x : v) x = dist(rng);
  return v;
}

RunReport run_concolic(const lang::Program& p, const lang::Cfg& cfg, ConcolicHeuristic& h,
                       solver::Solver& solver, const ConcolicOptions& opts,
                       ExecutionTree* tree_out) {
  if (opts.budget < 1) throw std::invalid_argument("execution budget must be at least 1");
  std::mt19937_64 rng(opts.seed);
  ExecutionTree tree(p.branch_count());
  ConcolicView view{p, cfg, tree};
  RunReport report;
  report.seed = opts.seed;

  InputVector v = opts.v0 ? *opts.v0 : random_input(p, rng);
  int parent = -1, origin = 0;
  std::optional<Choice> pending;
  bool unknown_seen = false;
  std::set<std::string> bug_keys;

  for (int exec = 0; exec < opts.budget; ++exec) {
    Trace t = run_concrete(p, v, opts.run);
    int gained = tree.add(t, v, parent, origin);
    report.curve.push_back(tree.covered_count);
    report.executions = exec + 1;
    if (t.bug && bug_keys.insert(t.bug->key()).second) {
      report.bugs.push_back({*t.bug, v, exec});
    }
    if (pending) {
      h.on_outcome(view, *pending, true, gained);
      if (opts.on_negation) opts.on_negation(tree, pending->path, pending->index, v, t);
      pending.reset();
    }
    if (exec + 1 == opts.budget) break;

    bool stop = false;
    for (;;) {
      Choice c = h.choose(view, rng);
      if (c.status == Choice::Status::Candidate) {
        if (!tree.negatable(c.path, c.index)) {
          throw std::logic_error(h.name() + " proposed a non-negatable branch");
        }
        const auto& path = tree.paths[static_cast<size_t>(c.path)];
        sym::Model hint = to_model(tree.inputs[static_cast<size_t>(c.path)]);
        solver::Verdict verdict = solver.check(sym::negated_prefix(path, c.index), &hint);
        bool solved = solver::is_sat(verdict);
        tree.record_attempt(c.path, c.index, solved);
        if (solved) {
          v = tree.inputs[static_cast<size_t>(c.path)];
          for (const auto& [s, value] : solver::model_of(verdict)) v[static_cast<size_t>(s)] = value;
          parent = c.path;
          origin = c.index;
          pending = c;
          break;
        }
        if (std::holds_alternative<solver::Unknown>(verdict)) unknown_seen = true;
        h.on_outcome(view, c, false, 0);
        continue;
      }
      if (c.status == Choice::Status::Complete && !unknown_seen) {
        report.complete = true;
        stop = true;
        break;
      }
      v = random_input(p, rng);
      parent = -1;
      origin = 0;
      ++report.restarts;
      break;
    }
    if (stop) break;
  }

  for (size_t b = 0; b < tree.covered.size(); ++b) {
    if (tree.covered[b]) report.covered.push_back(static_cast<lang::BranchId>(b));
  }
  report.solver = solver.stats();
  if (tree_out) *tree_out = std::move(tree);
  return report;
}

nlohmann::json to_json(const lang::Program& p, const RunReport& r) {
  nlohmann::json bugs = nlohmann::json::array();
  for (const auto& b : r.bugs) {
    bugs.push_back({{"kind", to_string(b.event.kind)},
                    {"sink", b.event.sink},
                    {"line", b.event.loc.line},
                    {"column", b.event.loc.column},
                    {"execution", b.execution},
                    {"input", input_to_json(p, b.input)}});
  }
  return {{"mode", "concolic"},
          {"seed", r.seed},
          {"executions", r.executions},
          {"covered", r.covered},
          {"coverage", r.covered.size()},
          {"branches", p.branch_count()},
          {"curve", r.curve},
          {"bugs", bugs},
          {"restarts", r.restarts},
          {"complete", r.complete},
          {"solver",
           {{"queries", r.solver.queries},
            {"sat", r.solver.sat},
            {"unsat", r.solver.unsat},
            {"unknown", r.solver.unknown}}}};
}

}  // namespace dse::concolic
