#pragma once

#include <climits>
#include <vector>

#include "dse/egt/egt.hpp"

namespace dse::test {

/// Owns everything an EgtView points at, for driving heuristics and
/// feature extraction on hand-built pools.
struct PoolFixture {
  lang::Program program;
  lang::Cfg cfg;
  std::vector<egt::SymState> pool;
  egt::ForkTree tree;
  std::vector<char> covered_instrs;
  std::vector<char> covered_branches;
  std::vector<int> covered_in_function;
  std::vector<std::int64_t> traversals;
  std::vector<std::int64_t> last_traversal;
  std::vector<int> min_distance;
  std::int64_t iteration = 0;
  std::optional<lang::BranchId> last_selected;
  int last_function = 0;

  explicit PoolFixture(lang::Program p) : program(std::move(p)), cfg(lang::build_cfg(program)) {
    covered_instrs.assign(static_cast<size_t>(program.total_instrs), 0);
    covered_branches.assign(static_cast<size_t>(program.branch_count()), 0);
    covered_in_function.assign(program.functions.size(), 0);
    traversals.assign(static_cast<size_t>(program.branch_count()), 0);
    last_traversal.assign(static_cast<size_t>(program.branch_count()), -1);
    min_distance.assign(static_cast<size_t>(cfg.block_count), INT_MAX);
  }

  /// Adds a copy of the initial state with the given creation order.
  egt::SymState& add_state(std::int64_t order) {
    egt::SymState s = egt::initial_state(program);
    s.stats.creation_order = order;
    pool.push_back(std::move(s));
    return pool.back();
  }

  egt::EgtView view() const {
    return egt::EgtView{program,         cfg,       pool,          tree,          covered_instrs,
                        covered_branches, covered_in_function, traversals, last_traversal,
                        iteration,       last_selected, last_function, min_distance};
  }
};

}  // namespace dse::test
