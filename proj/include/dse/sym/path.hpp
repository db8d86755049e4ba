#pragma once

#include <optional>
#include <vector>

#include "dse/lang/program.hpp"
#include "dse/sym/expr.hpp"

namespace dse::sym {

/// One conjunct φᵢ of a path condition, as taken. Conditions without a
/// site are pinned side constraints (index concretizations, nonzero
/// divisors, bounds checks): they constrain prefixes but are never negated.
struct BranchCondition {
  Expr expr;
  std::optional<lang::BranchId> site;
  int index = 0;  // 1-based position in the path
};

struct PathCondition {
  std::vector<BranchCondition> conds;

  int size() const { return static_cast<int>(conds.size()); }
  bool empty() const { return conds.empty(); }
  /// 1-based access.
  const BranchCondition& at(int i) const { return conds.at(static_cast<size_t>(i - 1)); }
  void push(Expr expr, std::optional<lang::BranchId> site);
  std::vector<Expr> conjuncts() const;
};

/// ⋀_{j<i} φⱼ ∧ ¬φᵢ. Throws std::out_of_range unless 1 <= i <= size().
std::vector<Expr> negated_prefix(const PathCondition& pc, int i);

}  // namespace dse::sym
