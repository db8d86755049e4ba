#include "dse/sym/path.hpp"

#include <stdexcept>
#include <string>

namespace dse::sym {

void PathCondition::push(Expr expr, std::optional<lang::BranchId> site) {
  conds.push_back({std::move(expr), site, size() + 1});
}

std::vector<Expr> PathCondition::conjuncts() const {
  std::vector<Expr> out;
  out.reserve(conds.size());
  for (const auto& c : conds) out.push_back(c.expr);
  return out;
}

std::vector<Expr> negated_prefix(const PathCondition& pc, int i) {
  if (i < 1 || i > pc.size()) {
    throw std::out_of_range("negated_prefix: index " + std::to_string(i) + " not in 1.." +
                            std::to_string(pc.size()));
  }
  std::vector<Expr> out;
  out.reserve(static_cast<size_t>(i));
  for (int j = 1; j < i; ++j) out.push_back(pc.at(j).expr);
  out.push_back(lnot(pc.at(i).expr));
  return out;
}

}  // namespace dse::sym
