#include <algorithm>
#include <stdexcept>

#include "dse/solver/solver.hpp"

namespace dse::solver {

std::vector<sym::Model> brute_force_models(const std::vector<sym::Expr>& conjuncts,
                                           int domain_bits, int max_vars) {
  if (domain_bits < 1 || domain_bits > 12) {
    throw std::invalid_argument("brute_force_models: domain bits must be in 1..12");
  }
  std::map<int, std::string> names = sym::symbol_names(conjuncts);
  if (static_cast<int>(names.size()) > max_vars) {
    throw std::invalid_argument("brute_force_models: " + std::to_string(names.size()) +
                                " symbols exceed the limit of " + std::to_string(max_vars));
  }
  for (const auto& c : conjuncts) {
    if (c->is_const() && c->value == 0) return {};
  }
  // Odometer over symbols in name order, most significant first, so models
  // come out already sorted.
  std::vector<std::pair<std::string, int>> order;
  for (const auto& [id, name] : names) order.emplace_back(name, id);
  std::sort(order.begin(), order.end());
  const std::int64_t lo = domain_min(domain_bits);
  const std::int64_t hi = domain_max(domain_bits);

  int top = 0;
  for (const auto& [id, _] : names) top = std::max(top, id);
  std::vector<std::int32_t> dense(static_cast<size_t>(top + 1), 0);
  std::vector<std::int64_t> values(order.size(), lo);
  std::vector<sym::Model> out;
  for (;;) {
    for (size_t i = 0; i < order.size(); ++i) {
      dense[static_cast<size_t>(order[i].second)] = static_cast<std::int32_t>(values[i]);
    }
    bool ok = true;
    for (const auto& c : conjuncts) {
      if (sym::evaluate(c, dense) == 0) {
        ok = false;
        break;
      }
    }
    if (ok) {
      sym::Model m;
      for (size_t i = 0; i < order.size(); ++i) {
        m[order[i].second] = static_cast<std::int32_t>(values[i]);
      }
      out.push_back(std::move(m));
    }
    bool advanced = false;
    for (size_t i = order.size(); i > 0 && !advanced; --i) {
      if (values[i - 1] < hi) {
        ++values[i - 1];
        advanced = true;
      } else {
        values[i - 1] = lo;
      }
    }
    if (!advanced) break;
  }
  return out;
}

}  // namespace dse::solver
