#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dse/features/features.hpp"

namespace dse::features {

namespace {

int ceil_tenth(int n) { return (n + 9) / 10; }

// Branch features shared by both catalogs, computed from the site alone.
struct SiteFacts {
  bool in_main, loop_true, loop_false, in_loop, case_true, case_false, in_case;
  bool big_function, function_has_loop;
};

SiteFacts facts(const lang::Program& p, lang::BranchId b) {
  lang::BranchSite s = p.site(b);
  const lang::Function& f = p.functions[static_cast<size_t>(s.function)];
  bool loop = s.kind == lang::BranchKind::WhileHeader;
  bool sw = s.kind == lang::BranchKind::SwitchCase;
  return {s.function == p.entry, loop && s.polarity, loop && !s.polarity, s.in_loop_body,
          sw && s.polarity, sw && !s.polarity, sw, f.branch_site_count() >= 10, f.has_loop};
}

std::vector<int> uncovered_per_function(const lang::Program& p,
                                        const std::vector<char>& covered_branches) {
  std::vector<int> out(p.functions.size(), 0);
  for (int b = 0; b < p.branch_count(); ++b) {
    if (!covered_branches[static_cast<size_t>(b)]) {
      ++out[static_cast<size_t>(p.conditionals[static_cast<size_t>(lang::conditional_of(b))].function)];
    }
  }
  return out;
}

}  // namespace

int percentile_count(size_t n) { return ceil_tenth(static_cast<int>(n)); }

std::vector<size_t> lowest_fraction(const std::vector<std::int64_t>& keys,
                                    const std::vector<std::int64_t>& tiebreak) {
  std::vector<size_t> order(keys.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return tiebreak[a] < tiebreak[b];
  });
  order.resize(static_cast<size_t>(percentile_count(keys.size())));
  return order;
}

// ---- branch features ----

BranchFeatureContext::BranchFeatureContext(const concolic::ConcolicView& view) : view_(view) {
  const auto& p = view.program;
  const auto& tree = view.tree;
  std::vector<lang::BranchId> uncovered;
  for (int b = 0; b < p.branch_count(); ++b) {
    if (!tree.covered[static_cast<size_t>(b)]) uncovered.push_back(b);
  }
  dist_ = uncovered.empty() ? std::vector<std::optional<int>>(static_cast<size_t>(p.branch_count()))
                            : lang::distances_to(view.cfg, uncovered);
  uncovered_per_function_ = uncovered_per_function(p, tree.covered);
  max_uncovered_ = *std::max_element(uncovered_per_function_.begin(), uncovered_per_function_.end());

  bool any = false;
  for (const auto& s : tree.sites) {
    if (s.occurrences == 0) continue;
    if (!any) {
      max_occurrences_ = min_occurrences_ = s.occurrences;
      any = true;
    }
    max_occurrences_ = std::max(max_occurrences_, s.occurrences);
    min_occurrences_ = std::min(min_occurrences_, s.occurrences);
  }
  if (tree.size() > 0) {
    origin_ = tree.origin.back();
    const auto& last = tree.last();
    for (auto it = last.conds.rbegin(); it != last.conds.rend(); ++it) {
      if (it->site) {
        recent_function_ = p.site(*it->site).function;
        break;
      }
    }
  }
  if (tree.last_choice_path >= 0) {
    const auto& c = tree.paths[static_cast<size_t>(tree.last_choice_path)].at(tree.last_choice_index);
    chosen_function_ = p.site(*c.site).function;
  }
}

FeatureVector BranchFeatureContext::extract(int i) const {
  FeatureVector f(kBranchFeatures, 0);
  const auto& p = view_.program;
  const auto& tree = view_.tree;
  const sym::PathCondition& path = tree.last();
  const sym::BranchCondition& c = path.at(i);
  if (!c.site) return f;
  lang::BranchId s = *c.site;
  lang::BranchId opp = lang::opposite(s);
  const lang::Conditional& cond = p.conditionals[static_cast<size_t>(lang::conditional_of(s))];
  const concolic::SiteStats& st = tree.sites[static_cast<size_t>(s)];
  const concolic::SiteStats& ost = tree.sites[static_cast<size_t>(opp)];
  SiteFacts sf = facts(p, s);
  int n = path.size();
  int tenth = ceil_tenth(n);
  auto set = [&](int idx, bool v) { f[static_cast<size_t>(idx - 1)] = v ? 1 : 0; };

  set(1, sf.in_main);
  set(2, sf.loop_true);
  set(3, sf.loop_false);
  set(4, sf.in_loop);
  set(5, sf.case_true);
  set(6, sf.case_false);
  set(7, cond.shape.uses_constant);
  set(8, cond.shape.uses_array_deref);
  set(9, cond.shape.is_equality);
  set(10, cond.shape.comparison_count >= 2);
  set(11, sf.in_case);
  set(12, sf.big_function);

  set(13, i <= tenth);
  set(14, i > n - tenth);
  set(15, st.occurrences == max_occurrences_);
  set(16, st.occurrences == min_occurrences_);
  set(17, origin_ > 0 && i == origin_ + 1);
  set(18, chosen_function_ >= 0 && cond.function == chosen_function_);
  for (int k = 1; k <= 5; ++k) {
    set(18 + k, tree.contexts[static_cast<size_t>(k - 1)].count(concolic::context_of(path, i, k)) == 0);
  }
  set(24, st.negations > 10);
  set(25, st.negations > 20);
  set(26, st.negations > 30);
  set(27, !tree.covered[static_cast<size_t>(opp)]);
  set(28, st.last_failed);
  set(29, st.failures > 5);
  const auto& d = dist_[static_cast<size_t>(opp)];
  set(30, d && *d <= 10);
  set(31, d && *d <= 20);
  int execs = tree.size();
  set(32, ost.last_seen >= 0 && ost.last_seen >= execs - 10);
  set(33, ost.last_seen >= 0 && ost.last_seen >= execs - 20);
  set(34, ost.last_seen >= 0 && ost.last_seen >= execs - 30);
  set(35, max_uncovered_ > 0 &&
              uncovered_per_function_[static_cast<size_t>(cond.function)] == max_uncovered_);
  set(36, cond.function == recent_function_);
  set(37, 2 * i > n);
  set(38, st.negations == 0);
  set(39, sf.function_has_loop);
  set(40, sym::symbols_of({c.expr}).size() >= 2);
  return f;
}

FeatureVector extract_branch_features(const BranchFeatureContext& ctx, int i) {
  return ctx.extract(i);
}

// ---- state features ----

StateFeatureContext::StateFeatureContext(const egt::EgtView& view) : view_(view) {
  const auto& pool = view.pool;
  size_t n = pool.size();
  std::vector<std::int64_t> order(n), neg_depth(n), depth(n), instrs(n), cov_fn(n), cost(n),
      dist(n), since(n);
  for (size_t i = 0; i < n; ++i) {
    const egt::SymState& s = pool[i];
    order[i] = s.stats.creation_order;
    depth[i] = s.stats.depth;
    neg_depth[i] = -depth[i];
    instrs[i] = s.stats.instrs;
    cov_fn[i] = view.covered_in_function[static_cast<size_t>(s.function())];
    cost[i] = s.stats.query_cost;
    dist[i] = view.distance(s);
    since[i] = s.stats.since_new_cov;
  }
  percentile_.assign(n, std::vector<std::uint8_t>(7, 0));
  const std::vector<std::int64_t>* keys[7] = {&neg_depth, &depth, &instrs, &cov_fn,
                                              &cost,      &dist,  &since};
  for (size_t row = 0; row < 7; ++row) {
    for (size_t pos : lowest_fraction(*keys[row], order)) percentile_[pos][row] = 1;
  }

  uncovered_per_function_ = uncovered_per_function(view.program, view.covered_branches);
  max_uncovered_ = *std::max_element(uncovered_per_function_.begin(), uncovered_per_function_.end());
  if (view.last_selected_site) from_selected_ = lang::distances_from(view.cfg, *view.last_selected_site);
  bool any = false;
  for (std::int64_t t : view.traversals) {
    if (t == 0) continue;
    if (!any) {
      max_traversals_ = min_traversals_ = t;
      any = true;
    }
    max_traversals_ = std::max(max_traversals_, t);
    min_traversals_ = std::min(min_traversals_, t);
  }
}

FeatureVector StateFeatureContext::extract(size_t pos) const {
  FeatureVector f(kStateFeatures, 0);
  auto set = [&](int idx, bool v) { f[static_cast<size_t>(idx - 1)] = v ? 1 : 0; };
  for (int row = 0; row < 7; ++row) set(20 + row, percentile_[pos][static_cast<size_t>(row)] != 0);

  const egt::SymState& s = view_.pool[pos];
  auto site = s.last_site();
  if (!site) return f;
  const auto& p = view_.program;
  lang::BranchId b = *site;
  SiteFacts sf = facts(p, b);
  int fn = p.site(b).function;
  std::int64_t trav = view_.traversals[static_cast<size_t>(b)];
  std::int64_t last = view_.last_traversal[static_cast<size_t>(b)];

  set(1, sf.in_main);
  set(2, sf.loop_true);
  set(3, sf.loop_false);
  set(4, sf.in_loop);
  set(5, sf.case_true);
  set(6, sf.case_false);
  set(7, trav > 0 && trav == max_traversals_);
  set(8, trav > 0 && trav == min_traversals_);
  if (view_.last_selected_site && *view_.last_selected_site != b) {
    const auto& d = from_selected_[static_cast<size_t>(b)];
    set(9, d && *d == 0);
  }
  set(10, trav > 10);
  set(11, trav > 20);
  set(12, trav > 30);
  set(13, view_.last_selected_site && p.site(*view_.last_selected_site).function == fn);
  set(14, trav == 1);
  set(15, last >= 0 && last >= view_.iteration - 10);
  set(16, last >= 0 && last >= view_.iteration - 20);
  set(17, last >= 0 && last >= view_.iteration - 30);
  set(18, max_uncovered_ > 0 && uncovered_per_function_[static_cast<size_t>(fn)] == max_uncovered_);
  set(19, fn == view_.last_function);
  return f;
}

FeatureVector extract_state_features(const StateFeatureContext& ctx, size_t pos) {
  return ctx.extract(pos);
}

}  // namespace dse::features
