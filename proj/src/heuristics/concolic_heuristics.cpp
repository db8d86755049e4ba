#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "dse/heuristics/heuristics.hpp"

namespace dse::heuristics {

using concolic::Choice;
using concolic::ConcolicView;

double score(const ParamVector& theta, const features::FeatureVector& fv) {
  if (theta.size() != fv.size()) {
    throw std::invalid_argument("theta has " + std::to_string(theta.size()) +
                                " weights, feature vector has " + std::to_string(fv.size()));
  }
  double s = 0;
  for (size_t i = 0; i < fv.size(); ++i) {
    if (fv[i]) s += theta[i];
  }
  return s;
}

double tie_tolerance(const ParamVector& theta) {
  double norm = 0;
  for (double w : theta) norm += std::abs(w);
  return 1e-9 * norm;
}

std::vector<size_t> argmax_set(const ParamVector& theta,
                               const std::vector<features::FeatureVector>& candidates) {
  std::vector<double> scores;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    scores.push_back(score(theta, c));
    top = std::max(top, scores.back());
  }
  double tol = tie_tolerance(theta);
  std::vector<size_t> best;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= top - tol) best.push_back(i);
  }
  return best;
}

namespace {

class Parametric : public concolic::ConcolicHeuristic {
 public:
  explicit Parametric(ParamVector theta) : theta_(std::move(theta)) {
    if (theta_.size() != static_cast<size_t>(features::kBranchFeatures)) {
      throw std::invalid_argument("concolic theta must have " +
                                  std::to_string(features::kBranchFeatures) + " weights");
    }
  }
  std::string name() const override { return "parametric"; }

  Choice choose(const ConcolicView& view, std::mt19937_64&) override {
    const auto& tree = view.tree;
    int m = tree.size() - 1;
    features::BranchFeatureContext ctx(view);
    std::vector<std::pair<int, double>> scored;
    double top = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= tree.last().size(); ++i) {
      if (!tree.negatable(m, i)) continue;
      scored.emplace_back(i, score(theta_, ctx.extract(i)));
      top = std::max(top, scored.back().second);
    }
    double tol = tie_tolerance(theta_);
    for (const auto& [i, s] : scored) {
      if (s >= top - tol) return Choice::candidate(m, i);
    }
    return Choice::exhausted();
  }

 private:
  ParamVector theta_;
};

// Depth-first over the execution tree: the deepest open branch of the
// latest path, backtracking through the paths it was derived from.
class Dfs : public concolic::ConcolicHeuristic {
 public:
  std::string name() const override { return "dfs"; }

  Choice choose(const ConcolicView& view, std::mt19937_64&) override {
    const auto& tree = view.tree;
    for (int m = tree.size() - 1; m >= 0; m = tree.parent[static_cast<size_t>(m)]) {
      int bound = tree.origin[static_cast<size_t>(m)];
      for (int i = tree.paths[static_cast<size_t>(m)].size(); i > bound; --i) {
        if (tree.negatable(m, i)) return Choice::candidate(m, i);
      }
    }
    return Choice::complete();
  }
};

class RandomBranch : public concolic::ConcolicHeuristic {
 public:
  std::string name() const override { return "random"; }

  Choice choose(const ConcolicView& view, std::mt19937_64& rng) override {
    const auto& tree = view.tree;
    int m = tree.size() - 1;
    std::vector<int> cands;
    for (int i = 1; i <= tree.last().size(); ++i) {
      if (tree.negatable(m, i)) cands.push_back(i);
    }
    if (cands.empty()) return Choice::exhausted();
    std::uniform_int_distribution<size_t> pick(0, cands.size() - 1);
    return Choice::candidate(m, cands[pick(rng)]);
  }
};

class Cfds : public concolic::ConcolicHeuristic {
 public:
  std::string name() const override { return "cfds"; }

  Choice choose(const ConcolicView& view, std::mt19937_64&) override {
    const auto& tree = view.tree;
    std::vector<lang::BranchId> uncovered;
    for (int b = 0; b < view.program.branch_count(); ++b) {
      if (!tree.covered[static_cast<size_t>(b)]) uncovered.push_back(b);
    }
    if (uncovered.empty()) return Choice::exhausted();
    auto dist = lang::distances_to(view.cfg, uncovered);
    int m = tree.size() - 1;
    int best = 0, best_d = 0;
    for (int i = 1; i <= tree.last().size(); ++i) {
      if (!tree.negatable(m, i)) continue;
      const auto& d = dist[static_cast<size_t>(lang::opposite(*tree.last().at(i).site))];
      if (!d) continue;
      if (best == 0 || *d < best_d) {
        best = i;
        best_d = *d;
      }
    }
    return best ? Choice::candidate(m, best) : Choice::exhausted();
  }
};

// Breadth-first over path depth, skipping branches whose context of the
// last k sites was already chosen.
class Cgs : public concolic::ConcolicHeuristic {
 public:
  explicit Cgs(int k) : k_(k) {
    if (k < 1 || k > 5) throw std::invalid_argument("cgs context length must be between 1 and 5");
  }
  std::string name() const override { return "cgs:" + std::to_string(k_); }

  Choice choose(const ConcolicView& view, std::mt19937_64&) override {
    Choice c = scan(view.tree, true);
    if (c.status == Choice::Status::Candidate) return c;
    // Every open branch repeats a recorded context: start a fresh round.
    c = scan(view.tree, false);
    if (c.status == Choice::Status::Candidate) {
      seen_.clear();
      seen_.insert(concolic::context_of(view.tree.paths[static_cast<size_t>(c.path)], c.index, k_));
    }
    return c;
  }

 private:
  Choice scan(const concolic::ExecutionTree& tree, bool use_contexts) {
    int longest = 0;
    for (const auto& p : tree.paths) longest = std::max(longest, p.size());
    for (int d = 1; d <= longest; ++d) {
      for (int m = 0; m < tree.size(); ++m) {
        if (!tree.negatable(m, d)) continue;
        if (!use_contexts) return Choice::candidate(m, d);
        auto ctx = concolic::context_of(tree.paths[static_cast<size_t>(m)], d, k_);
        if (seen_.insert(ctx).second) return Choice::candidate(m, d);
      }
    }
    return Choice::exhausted();
  }

  int k_;
  std::set<std::vector<int>> seen_;
};

// Generational search: every new path contributes its branches past the
// negated one; the branch whose site last yielded the largest coverage gain
// goes first (unseen sites rank highest).
class Gen : public concolic::ConcolicHeuristic {
 public:
  std::string name() const override { return "gen"; }

  Choice choose(const ConcolicView& view, std::mt19937_64&) override {
    const auto& tree = view.tree;
    if (gain_.empty()) {
      gain_.assign(static_cast<size_t>(view.program.branch_count()),
                   std::numeric_limits<double>::infinity());
    }
    for (; absorbed_ < tree.size(); ++absorbed_) {
      const auto& path = tree.paths[static_cast<size_t>(absorbed_)];
      for (int i = tree.origin[static_cast<size_t>(absorbed_)] + 1; i <= path.size(); ++i) {
        if (tree.negatable(absorbed_, i)) work_.push_back({absorbed_, i});
      }
    }
    size_t best = work_.size();
    double top = 0;
    for (size_t w = 0; w < work_.size(); ++w) {
      auto [m, i] = work_[w];
      if (!tree.negatable(m, i)) continue;
      double g = gain_[static_cast<size_t>(*tree.paths[static_cast<size_t>(m)].at(i).site)];
      // Ties: newer path first, then lower index.
      if (best == work_.size() || g > top ||
          (g == top && (m > work_[best].first || (m == work_[best].first && i < work_[best].second)))) {
        best = w;
        top = g;
      }
    }
    if (best == work_.size()) {
      work_.clear();
      return Choice::exhausted();
    }
    auto [m, i] = work_[best];
    work_.erase(work_.begin() + static_cast<std::ptrdiff_t>(best));
    return Choice::candidate(m, i);
  }

  void on_outcome(const ConcolicView& view, const Choice& c, bool solved, int new_branches) override {
    if (!solved) return;
    lang::BranchId s = *view.tree.paths[static_cast<size_t>(c.path)].at(c.index).site;
    gain_[static_cast<size_t>(s)] = new_branches;
  }

 private:
  std::vector<double> gain_;
  std::vector<std::pair<int, int>> work_;
  int absorbed_ = 0;
};

}  // namespace

std::unique_ptr<concolic::ConcolicHeuristic> parametric_concolic(ParamVector theta) {
  return std::make_unique<Parametric>(std::move(theta));
}
std::unique_ptr<concolic::ConcolicHeuristic> dfs_concolic() { return std::make_unique<Dfs>(); }
std::unique_ptr<concolic::ConcolicHeuristic> random_branch() {
  return std::make_unique<RandomBranch>();
}
std::unique_ptr<concolic::ConcolicHeuristic> cfds() { return std::make_unique<Cfds>(); }
std::unique_ptr<concolic::ConcolicHeuristic> cgs(int k) { return std::make_unique<Cgs>(k); }
std::unique_ptr<concolic::ConcolicHeuristic> gen() { return std::make_unique<Gen>(); }

}  // namespace dse::heuristics
