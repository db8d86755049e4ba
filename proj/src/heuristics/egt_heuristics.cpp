#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>

#include "dse/heuristics/heuristics.hpp"

namespace dse::heuristics {

using egt::EgtView;
using egt::SymState;

double covnew_weight(int min_distance, std::int64_t since_new_cov) {
  return 1.0 / (1.0 + static_cast<double>(min_distance)) +
         1.0 / (1.0 + static_cast<double>(since_new_cov));
}

namespace {

// Pool position minimising key(state); ties go to the oldest state.
template <typename Key>
size_t min_by(const EgtView& view, Key key) {
  size_t best = 0;
  for (size_t i = 1; i < view.pool.size(); ++i) {
    auto a = key(view.pool[i]);
    auto b = key(view.pool[best]);
    if (a < b || (a == b && view.pool[i].stats.creation_order <
                                view.pool[best].stats.creation_order)) {
      best = i;
    }
  }
  return best;
}

class ParametricEgt : public egt::EgtHeuristic {
 public:
  explicit ParametricEgt(ParamVector theta) : theta_(std::move(theta)) {
    if (theta_.size() != static_cast<size_t>(features::kStateFeatures)) {
      throw std::invalid_argument("egt theta must have " +
                                  std::to_string(features::kStateFeatures) + " weights");
    }
  }
  std::string name() const override { return "parametric"; }

  size_t choose(const EgtView& view, std::mt19937_64&) override {
    features::StateFeatureContext ctx(view);
    std::vector<double> scores;
    double top = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < view.pool.size(); ++i) {
      scores.push_back(score(theta_, ctx.extract(i)));
      top = std::max(top, scores.back());
    }
    double tol = tie_tolerance(theta_);
    std::optional<size_t> best;
    for (size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] < top - tol) continue;
      if (!best || view.pool[i].stats.creation_order < view.pool[*best].stats.creation_order) best = i;
    }
    return best.value_or(0);
  }

 private:
  ParamVector theta_;
};

template <typename Key>
class MinStat : public egt::EgtHeuristic {
 public:
  MinStat(std::string name, Key key) : name_(std::move(name)), key_(key) {}
  std::string name() const override { return name_; }
  size_t choose(const EgtView& view, std::mt19937_64&) override { return min_by(view, key_); }

 private:
  std::string name_;
  Key key_;
};

template <typename Key>
std::unique_ptr<egt::EgtHeuristic> min_stat(std::string name, Key key) {
  return std::make_unique<MinStat<Key>>(std::move(name), key);
}

class RandomState : public egt::EgtHeuristic {
 public:
  std::string name() const override { return "random-state"; }
  size_t choose(const EgtView& view, std::mt19937_64& rng) override {
    return std::uniform_int_distribution<size_t>(0, view.pool.size() - 1)(rng);
  }
};

class RandomPath : public egt::EgtHeuristic {
 public:
  std::string name() const override { return "random-path"; }
  size_t choose(const EgtView& view, std::mt19937_64& rng) override {
    int node = view.tree.root();
    while (!view.tree.node(node).kids.empty()) {
      const auto& kids = view.tree.node(node).kids;
      node = kids[std::uniform_int_distribution<size_t>(0, kids.size() - 1)(rng)];
    }
    int pos = view.position_of(view.tree.node(node).state);
    if (pos < 0) throw std::logic_error("fork tree leaf without a pool state");
    return static_cast<size_t>(pos);
  }
};

class CovNew : public egt::EgtHeuristic {
 public:
  std::string name() const override { return "covnew"; }
  size_t choose(const EgtView& view, std::mt19937_64& rng) override {
    std::vector<double> w;
    w.reserve(view.pool.size());
    for (const SymState& s : view.pool) w.push_back(covnew_weight(view.distance(s), s.stats.since_new_cov));
    std::discrete_distribution<size_t> pick(w.begin(), w.end());
    return pick(rng);
  }
};

class RoundRobin : public egt::EgtHeuristic {
 public:
  explicit RoundRobin(std::vector<std::unique_ptr<egt::EgtHeuristic>> parts)
      : parts_(std::move(parts)) {
    if (parts_.empty()) throw std::invalid_argument("round-robin needs at least one heuristic");
  }
  std::string name() const override {
    std::string n = "round-robin:";
    for (size_t i = 0; i < parts_.size(); ++i) n += (i ? "," : "") + parts_[i]->name();
    return n;
  }
  size_t choose(const EgtView& view, std::mt19937_64& rng) override {
    size_t pos = parts_[next_]->choose(view, rng);
    next_ = (next_ + 1) % parts_.size();
    return pos;
  }

 private:
  std::vector<std::unique_ptr<egt::EgtHeuristic>> parts_;
  size_t next_ = 0;
};

}  // namespace

std::unique_ptr<egt::EgtHeuristic> parametric_egt(ParamVector theta) {
  return std::make_unique<ParametricEgt>(std::move(theta));
}
std::unique_ptr<egt::EgtHeuristic> dfs_egt() {
  return min_stat("dfs", [](const SymState& s) { return -s.stats.creation_order; });
}
std::unique_ptr<egt::EgtHeuristic> bfs_egt() {
  return min_stat("bfs", [](const SymState& s) { return s.stats.creation_order; });
}
std::unique_ptr<egt::EgtHeuristic> random_state() { return std::make_unique<RandomState>(); }
std::unique_ptr<egt::EgtHeuristic> random_path() { return std::make_unique<RandomPath>(); }
std::unique_ptr<egt::EgtHeuristic> covnew() { return std::make_unique<CovNew>(); }
std::unique_ptr<egt::EgtHeuristic> depth() {
  return min_stat("depth", [](const SymState& s) { return s.stats.depth; });
}
std::unique_ptr<egt::EgtHeuristic> query_cost() {
  return min_stat("query-cost", [](const SymState& s) { return s.stats.query_cost; });
}
std::unique_ptr<egt::EgtHeuristic> min_distance() {
  // The view is needed for the distance, so this one is spelled out.
  class MinDistance : public egt::EgtHeuristic {
   public:
    std::string name() const override { return "min-distance"; }
    size_t choose(const EgtView& view, std::mt19937_64&) override {
      return min_by(view, [&](const SymState& s) { return view.distance(s); });
    }
  };
  return std::make_unique<MinDistance>();
}
std::unique_ptr<egt::EgtHeuristic> instr_count() {
  return min_stat("instr-count", [](const SymState& s) { return s.stats.instrs; });
}
std::unique_ptr<egt::EgtHeuristic> callpath_instr_count() {
  return min_stat("callpath-instr-count", [](const SymState& s) { return s.stats.callpath_instrs; });
}
std::unique_ptr<egt::EgtHeuristic> round_robin(std::vector<std::unique_ptr<egt::EgtHeuristic>> parts) {
  return std::make_unique<RoundRobin>(std::move(parts));
}

}  // namespace dse::heuristics
