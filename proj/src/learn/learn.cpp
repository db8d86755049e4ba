#include "dse/learn/learn.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "dse/concolic/concolic.hpp"
#include "dse/egt/egt.hpp"

namespace dse::learn {

SampleSpaces initial_spaces(int k) { return SampleSpaces(static_cast<size_t>(k)); }

std::vector<ParamVector> sample_params(const SampleSpaces& spaces, int n, std::mt19937_64& rng) {
  std::vector<ParamVector> out;
  out.reserve(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s) {
    ParamVector theta;
    theta.reserve(spaces.size());
    for (const Interval& iv : spaces) {
      if (iv.lo == iv.hi) {
        theta.push_back(iv.lo);
        continue;
      }
      double x = std::uniform_real_distribution<double>(iv.lo, iv.hi)(rng);
      theta.push_back(std::min(x, iv.hi));
    }
    out.push_back(std::move(theta));
  }
  return out;
}

SampleSpaces refine(const SampleSpaces& spaces, const ParamVector& t1, const ParamVector& t2) {
  SampleSpaces out = spaces;
  for (size_t i = 0; i < out.size(); ++i) {
    if (t1[i] > 0 && t2[i] > 0) {
      out[i] = {std::min(t1[i], t2[i]), 1.0};
    } else if (t1[i] < 0 && t2[i] < 0) {
      out[i] = {-1.0, std::max(t1[i], t2[i])};
    }
  }
  return out;
}

namespace {

int run_with(const lang::Program& p, const lang::Cfg& cfg, concolic::ConcolicHeuristic* ch,
             egt::EgtHeuristic* eh, const EvalConfig& ec, std::uint64_t seed) {
  auto solver = solver::make_solver(ec.backend, ec.domain_bits, ec.solver_cmd);
  if (ch) {
    concolic::ConcolicOptions o;
    o.budget = ec.budget;
    o.seed = seed;
    return static_cast<int>(concolic::run_concolic(p, cfg, *ch, *solver, o).covered.size());
  }
  egt::EgtOptions o;
  o.seed = seed;
  if (ec.egt_seconds > 0) {
    o.budget_seconds = ec.egt_seconds;
  } else {
    o.max_iterations = ec.budget;
  }
  return static_cast<int>(egt::run_egt(p, cfg, *eh, *solver, o).covered.size());
}

}  // namespace

int evaluate(const lang::Program& p, const lang::Cfg& cfg, const ParamVector& theta,
             const EvalConfig& ec, std::uint64_t seed) {
  if (ec.mode == features::Mode::Concolic) {
    auto h = heuristics::parametric_concolic(theta);
    return run_with(p, cfg, h.get(), nullptr, ec, seed);
  }
  auto h = heuristics::parametric_egt(theta);
  return run_with(p, cfg, nullptr, h.get(), ec, seed);
}

int evaluate_named(const lang::Program& p, const lang::Cfg& cfg, const std::string& name,
                   const EvalConfig& ec, std::uint64_t seed) {
  if (ec.mode == features::Mode::Concolic) {
    auto h = heuristics::make_concolic(name);
    return run_with(p, cfg, h.get(), nullptr, ec, seed);
  }
  auto h = heuristics::make_egt(name);
  return run_with(p, cfg, nullptr, h.get(), ec, seed);
}

void LearnConfig::validate() const {
  if (K < 2) throw std::invalid_argument("K must be at least 2");
  if (n < K) throw std::invalid_argument("n must be at least K");
  if (trials < 1) throw std::invalid_argument("check trials must be at least 1");
  if (max_iterations < 1) throw std::invalid_argument("max iterations must be at least 1");
  if (parallelism < 1) throw std::invalid_argument("parallelism must be at least 1");
  if (eval.budget < 1) throw std::invalid_argument("budget must be at least 1");
}

std::uint64_t derive_seed(std::uint64_t master, int iteration, int phase, int i) {
  // splitmix64 finaliser folded over the four components.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(master);
  for (std::uint64_t part : {static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(phase),
                             static_cast<std::uint64_t>(i)}) {
    h = mix(h ^ mix(part));
  }
  return h;
}

void parallel_for(int count, int width, const std::function<void(int)>& fn) {
  width = std::max(1, std::min(width, count));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (width == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < width; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

enum Phase { kSample = 0, kFind = 1, kCheck = 2 };

// Positions ordered by descending coverage, ties to the lower sample index.
std::vector<size_t> rank(const std::vector<EvalRecord>& recs) {
  std::vector<size_t> order(recs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (recs[a].coverage != recs[b].coverage) return recs[a].coverage > recs[b].coverage;
    return recs[a].index < recs[b].index;
  });
  return order;
}

}  // namespace

OptResult optimize(const lang::Program& p, const LearnConfig& cfg,
                   const std::function<void(const IterationLog&)>& on_iteration) {
  cfg.validate();
  lang::Cfg graph = lang::build_cfg(p);
  const int k = features::feature_count(cfg.eval.mode);
  OptResult result;
  SampleSpaces spaces = initial_spaces(k);
  bool have_max = false;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    IterationLog log;
    log.iteration = it;
    log.spaces = spaces;

    // Find.
    std::mt19937_64 rng(derive_seed(cfg.seed, it, kSample, 0));
    std::vector<ParamVector> samples = sample_params(spaces, cfg.n, rng);
    log.find.resize(samples.size());
    parallel_for(cfg.n, cfg.parallelism, [&](int i) {
      EvalRecord& r = log.find[static_cast<size_t>(i)];
      r.index = i;
      r.theta = samples[static_cast<size_t>(i)];
      r.coverage = evaluate(p, graph, r.theta, cfg.eval, derive_seed(cfg.seed, it, kFind, i));
    });

    // Check.
    std::vector<size_t> order = rank(log.find);
    for (int j = 0; j < cfg.K; ++j) log.shortlist.push_back(log.find[order[static_cast<size_t>(j)]]);
    for (auto& r : log.shortlist) r.trials.assign(static_cast<size_t>(cfg.trials), 0);
    parallel_for(cfg.K * cfg.trials, cfg.parallelism, [&](int job) {
      EvalRecord& r = log.shortlist[static_cast<size_t>(job / cfg.trials)];
      int t = job % cfg.trials;
      r.trials[static_cast<size_t>(t)] =
          evaluate(p, graph, r.theta, cfg.eval, derive_seed(cfg.seed, it, kCheck, r.index * cfg.trials + t));
    });
    for (auto& r : log.shortlist) {
      r.coverage = std::accumulate(r.trials.begin(), r.trials.end(), 0.0) / cfg.trials;
    }
    std::vector<size_t> top = rank(log.shortlist);
    log.top1 = static_cast<int>(top[0]);
    log.top2 = static_cast<int>(top[1]);
    const EvalRecord& t1 = log.shortlist[top[0]];
    const EvalRecord& t2 = log.shortlist[top[1]];
    log.best = t1.coverage;

    bool stop = have_max && (cfg.strict_convergence ? t1.coverage < result.max
                                                    : t1.coverage <= result.max);
    if (!stop) {
      result.max = t1.coverage;
      result.theta_max = t1.theta;
      have_max = true;
    }
    log.max = result.max;
    log.converged = stop;
    result.converged_at = it;
    if (on_iteration) on_iteration(log);
    result.log.push_back(std::move(log));
    if (stop) {
      result.converged = true;
      break;
    }
    // Refine.
    spaces = refine(spaces, t1.theta, t2.theta);
  }
  return result;
}

namespace {

nlohmann::json spaces_json(const SampleSpaces& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& iv : s) out.push_back({iv.lo, iv.hi});
  return out;
}

nlohmann::json record_json(const EvalRecord& r) {
  nlohmann::json j = {{"index", r.index}, {"theta", r.theta}, {"coverage", r.coverage}};
  if (!r.trials.empty()) j["trials"] = r.trials;
  return j;
}

}  // namespace

nlohmann::json to_json(const IterationLog& it) {
  nlohmann::json find = nlohmann::json::array();
  for (const auto& r : it.find) find.push_back(r.coverage);
  nlohmann::json shortlist = nlohmann::json::array();
  for (const auto& r : it.shortlist) shortlist.push_back(record_json(r));
  return {{"iteration", it.iteration},
          {"spaces", spaces_json(it.spaces)},
          {"find_coverage", find},
          {"shortlist", shortlist},
          {"top2", {it.shortlist[static_cast<size_t>(it.top1)].index,
                    it.shortlist[static_cast<size_t>(it.top2)].index}},
          {"best", it.best},
          {"max", it.max},
          {"converged", it.converged}};
}

nlohmann::json to_json(const OptResult& r) {
  return {{"theta", r.theta_max},
          {"max", r.max},
          {"iterations", r.log.size()},
          {"converged_at", r.converged_at},
          {"converged", r.converged}};
}

}  // namespace dse::learn
