#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "dse/features/features.hpp"
#include "dse/heuristics/heuristics.hpp"
#include "dse/lang/cfg.hpp"
#include "dse/lang/program.hpp"
#include "dse/solver/solver.hpp"

namespace dse::learn {

using heuristics::ParamVector;

struct Interval {
  double lo = -1;
  double hi = 1;
  bool operator==(const Interval&) const = default;
};
using SampleSpaces = std::vector<Interval>;

/// k copies of [-1, 1].
SampleSpaces initial_spaces(int k);

/// n vectors, each component uniform and independent in its interval.
std::vector<ParamVector> sample_params(const SampleSpaces& spaces, int n, std::mt19937_64& rng);

/// Narrows each interval towards the sign both vectors agree on.
SampleSpaces refine(const SampleSpaces& spaces, const ParamVector& t1, const ParamVector& t2);

/// How a single coverage measurement is taken.
struct EvalConfig {
  features::Mode mode = features::Mode::Concolic;
  /// Concolic: executions. EGT: selections (deterministic) unless
  /// egt_seconds is positive.
  int budget = 100;
  double egt_seconds = 0;
  solver::Backend backend = solver::Backend::Builtin;
  int domain_bits = 32;
  std::string solver_cmd;
};

/// Branch coverage of one run of Parametric(theta).
int evaluate(const lang::Program& p, const lang::Cfg& cfg, const ParamVector& theta,
             const EvalConfig& cfg_eval, std::uint64_t seed);

/// Coverage of a named baseline heuristic under the same budget.
int evaluate_named(const lang::Program& p, const lang::Cfg& cfg, const std::string& heuristic,
                   const EvalConfig& cfg_eval, std::uint64_t seed);

struct LearnConfig {
  int n = 30;
  int K = 4;
  int trials = 3;
  EvalConfig eval;
  std::uint64_t seed = 0;
  int parallelism = 1;
  int max_iterations = 20;
  /// Stop only when B*_t1 < max; by default a non-improving B*_t1 also stops.
  bool strict_convergence = false;

  /// Throws std::invalid_argument when a knob is out of range.
  void validate() const;
};

struct EvalRecord {
  int index = 0;  // sample index within its Find phase
  ParamVector theta;
  double coverage = 0;       // B (Find) or B* (Check)
  std::vector<int> trials;   // per-trial coverage, Check only
};

struct IterationLog {
  int iteration = 0;  // 1-based
  SampleSpaces spaces;  // spaces the samples were drawn from
  std::vector<EvalRecord> find;       // all n single-run results
  std::vector<EvalRecord> shortlist;  // top K with averaged coverage
  int top1 = 0, top2 = 0;             // positions in shortlist
  double best = 0;                    // B*_t1
  double max = 0;                     // running max after this iteration
  bool converged = false;
};

struct OptResult {
  ParamVector theta_max;
  double max = 0;
  std::vector<IterationLog> log;
  int converged_at = 0;  // iteration at which the loop stopped
  bool converged = false;  // false when the iteration cap was hit
};

/// seed_i = hash(master, iteration, phase, i).
std::uint64_t derive_seed(std::uint64_t master, int iteration, int phase, int i);

/// Runs fn(i) for i in [0, count) on up to `width` threads. The first
/// exception is rethrown after all workers stop.
void parallel_for(int count, int width, const std::function<void(int)>& fn);

OptResult optimize(const lang::Program& p, const LearnConfig& cfg,
                   const std::function<void(const IterationLog&)>& on_iteration = {});

nlohmann::json to_json(const IterationLog& it);
nlohmann::json to_json(const OptResult& r);

}  // namespace dse::learn
