#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dse/features/features.hpp"
#include "dse/heuristics/heuristics.hpp"
#include "dse/learn/learn.hpp"
#include "dse/solver/solver.hpp"

namespace dse::cli {

/// Bad flags, bad config, missing files, unparsable programs. Exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInternal = 2;

features::Mode parse_mode(const std::string& s);
const char* to_string(features::Mode m);
solver::Backend parse_backend(const std::string& s);
const char* to_string(solver::Backend b);

struct RunSpec {
  std::string program;
  features::Mode mode = features::Mode::Concolic;
  std::string heuristic = "random";
  /// Concolic: executions per trial. EGT: selections per trial unless
  /// egt_seconds is positive.
  int budget = 100;
  double egt_seconds = 0;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string output;  // empty: stdout
  std::string csv;     // optional curve export
  solver::Backend backend = solver::Backend::Builtin;
  int domain_bits = 32;
  int jobs = 1;  // trial-level parallelism

  /// Throws UsageError.
  void validate(bool need_program = true) const;
};

/// Overwrites the fields present in `j`. Unknown keys are rejected.
void apply_json(RunSpec& spec, const nlohmann::json& j);
void apply_json(learn::LearnConfig& cfg, const nlohmann::json& j);
nlohmann::json load_json_file(const std::string& path);

/// Seed of trial t of a multi-trial command.
std::uint64_t trial_seed(std::uint64_t master, int trial);

/// One trial's outcome in a uniform shape for both modes.
struct TrialResult {
  nlohmann::json report;                        // RunReport or EgtReport JSON
  std::vector<lang::BranchId> covered;
  std::vector<std::pair<double, int>> curve;    // (execution-or-time, coverage)
  bool bug = false;
};

TrialResult run_trial(const lang::Program& p, const lang::Cfg& cfg, const RunSpec& spec,
                      const std::string& heuristic, std::uint64_t seed);

/// `trials` runs with derived seeds, in trial order.
std::vector<TrialResult> run_trials(const lang::Program& p, const RunSpec& spec,
                                    const std::string& heuristic);

/// JSON array of per-trial reports.
nlohmann::json cmd_run(const RunSpec& spec);

struct HeuristicSummary {
  std::string name;
  std::vector<int> coverage;  // per trial
  std::vector<std::vector<std::pair<double, int>>> curves;
  int bug_trials = 0;
  double mean = 0;
  int max = 0;
  double std = 0;  // population standard deviation
  std::vector<lang::BranchId> union_covered;
  std::vector<lang::BranchId> exclusive;
};

struct ProgramComparison {
  std::string program;
  int branches = 0;
  std::vector<HeuristicSummary> heuristics;
  std::vector<std::string> ranking;  // by mean, descending; ties keep input order
};

struct CompareReport {
  std::vector<ProgramComparison> programs;
};

/// mean, max and population std of the values.
void summarize(HeuristicSummary& h);
/// Branches covered by exactly one heuristic's union.
void fill_exclusive(std::vector<HeuristicSummary>& hs);

CompareReport cmd_compare(const std::vector<std::string>& programs,
                          const std::vector<std::string>& heuristics, const RunSpec& spec);
nlohmann::json to_json(const CompareReport& r, const RunSpec& spec);

struct RankedFeature {
  int index = 0;  // 1-based
  double weight = 0;
  std::string description;
};

struct FeatureReport {
  features::Mode mode = features::Mode::Concolic;
  std::vector<RankedFeature> positive;  // descending weight
  std::vector<RankedFeature> negative;  // ascending weight
};

/// Mode is inferred from the length of theta; zero weights are never listed.
FeatureReport cmd_report_features(const heuristics::ParamVector& theta, int top_k);
nlohmann::json to_json(const FeatureReport& r);
std::string format(const FeatureReport& r);

/// Writes theta to `theta_path` and one JSON line per iteration to
/// `log_path` (either may be empty).
learn::OptResult cmd_learn(const std::string& program, const learn::LearnConfig& cfg,
                           const std::string& theta_path, const std::string& log_path);

/// Curve export: header then one "trial,x,coverage" row per point.
std::string curves_csv(const std::vector<std::vector<std::pair<double, int>>>& curves,
                       const std::string& x_name);

/// Whole command line. Output goes to `out`, diagnostics to `err`.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dse::cli
