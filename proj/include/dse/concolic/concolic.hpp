#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dse/lang/cfg.hpp"
#include "dse/lang/program.hpp"
#include "dse/solver/solver.hpp"
#include "dse/sym/path.hpp"

namespace dse::concolic {

/// Concrete input values indexed by flat symbol id (see Program::symbol_name).
using InputVector = std::vector<std::int32_t>;

sym::Model to_model(const InputVector& v);
nlohmann::json input_to_json(const lang::Program& p, const InputVector& v);

enum class BugKind : std::uint8_t { Error, AssertFail, DivByZero, OutOfBounds };
const char* to_string(BugKind k);

struct BugEvent {
  BugKind kind = BugKind::Error;
  int sink = -1;  // Error / AssertFail
  lang::SourceLoc loc;

  /// Identity used for deduplication: sink id, or fault kind plus location.
  std::string key() const;
};

struct RunOptions {
  int step_limit = 100000;
  /// Skip the symbolic shadow (path conditions are left empty).
  bool concrete_only = false;
};

/// Result of one instrumented execution.
struct Trace {
  sym::PathCondition path;
  std::vector<lang::BranchId> covered;  // distinct, in first-taken order
  std::vector<int> functions;           // distinct functions entered, in order
  std::optional<BugEvent> bug;
  bool step_limit_hit = false;
  int steps = 0;
};

/// Runs the program on `v`. Deterministic; faults end the run and are
/// reported in Trace::bug.
Trace run_concrete(const lang::Program& p, const InputVector& v, const RunOptions& opts = {});

struct SiteStats {
  int executions_covering = 0;  // executions whose path took this arm
  int occurrences = 0;          // total appearances across all paths
  int negations = 0;            // negation attempts of an occurrence of this arm
  int failures = 0;             // attempts that did not solve
  bool last_failed = false;
  int last_seen = -1;           // index of the latest execution taking this arm
};

/// Sites of the k sited conditions before position i (nearest first), led
/// by the site at i itself.
std::vector<int> context_of(const sym::PathCondition& path, int i, int k);

/// The explored path conditions T plus per-site bookkeeping.
struct ExecutionTree {
  std::vector<sym::PathCondition> paths;
  std::vector<InputVector> inputs;
  /// Path whose negation produced each path, and the negated index (1-based);
  /// -1 / 0 for the initial input and restarts.
  std::vector<int> parent;
  std::vector<int> origin;
  /// Negation attempts per path and position (0-based position).
  std::vector<std::vector<char>> attempted;
  std::vector<SiteStats> sites;
  std::vector<char> covered;
  int covered_count = 0;
  /// Contexts (k = 1..5) of every branch chosen for negation.
  std::vector<std::set<std::vector<int>>> contexts = std::vector<std::set<std::vector<int>>>(5);
  /// Most recent negation attempt, as (path, index).
  int last_choice_path = -1;
  int last_choice_index = 0;

  explicit ExecutionTree(int branch_count = 0);

  int size() const { return static_cast<int>(paths.size()); }
  const sym::PathCondition& last() const { return paths.back(); }

  /// Whether (m, i) can be proposed: a sited, non-constant condition that
  /// has not been attempted yet.
  bool negatable(int m, int i) const;

  /// Appends an execution; returns the number of newly covered arms.
  int add(const Trace& t, const InputVector& v, int parent, int origin);
  void record_attempt(int m, int i, bool solved);
};

struct Choice {
  enum class Status : std::uint8_t { Candidate, Exhausted, Complete };
  Status status = Status::Exhausted;
  int path = -1;
  int index = 0;  // 1-based

  static Choice candidate(int m, int i) { return {Status::Candidate, m, i}; }
  static Choice exhausted() { return {Status::Exhausted, -1, 0}; }
  /// Every feasible path has been enumerated.
  static Choice complete() { return {Status::Complete, -1, 0}; }
};

struct ConcolicView {
  const lang::Program& program;
  const lang::Cfg& cfg;
  const ExecutionTree& tree;
};

class ConcolicHeuristic {
 public:
  virtual ~ConcolicHeuristic() = default;
  virtual std::string name() const = 0;
  virtual Choice choose(const ConcolicView& view, std::mt19937_64& rng) = 0;
  /// Outcome of a proposed negation. new_branches is the coverage gain of the
  /// execution it produced (0 when unsolved).
  virtual void on_outcome(const ConcolicView&, const Choice&, bool /*solved*/,
                          int /*new_branches*/) {}
};

struct BugRecord {
  BugEvent event;
  InputVector input;
  int execution = 0;
};

struct RunReport {
  std::vector<lang::BranchId> covered;  // sorted
  std::vector<int> curve;               // cumulative coverage after each execution
  int executions = 0;
  std::vector<BugRecord> bugs;          // first trigger of each distinct bug
  std::uint64_t seed = 0;
  int restarts = 0;
  bool complete = false;                // stopped early: the tree was fully explored
  solver::SolverStats solver;
};

struct ConcolicOptions {
  int budget = 100;
  std::uint64_t seed = 0;
  std::optional<InputVector> v0;  // derived from the seed when absent
  RunOptions run;
  /// Observes each negation outcome: (tree, path, index, model input, trace).
  std::function<void(const ExecutionTree&, int, int, const InputVector&, const Trace&)> on_negation;
};

/// Input with every symbol drawn uniformly from [-128, 127].
InputVector random_input(const lang::Program& p, std::mt19937_64& rng);

/// Concolic testing loop. The solver is only consulted through `solver`.
RunReport run_concolic(const lang::Program& p, const lang::Cfg& cfg, ConcolicHeuristic& h,
                       solver::Solver& solver, const ConcolicOptions& opts,
                       ExecutionTree* tree_out = nullptr);

nlohmann::json to_json(const lang::Program& p, const RunReport& r);

}  // namespace dse::concolic
