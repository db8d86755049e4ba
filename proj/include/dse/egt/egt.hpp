#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "dse/concolic/concolic.hpp"
#include "dse/lang/cfg.hpp"
#include "dse/lang/program.hpp"
#include "dse/solver/solver.hpp"
#include "dse/sym/memory.hpp"
#include "dse/sym/path.hpp"

namespace dse::egt {

using concolic::InputVector;

struct StateStats {
  int depth = 0;                      // == phi.size()
  std::int64_t instrs = 0;            // instructions executed
  std::int64_t since_new_cov = 0;     // instructions since this state last covered a new one
  std::int64_t query_cost = 0;        // solver work spent on this state's queries
  std::int64_t creation_order = 0;
  std::int64_t callpath_instrs = 0;   // instructions executed in the active frames
};

struct Frame {
  int function = 0;
  int block = 0;
  int instr = 0;  // index into the block body; body.size() means the terminator
  std::optional<lang::Slot> dest;
  int cont = -1;
  std::vector<std::vector<sym::Expr>> saved_locals;  // caller's locals
  std::int64_t instrs = 0;
};

/// A symbolic execution state (instr, S, Φ).
struct SymState {
  sym::SymbolicMemory mem;
  std::vector<Frame> frames;
  sym::PathCondition phi;
  StateStats stats;
  sym::Model model;  // a model of phi binding every program symbol
  int tree_node = -1;

  const Frame& pc() const { return frames.back(); }
  int block() const { return frames.back().block; }
  int function() const { return frames.back().function; }
  /// Site of the last sited condition in phi.
  std::optional<lang::BranchId> last_site() const;
};

struct TestCase {
  InputVector input;
  double created_at = 0;  // seconds, or iterations in deterministic mode
  enum class Origin : std::uint8_t { Halt, Error, Fault, Flush } origin = Origin::Halt;
  std::optional<concolic::BugEvent> bug;
  std::vector<sym::Expr> phi;  // source path condition
};
const char* to_string(TestCase::Origin o);

/// Fork tree over states: internal nodes are fork points, live leaves hold
/// one state each. Leaves of finished states are pruned.
class ForkTree {
 public:
  struct Node {
    int parent = -1;
    std::vector<int> kids;
    std::int64_t state = -1;  // creation order of the leaf's state, -1 if internal
  };

  int add_root(std::int64_t state);
  /// Turns leaf `node` into a fork point with one leaf per child state.
  std::vector<int> fork(int node, const std::vector<std::int64_t>& states);
  /// Re-labels a leaf after its state advanced without forking.
  void relabel(int node, std::int64_t state) { nodes_[static_cast<size_t>(node)].state = state; }
  void remove(int node);
  int root() const { return root_; }
  const Node& node(int i) const { return nodes_[static_cast<size_t>(i)]; }
  int live_leaves(int node) const;

 private:
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Run-wide data that heuristics and features read.
struct EgtView {
  const lang::Program& program;
  const lang::Cfg& cfg;
  const std::vector<SymState>& pool;
  const ForkTree& tree;
  const std::vector<char>& covered_instrs;
  const std::vector<char>& covered_branches;
  const std::vector<int>& covered_in_function;  // covered instructions per function
  const std::vector<std::int64_t>& traversals;  // per branch site
  const std::vector<std::int64_t>& last_traversal;  // iteration, -1 if never
  std::int64_t iteration;
  std::optional<lang::BranchId> last_selected_site;
  int last_function;  // function of the most recently executed instruction
  /// Block hops from each block to the nearest block holding an uncovered
  /// instruction (INT_MAX when none is reachable).
  const std::vector<int>& min_distance;

  int distance(const SymState& s) const { return min_distance[static_cast<size_t>(s.block())]; }
  /// Pool position of the state with the given creation order, or -1.
  int position_of(std::int64_t creation_order) const;
};

class EgtHeuristic {
 public:
  virtual ~EgtHeuristic() = default;
  virtual std::string name() const = 0;
  /// Pool position of the state to run next. The pool is non-empty.
  virtual size_t choose(const EgtView& view, std::mt19937_64& rng) = 0;
};

struct StepOutcome {
  enum class Kind : std::uint8_t { Continue, Forked, OneArm, Halted, Errored, Dropped };
  Kind kind = Kind::Continue;
  std::vector<SymState> next;   // 1 for Continue/OneArm, 2 for Forked (true arm first)
  std::vector<TestCase> tests;  // Halted/Errored, plus any fault tests
  std::vector<lang::BranchId> sites;  // branch arms taken, one per entry of `next`
  bool solver_used = false;
  std::string diagnostic;       // Dropped
};

/// Mutable run-wide bookkeeping touched by step_state.
struct StepContext {
  std::vector<char>* covered_instrs = nullptr;
  std::vector<int>* covered_in_function = nullptr;
  std::int64_t* next_creation = nullptr;
  int* last_function = nullptr;
  bool* coverage_grew = nullptr;
};

/// Initial state: entry of main, inputs bound to fresh symbols, phi = true.
SymState initial_state(const lang::Program& p);

/// Executes one instruction of `s`.
StepOutcome step_state(const lang::Program& p, SymState s, solver::Solver& solver,
                       const StepContext& ctx = {});

struct ForkEvent {
  std::vector<sym::Expr> parent;
  std::vector<sym::Expr> true_child;
  std::vector<sym::Expr> false_child;
};

struct EgtOptions {
  /// Wall-clock budget in seconds; ignored when max_iterations is set.
  double budget_seconds = 10;
  /// Deterministic mode: budget counted in selections.
  std::optional<std::int64_t> max_iterations;
  std::uint64_t seed = 0;
  /// Instructions a selected state may run before it is returned to the pool.
  int batch_instrs = 10000;
  std::function<void(const ForkEvent&)> on_fork;
  std::function<void(const TestCase&)> on_test;
};

struct CurvePoint {
  double time = 0;
  int coverage = 0;
};

struct EgtReport {
  std::vector<TestCase> tests;
  std::vector<lang::BranchId> covered;  // from replay
  std::vector<CurvePoint> curve;
  std::vector<concolic::BugRecord> bugs;
  std::int64_t iterations = 0;
  int dropped = 0;
  bool deterministic = false;
  std::uint64_t seed = 0;
  solver::SolverStats solver;
};

EgtReport run_egt(const lang::Program& p, const lang::Cfg& cfg, EgtHeuristic& h,
                  solver::Solver& solver, const EgtOptions& opts);

struct Replay {
  std::vector<CurvePoint> curve;
  std::vector<lang::BranchId> covered;  // sorted
};

/// Re-executes the tests in order and accumulates branch coverage.
Replay replay_coverage(const lang::Program& p, const std::vector<TestCase>& tests);

nlohmann::json to_json(const lang::Program& p, const EgtReport& r);

}  // namespace dse::egt
