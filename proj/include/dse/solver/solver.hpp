#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dse/sym/expr.hpp"

namespace dse::solver {

struct Sat {
  sym::Model model;
};
struct Unsat {};
struct Unknown {
  std::string reason;  // "timeout", "external-process-failure" or "unsupported-term"
};

using Verdict = std::variant<Sat, Unsat, Unknown>;

inline bool is_sat(const Verdict& v) { return std::holds_alternative<Sat>(v); }
inline bool is_unsat(const Verdict& v) { return std::holds_alternative<Unsat>(v); }
inline const sym::Model& model_of(const Verdict& v) { return std::get<Sat>(v).model; }
std::string to_string(const Verdict& v);

/// Signed range of a domain width: [-2^(bits-1), 2^(bits-1) - 1].
std::int64_t domain_min(int bits);
std::int64_t domain_max(int bits);

struct SolverStats {
  std::int64_t queries = 0;
  std::int64_t sat = 0;
  std::int64_t unsat = 0;
  std::int64_t unknown = 0;
  std::int64_t work = 0;  // deterministic effort units (search nodes)
};

class Solver {
 public:
  virtual ~Solver() = default;

  /// Decides the conjunction. `hint` seeds the value ordering; symbols it
  /// does not bind default to 0. A Sat model binds every symbol of the query.
  virtual Verdict check(const std::vector<sym::Expr>& conjuncts,
                        const sym::Model* hint = nullptr) = 0;

  const SolverStats& stats() const { return stats_; }
  int domain_bits() const { return domain_bits_; }

 protected:
  explicit Solver(int domain_bits) : domain_bits_(domain_bits) {}
  void record(const Verdict& v, std::int64_t work);

  int domain_bits_;
  SolverStats stats_;
};

struct BuiltinOptions {
  int domain_bits = 32;
  std::chrono::milliseconds timeout{1000};
  /// Deterministic effort cap per query; exceeding it yields Unknown.
  std::int64_t node_limit = 50000;
};

/// Backtracking search with interval propagation over the signed domain.
class BuiltinSolver : public Solver {
 public:
  explicit BuiltinSolver(BuiltinOptions opts = {});
  Verdict check(const std::vector<sym::Expr>& conjuncts, const sym::Model* hint = nullptr) override;

  /// Work spent by the most recent check.
  std::int64_t last_work() const { return last_work_; }

 private:
  BuiltinOptions opts_;
  std::int64_t last_work_ = 0;
};

/// SMT-LIB2 solver process (QF_BV) over stdin/stdout, one process per
/// instance, push/pop per query.
class SmtProcessSolver : public Solver {
 public:
  SmtProcessSolver(std::string command, int domain_bits = 32,
                   std::chrono::milliseconds timeout = std::chrono::milliseconds(1000));
  ~SmtProcessSolver() override;
  SmtProcessSolver(const SmtProcessSolver&) = delete;
  SmtProcessSolver& operator=(const SmtProcessSolver&) = delete;

  Verdict check(const std::vector<sym::Expr>& conjuncts, const sym::Model* hint = nullptr) override;
  bool alive() const { return pid_ > 0; }

 private:
  bool start();
  void stop();
  bool send(const std::string& text);
  // 1 = ok, 0 = timed out, -1 = process gone.
  int read_line(std::string& out);
  int read_sexpr(std::string& out);

  std::string command_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

enum class Backend : std::uint8_t { Builtin, External };

/// Creates a solver. For the external backend the command comes from
/// `command`, falling back to $DSE_SOLVER_CMD, then "z3 -in -smt2".
std::unique_ptr<Solver> make_solver(Backend backend, int domain_bits,
                                    const std::string& command = "");

/// One-shot convenience wrapper.
Verdict check_sat(const std::vector<sym::Expr>& conjuncts, Backend backend = Backend::Builtin,
                  int domain_bits = 32);

/// Every model of the conjunction over the signed domain, in lexicographic
/// order by symbol name and then value. Throws std::invalid_argument when
/// domain_bits is outside 1..12 or there are more than max_vars symbols.
std::vector<sym::Model> brute_force_models(const std::vector<sym::Expr>& conjuncts,
                                           int domain_bits, int max_vars = 4);

/// Parses a (get-model) response into symbol-name -> value.
std::vector<std::pair<std::string, std::int32_t>> parse_smt_model(const std::string& text);

/// Full SMT-LIB2 script for one query (used by the process bridge and for
/// debugging).
std::string smtlib_query(const std::vector<sym::Expr>& conjuncts, int domain_bits);

}  // namespace dse::solver
