#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "dse/lang/program.hpp"
#include "dse/sym/expr.hpp"

namespace dse::sym {

/// The map S from program variables to symbolic values. Every variable is a
/// vector of cells (one for scalars). Locals belong to the current frame.
struct SymbolicMemory {
  std::vector<std::vector<Expr>> globals;
  std::vector<std::vector<Expr>> locals;

  std::vector<Expr>& var(lang::Slot s) {
    return s.scope == lang::Slot::Scope::Global ? globals[static_cast<size_t>(s.index)]
                                                : locals[static_cast<size_t>(s.index)];
  }
  const std::vector<Expr>& var(lang::Slot s) const {
    return s.scope == lang::Slot::Scope::Global ? globals[static_cast<size_t>(s.index)]
                                                : locals[static_cast<size_t>(s.index)];
  }

  /// Zero-initialized storage shaped after the given variables.
  static std::vector<std::vector<Expr>> zeros(const std::vector<lang::VarInfo>& vars);
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Engine-specific treatment of the two operations whose symbolic meaning
/// depends on the execution mode.
struct EvalHooks {
  /// Array read whose index did not fold to an in-range constant.
  std::function<Expr(const std::vector<Expr>& cells, const Expr& index)> read_element;
  /// Called for every divisor that did not fold to a nonzero constant.
  std::function<void(const Expr& divisor)> on_divisor;
};

/// Substitutes bindings from `mem` into a program expression, folding
/// constant subtrees. Without hooks, symbolic or out-of-range indices throw
/// EvalError. Calls are not expressions and are rejected.
Expr eval_symbolic(const SymbolicMemory& mem, const lang::Expr& e,
                   const EvalHooks& hooks = {});

/// cells[index] as an ite chain over the in-range indices. Callers constrain
/// the index to [0, cells.size()) separately.
Expr select(const std::vector<Expr>& cells, const Expr& index);

/// Writes `value` at a symbolic index: every cell j becomes
/// ite(index == j, value, cells[j]).
void store(std::vector<Expr>& cells, const Expr& index, const Expr& value);

/// 0 <= index < length.
Expr in_bounds(const Expr& index, int length);

}  // namespace dse::sym
