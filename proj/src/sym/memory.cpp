#include "dse/sym/memory.hpp"

#include <algorithm>

namespace dse::sym {

std::vector<std::vector<Expr>> SymbolicMemory::zeros(const std::vector<lang::VarInfo>& vars) {
  std::vector<std::vector<Expr>> out;
  out.reserve(vars.size());
  Expr zero = constant(0);
  for (const auto& v : vars) out.emplace_back(static_cast<size_t>(std::max(v.length, 1)), zero);
  return out;
}

Expr eval_symbolic(const SymbolicMemory& mem, const lang::Expr& e, const EvalHooks& hooks) {
  using K = lang::Expr::Kind;
  switch (e.kind) {
    case K::IntLit:
      return constant(e.value);
    case K::Var:
      return mem.var(e.slot)[0];
    case K::Index: {
      const auto& cells = mem.var(e.slot);
      Expr idx = eval_symbolic(mem, *e.args[0], hooks);
      if (idx->is_const() && idx->value >= 0 &&
          static_cast<size_t>(idx->value) < cells.size()) {
        return cells[static_cast<size_t>(idx->value)];
      }
      if (hooks.read_element) return hooks.read_element(cells, idx);
      if (idx->is_const()) throw EvalError("index " + std::to_string(idx->value) + " out of bounds");
      throw EvalError("symbolic array index");
    }
    case K::Unary: {
      Expr x = eval_symbolic(mem, *e.args[0], hooks);
      return e.unop == lang::UnOp::Neg ? neg(std::move(x)) : lnot(std::move(x));
    }
    case K::Binary: {
      Expr x = eval_symbolic(mem, *e.args[0], hooks);
      Expr y = eval_symbolic(mem, *e.args[1], hooks);
      switch (e.binop) {
        case lang::BinOp::Add: return add(x, y);
        case lang::BinOp::Sub: return sub(x, y);
        case lang::BinOp::Mul: return mul(x, y);
        case lang::BinOp::Div:
        case lang::BinOp::Mod:
          if (hooks.on_divisor && !(y->is_const() && to_int(y)->value != 0)) hooks.on_divisor(y);
          return e.binop == lang::BinOp::Div ? div(x, y) : mod(x, y);
        case lang::BinOp::Lt: return lt(x, y);
        case lang::BinOp::Le: return le(x, y);
        case lang::BinOp::Gt: return gt(x, y);
        case lang::BinOp::Ge: return ge(x, y);
        case lang::BinOp::Eq: return eq(x, y);
        case lang::BinOp::Ne: return ne(x, y);
        case lang::BinOp::And: return land(x, y);
        case lang::BinOp::Or: return lor(x, y);
      }
      break;
    }
    case K::Call:
      break;
  }
  throw EvalError("call in expression position");
}

Expr select(const std::vector<Expr>& cells, const Expr& index) {
  Expr out = cells.back();
  for (size_t j = cells.size() - 1; j-- > 0;) {
    out = ite(eq(index, constant(static_cast<std::int32_t>(j))), cells[j], out);
  }
  return out;
}

void store(std::vector<Expr>& cells, const Expr& index, const Expr& value) {
  for (size_t j = 0; j < cells.size(); ++j) {
    cells[j] = ite(eq(index, constant(static_cast<std::int32_t>(j))), value, cells[j]);
  }
}

Expr in_bounds(const Expr& index, int length) {
  return land(ge(index, constant(0)), lt(index, constant(length)));
}

}  // namespace dse::sym
