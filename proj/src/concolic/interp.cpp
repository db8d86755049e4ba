#include <algorithm>

#include "dse/concolic/concolic.hpp"
#include "dse/sym/arith.hpp"
#include "dse/sym/memory.hpp"

namespace dse::concolic {

namespace {

using lang::Slot;
using Cells = std::vector<std::int32_t>;

struct Fault {
  BugKind kind;
  lang::SourceLoc loc;
};

struct ConcreteMemory {
  std::vector<Cells> globals;
  std::vector<Cells> locals;

  Cells& var(Slot s) {
    return s.scope == Slot::Scope::Global ? globals[static_cast<size_t>(s.index)]
                                          : locals[static_cast<size_t>(s.index)];
  }
  const Cells& var(Slot s) const {
    return s.scope == Slot::Scope::Global ? globals[static_cast<size_t>(s.index)]
                                          : locals[static_cast<size_t>(s.index)];
  }
};

std::vector<Cells> zero_cells(const std::vector<lang::VarInfo>& vars) {
  std::vector<Cells> out;
  out.reserve(vars.size());
  for (const auto& v : vars) out.emplace_back(static_cast<size_t>(std::max(v.length, 1)), 0);
  return out;
}

std::int32_t eval_concrete(const ConcreteMemory& m, const lang::Expr& e) {
  using K = lang::Expr::Kind;
  switch (e.kind) {
    case K::IntLit:
      return e.value;
    case K::Var:
      return m.var(e.slot)[0];
    case K::Index: {
      const Cells& cells = m.var(e.slot);
      std::int32_t i = eval_concrete(m, *e.args[0]);
      if (i < 0 || static_cast<size_t>(i) >= cells.size()) throw Fault{BugKind::OutOfBounds, e.loc};
      return cells[static_cast<size_t>(i)];
    }
    case K::Unary: {
      std::int32_t x = eval_concrete(m, *e.args[0]);
      return e.unop == lang::UnOp::Neg ? sym::arith::neg(x) : (x == 0 ? 1 : 0);
    }
    case K::Binary: {
      std::int32_t x = eval_concrete(m, *e.args[0]);
      std::int32_t y = eval_concrete(m, *e.args[1]);
      switch (e.binop) {
        case lang::BinOp::Add: return sym::arith::add(x, y);
        case lang::BinOp::Sub: return sym::arith::sub(x, y);
        case lang::BinOp::Mul: return sym::arith::mul(x, y);
        case lang::BinOp::Div:
          if (y == 0) throw Fault{BugKind::DivByZero, e.loc};
          return sym::arith::div(x, y);
        case lang::BinOp::Mod:
          if (y == 0) throw Fault{BugKind::DivByZero, e.loc};
          return sym::arith::rem(x, y);
        case lang::BinOp::Lt: return x < y;
        case lang::BinOp::Le: return x <= y;
        case lang::BinOp::Gt: return x > y;
        case lang::BinOp::Ge: return x >= y;
        case lang::BinOp::Eq: return x == y;
        case lang::BinOp::Ne: return x != y;
        case lang::BinOp::And: return (x != 0) && (y != 0);
        case lang::BinOp::Or: return (x != 0) || (y != 0);
      }
      break;
    }
    case K::Call:
      break;
  }
  throw std::logic_error("call in expression position");
}

struct Frame {
  int function = 0;
  int block = 0;
  std::optional<Slot> dest;  // caller's destination for the return value
  int cont = -1;             // caller's continuation block
  std::vector<Cells> saved_c;
  std::vector<std::vector<sym::Expr>> saved_s;
};

class Interpreter {
 public:
  Interpreter(const lang::Program& p, const InputVector& v, const RunOptions& opts)
      : p_(p), v_(v), opts_(opts), symbolic_(!opts.concrete_only) {
    seen_branch_.assign(static_cast<size_t>(p.branch_count()), 0);
    seen_fn_.assign(p.functions.size(), 0);
  }

  Trace run() {
    cm_.globals = zero_cells(p_.globals);
    if (symbolic_) sm_.globals = sym::SymbolicMemory::zeros(p_.globals);
    for (const auto& [slot, value] : p_.global_inits) {
      cm_.var(slot)[0] = value;
      if (symbolic_) sm_.var(slot)[0] = sym::constant(value);
    }
    for (size_t i = 0; i < p_.inputs.size(); ++i) {
      if (p_.inputs[i].slot.scope == Slot::Scope::Global) bind_input(static_cast<int>(i));
    }
    enter(p_.entry, std::nullopt, -1);
    try {
      execute();
    } catch (const Fault& f) {
      trace_.bug = BugEvent{f.kind, -1, f.loc};
    }
    return std::move(trace_);
  }

 private:
  void bind_input(int index) {
    const lang::InputDecl& in = p_.inputs[static_cast<size_t>(index)];
    Cells& c = cm_.var(in.slot);
    for (size_t j = 0; j < c.size(); ++j) {
      int symbol = in.first_symbol + static_cast<int>(j);
      c[j] = v_[static_cast<size_t>(symbol)];
      if (symbolic_) sm_.var(in.slot)[j] = sym::symbol(symbol, p_.symbol_name(symbol));
    }
  }

  void enter(int fn, std::optional<Slot> dest, int cont) {
    const lang::Function& f = p_.functions[static_cast<size_t>(fn)];
    Frame fr;
    fr.function = fn;
    fr.block = f.entry_block;
    fr.dest = dest;
    fr.cont = cont;
    fr.saved_c = std::move(cm_.locals);
    if (symbolic_) fr.saved_s = std::move(sm_.locals);
    frames_.push_back(std::move(fr));
    cm_.locals = zero_cells(f.locals);
    if (symbolic_) sm_.locals = sym::SymbolicMemory::zeros(f.locals);
    if (!seen_fn_[static_cast<size_t>(fn)]) {
      seen_fn_[static_cast<size_t>(fn)] = 1;
      trace_.functions.push_back(fn);
    }
  }

  sym::EvalHooks hooks() {
    sym::EvalHooks h;
    h.read_element = [this](const std::vector<sym::Expr>& cells, const sym::Expr& idx) {
      pin(sym::in_bounds(idx, static_cast<int>(cells.size())));
      return sym::select(cells, idx);
    };
    h.on_divisor = [this](const sym::Expr& d) { pin(sym::ne(d, sym::constant(0))); };
    return h;
  }

  void pin(sym::Expr c) {
    if (c->is_const()) return;
    trace_.path.push(std::move(c), std::nullopt);
  }

  sym::Expr seval(const lang::Expr& e) { return sym::eval_symbolic(sm_, e, hooks()); }

  bool tick() {
    if (++trace_.steps > opts_.step_limit) {
      trace_.step_limit_hit = true;
      return false;
    }
    return true;
  }

  void execute() {
    for (;;) {
      Frame& fr = frames_.back();
      const lang::Block& b = p_.blocks[static_cast<size_t>(fr.block)];
      for (const lang::Instr& in : b.body) {
        if (!tick()) return;
        step(in);
      }
      if (!tick()) return;
      if (!terminate(b.term)) return;
    }
  }

  void step(const lang::Instr& in) {
    switch (in.kind) {
      case lang::Instr::Kind::Input:
        bind_input(in.input);
        break;
      case lang::Instr::Kind::Assign: {
        std::int32_t c = eval_concrete(cm_, *in.value);
        sym::Expr s = symbolic_ ? seval(*in.value) : nullptr;
        Cells& cells = cm_.var(in.dest);
        // Array destinations are filled (only used for zero-initialization).
        std::fill(cells.begin(), cells.end(), c);
        if (symbolic_) {
          auto& sc = sm_.var(in.dest);
          std::fill(sc.begin(), sc.end(), sym::to_int(s));
        }
        break;
      }
      case lang::Instr::Kind::Store: {
        std::int32_t i = eval_concrete(cm_, *in.index);
        std::int32_t c = eval_concrete(cm_, *in.value);
        Cells& cells = cm_.var(in.dest);
        if (i < 0 || static_cast<size_t>(i) >= cells.size()) throw Fault{BugKind::OutOfBounds, in.loc};
        cells[static_cast<size_t>(i)] = c;
        if (symbolic_) {
          sym::Expr si = seval(*in.index);
          sym::Expr sv = sym::to_int(seval(*in.value));
          auto& sc = sm_.var(in.dest);
          if (si->is_const()) {
            sc[static_cast<size_t>(i)] = sv;
          } else {
            pin(sym::in_bounds(si, static_cast<int>(sc.size())));
            sym::store(sc, si, sv);
          }
        }
        break;
      }
    }
  }

  // Returns false when execution ends.
  bool terminate(const lang::Terminator& t) {
    Frame& fr = frames_.back();
    using K = lang::Terminator::Kind;
    switch (t.kind) {
      case K::Goto:
        fr.block = t.target;
        return true;
      case K::Branch: {
        std::int32_t c = eval_concrete(cm_, *t.expr);
        bool taken = c != 0;
        lang::BranchId site = taken ? lang::true_arm(t.conditional) : lang::false_arm(t.conditional);
        if (symbolic_) {
          sym::Expr e = sym::to_bool(seval(*t.expr));
          trace_.path.push(taken ? e : sym::lnot(e), site);
        }
        if (!seen_branch_[static_cast<size_t>(site)]) {
          seen_branch_[static_cast<size_t>(site)] = 1;
          trace_.covered.push_back(site);
        }
        fr.block = taken ? t.target : t.alt;
        return true;
      }
      case K::Call: {
        std::vector<std::int32_t> cargs;
        std::vector<sym::Expr> sargs;
        for (const auto& a : t.args) {
          cargs.push_back(eval_concrete(cm_, *a));
          if (symbolic_) sargs.push_back(sym::to_int(seval(*a)));
        }
        enter(t.callee, t.dest, t.target);
        const lang::Function& f = p_.functions[static_cast<size_t>(t.callee)];
        for (size_t i = 0; i < f.params.size(); ++i) {
          cm_.var(f.params[i])[0] = cargs[i];
          if (symbolic_) sm_.var(f.params[i])[0] = sargs[i];
        }
        return true;
      }
      case K::Return: {
        std::int32_t c = 0;
        sym::Expr s = symbolic_ ? sym::constant(0) : nullptr;
        if (t.expr) {
          c = eval_concrete(cm_, *t.expr);
          if (symbolic_) s = sym::to_int(seval(*t.expr));
        }
        if (frames_.size() == 1) return false;  // return from main halts
        Frame done = std::move(frames_.back());
        frames_.pop_back();
        cm_.locals = std::move(done.saved_c);
        if (symbolic_) sm_.locals = std::move(done.saved_s);
        if (done.dest) {
          cm_.var(*done.dest)[0] = c;
          if (symbolic_) sm_.var(*done.dest)[0] = s;
        }
        frames_.back().block = done.cont;
        return true;
      }
      case K::Halt:
        return false;
      case K::Error: {
        const lang::Sink& sink = p_.sinks[static_cast<size_t>(t.sink)];
        trace_.bug = BugEvent{sink.from_assert ? BugKind::AssertFail : BugKind::Error, sink.id,
                              sink.loc};
        return false;
      }
    }
    return false;
  }

  const lang::Program& p_;
  const InputVector& v_;
  const RunOptions& opts_;
  bool symbolic_;
  ConcreteMemory cm_;
  sym::SymbolicMemory sm_;
  std::vector<Frame> frames_;
  std::vector<char> seen_branch_;
  std::vector<char> seen_fn_;
  Trace trace_;
};

}  // namespace

const char* to_string(BugKind k) {
  switch (k) {
    case BugKind::Error: return "error";
    case BugKind::AssertFail: return "assert";
    case BugKind::DivByZero: return "div-by-zero";
    case BugKind::OutOfBounds: return "out-of-bounds";
  }
  return "?";
}

std::string BugEvent::key() const {
  if (sink >= 0) return "sink:" + std::to_string(sink);
  return std::string(to_string(kind)) + "@" + std::to_string(loc.line) + ":" +
         std::to_string(loc.column);
}

sym::Model to_model(const InputVector& v) {
  sym::Model m;
  for (size_t i = 0; i < v.size(); ++i) m.emplace_hint(m.end(), static_cast<int>(i), v[i]);
  return m;
}

nlohmann::json input_to_json(const lang::Program& p, const InputVector& v) {
  nlohmann::json out = nlohmann::json::object();
  for (size_t i = 0; i < v.size(); ++i) out[p.symbol_name(static_cast<int>(i))] = v[i];
  return out;
}

Trace run_concrete(const lang::Program& p, const InputVector& v, const RunOptions& opts) {
  if (static_cast<int>(v.size()) != p.symbol_count()) {
    throw std::invalid_argument("input vector binds " + std::to_string(v.size()) +
                                " values, program declares " + std::to_string(p.symbol_count()));
  }
  return Interpreter(p, v, opts).run();
}

}  // namespace dse::concolic
