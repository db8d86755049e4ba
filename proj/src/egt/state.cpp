#include <algorithm>

#include "dse/egt/egt.hpp"

namespace dse::egt {

std::optional<lang::BranchId> SymState::last_site() const {
  for (auto it = phi.conds.rbegin(); it != phi.conds.rend(); ++it) {
    if (it->site) return it->site;
  }
  return std::nullopt;
}

const char* to_string(TestCase::Origin o) {
  switch (o) {
    case TestCase::Origin::Halt: return "halt";
    case TestCase::Origin::Error: return "error";
    case TestCase::Origin::Fault: return "fault";
    case TestCase::Origin::Flush: return "flush";
  }
  return "?";
}

int ForkTree::add_root(std::int64_t state) {
  nodes_.push_back({-1, {}, state});
  root_ = static_cast<int>(nodes_.size()) - 1;
  return root_;
}

std::vector<int> ForkTree::fork(int node, const std::vector<std::int64_t>& states) {
  std::vector<int> out;
  nodes_[static_cast<size_t>(node)].state = -1;
  for (std::int64_t s : states) {
    nodes_.push_back({node, {}, s});
    int id = static_cast<int>(nodes_.size()) - 1;
    nodes_[static_cast<size_t>(node)].kids.push_back(id);
    out.push_back(id);
  }
  return out;
}

void ForkTree::remove(int node) {
  nodes_[static_cast<size_t>(node)].state = -1;
  // Prune upward while nodes are left without live children.
  while (node >= 0 && nodes_[static_cast<size_t>(node)].kids.empty() &&
         nodes_[static_cast<size_t>(node)].state < 0) {
    int parent = nodes_[static_cast<size_t>(node)].parent;
    if (parent < 0) {
      root_ = -1;
      break;
    }
    auto& kids = nodes_[static_cast<size_t>(parent)].kids;
    kids.erase(std::find(kids.begin(), kids.end(), node));
    node = parent;
  }
}

int ForkTree::live_leaves(int node) const {
  const Node& n = nodes_[static_cast<size_t>(node)];
  if (n.state >= 0) return 1;
  int total = 0;
  for (int k : n.kids) total += live_leaves(k);
  return total;
}

int EgtView::position_of(std::int64_t creation_order) const {
  for (size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].stats.creation_order == creation_order) return static_cast<int>(i);
  }
  return -1;
}

namespace {

void bind_input(const lang::Program& p, SymState& s, int index) {
  const lang::InputDecl& in = p.inputs[static_cast<size_t>(index)];
  auto& cells = s.mem.var(in.slot);
  for (size_t j = 0; j < cells.size(); ++j) {
    int symbol = in.first_symbol + static_cast<int>(j);
    cells[j] = sym::symbol(symbol, p.symbol_name(symbol));
  }
}

void push_frame(const lang::Program& p, SymState& s, int fn, std::optional<lang::Slot> dest,
                int cont) {
  const lang::Function& f = p.functions[static_cast<size_t>(fn)];
  Frame fr;
  fr.function = fn;
  fr.block = f.entry_block;
  fr.dest = dest;
  fr.cont = cont;
  fr.saved_locals = std::move(s.mem.locals);
  s.frames.push_back(std::move(fr));
  s.mem.locals = sym::SymbolicMemory::zeros(f.locals);
}

InputVector input_of(const lang::Program& p, const sym::Model& m) {
  InputVector v(static_cast<size_t>(p.symbol_count()), 0);
  for (const auto& [s, value] : m) {
    if (s >= 0 && s < p.symbol_count()) v[static_cast<size_t>(s)] = value;
  }
  return v;
}

void merge(sym::Model& into, const sym::Model& from) {
  for (const auto& [s, v] : from) into[s] = v;
}

// A side condition that must hold for the instruction to execute without a
// runtime fault.
struct Obligation {
  sym::Expr safe;
  concolic::BugKind kind;
};

class Stepper {
 public:
  Stepper(const lang::Program& p, SymState s, solver::Solver& solver, const StepContext& ctx)
      : p_(p), s_(std::move(s)), solver_(solver), ctx_(ctx) {}

  StepOutcome run() {
    Frame& fr = s_.frames.back();
    const lang::Block& b = p_.blocks[static_cast<size_t>(fr.block)];
    account(b.first_instr + fr.instr, fr.function);
    if (fr.instr < static_cast<int>(b.body.size())) {
      const lang::Instr& in = b.body[static_cast<size_t>(fr.instr)];
      if (!instr(in)) return std::move(out_);
      s_.frames.back().instr++;
      proceed(StepOutcome::Kind::Continue);
      return std::move(out_);
    }
    terminator(b.term);
    return std::move(out_);
  }

 private:
  void account(int instr_id, int fn) {
    ++s_.stats.instrs;
    ++s_.stats.callpath_instrs;
    ++s_.frames.back().instrs;
    bool fresh = false;
    if (ctx_.covered_instrs) {
      auto& cov = *ctx_.covered_instrs;
      if (!cov[static_cast<size_t>(instr_id)]) {
        cov[static_cast<size_t>(instr_id)] = 1;
        fresh = true;
        if (ctx_.covered_in_function) ++(*ctx_.covered_in_function)[static_cast<size_t>(fn)];
        if (ctx_.coverage_grew) *ctx_.coverage_grew = true;
      }
    }
    s_.stats.since_new_cov = fresh ? 0 : s_.stats.since_new_cov + 1;
    if (ctx_.last_function) *ctx_.last_function = fn;
  }

  std::int64_t next_id() {
    if (ctx_.next_creation) return (*ctx_.next_creation)++;
    return ++local_creation_;
  }

  sym::EvalHooks hooks() {
    sym::EvalHooks h;
    h.read_element = [this](const std::vector<sym::Expr>& cells, const sym::Expr& idx) {
      obligations_.push_back({sym::in_bounds(idx, static_cast<int>(cells.size())),
                              concolic::BugKind::OutOfBounds});
      return sym::select(cells, idx);
    };
    h.on_divisor = [this](const sym::Expr& d) {
      obligations_.push_back({sym::ne(d, sym::constant(0)), concolic::BugKind::DivByZero});
    };
    return h;
  }

  sym::Expr eval(const lang::Expr& e) { return sym::eval_symbolic(s_.mem, e, hooks()); }

  solver::Verdict query(std::vector<sym::Expr> conjuncts) {
    std::int64_t before = solver_.stats().work;
    solver::Verdict v = solver_.check(conjuncts, &s_.model);
    s_.stats.query_cost += solver_.stats().work - before;
    out_.solver_used = true;
    return v;
  }

  void emit(TestCase::Origin origin, const sym::Model& model,
            std::optional<concolic::BugEvent> bug, std::vector<sym::Expr> phi) {
    TestCase t;
    t.input = input_of(p_, model);
    t.origin = origin;
    t.bug = std::move(bug);
    t.phi = std::move(phi);
    out_.tests.push_back(std::move(t));
  }

  // Discharges collected obligations. Returns false when the state cannot
  // continue (every continuation faults).
  bool discharge(lang::SourceLoc loc) {
    auto pending = std::move(obligations_);
    obligations_.clear();
    for (auto& o : pending) {
      if (o.safe->is_const() && o.safe->value != 0) continue;
      concolic::BugEvent bug{o.kind, -1, loc};
      auto phi = s_.phi.conjuncts();
      if (o.safe->is_const()) {
        emit(TestCase::Origin::Fault, s_.model, bug, phi);
        out_.kind = StepOutcome::Kind::Errored;
        return false;
      }
      auto unsafe = phi;
      unsafe.push_back(sym::lnot(o.safe));
      if (sym::evaluate(o.safe, s_.model) != 0) {
        solver::Verdict v = query(unsafe);
        if (solver::is_sat(v)) {
          sym::Model m = s_.model;
          merge(m, solver::model_of(v));
          emit(TestCase::Origin::Fault, m, bug, unsafe);
        }
      } else {
        emit(TestCase::Origin::Fault, s_.model, bug, unsafe);
        auto safe = phi;
        safe.push_back(o.safe);
        solver::Verdict v = query(safe);
        if (!solver::is_sat(v)) {
          out_.kind = StepOutcome::Kind::Errored;
          return false;
        }
        merge(s_.model, solver::model_of(v));
      }
      s_.phi.push(o.safe, std::nullopt);
      s_.stats.depth = s_.phi.size();
    }
    return true;
  }

  void proceed(StepOutcome::Kind kind) {
    out_.kind = kind;
    out_.next.push_back(std::move(s_));
  }

  bool instr(const lang::Instr& in) {
    switch (in.kind) {
      case lang::Instr::Kind::Input:
        bind_input(p_, s_, in.input);
        return true;
      case lang::Instr::Kind::Assign: {
        sym::Expr v = sym::to_int(eval(*in.value));
        if (!discharge(in.loc)) return false;
        auto& cells = s_.mem.var(in.dest);
        std::fill(cells.begin(), cells.end(), v);
        return true;
      }
      case lang::Instr::Kind::Store: {
        sym::Expr idx = eval(*in.index);
        sym::Expr v = sym::to_int(eval(*in.value));
        auto& cells = s_.mem.var(in.dest);
        int len = static_cast<int>(cells.size());
        if (!(idx->is_const() && idx->value >= 0 && idx->value < len)) {
          obligations_.push_back({sym::in_bounds(idx, len), concolic::BugKind::OutOfBounds});
        }
        if (!discharge(in.loc)) return false;
        auto& cells2 = s_.mem.var(in.dest);
        if (idx->is_const()) cells2[static_cast<size_t>(idx->value)] = v;
        else sym::store(cells2, idx, v);
        return true;
      }
    }
    return true;
  }

  void finish(TestCase::Origin origin, std::optional<concolic::BugEvent> bug) {
    emit(origin, s_.model, std::move(bug), s_.phi.conjuncts());
    out_.kind = origin == TestCase::Origin::Halt ? StepOutcome::Kind::Halted
                                                 : StepOutcome::Kind::Errored;
  }

  void terminator(const lang::Terminator& t) {
    using K = lang::Terminator::Kind;
    Frame& fr = s_.frames.back();
    switch (t.kind) {
      case K::Goto:
        fr.block = t.target;
        fr.instr = 0;
        proceed(StepOutcome::Kind::Continue);
        return;
      case K::Branch:
        branch(t);
        return;
      case K::Call: {
        std::vector<sym::Expr> args;
        for (const auto& a : t.args) args.push_back(sym::to_int(eval(*a)));
        if (!discharge(t.loc)) return;
        push_frame(p_, s_, t.callee, t.dest, t.target);
        const lang::Function& f = p_.functions[static_cast<size_t>(t.callee)];
        for (size_t i = 0; i < f.params.size(); ++i) s_.mem.var(f.params[i])[0] = args[i];
        proceed(StepOutcome::Kind::Continue);
        return;
      }
      case K::Return: {
        sym::Expr v = sym::constant(0);
        if (t.expr) {
          v = sym::to_int(eval(*t.expr));
          if (!discharge(t.loc)) return;
        }
        if (s_.frames.size() == 1) {
          finish(TestCase::Origin::Halt, std::nullopt);
          return;
        }
        Frame done = std::move(s_.frames.back());
        s_.frames.pop_back();
        s_.stats.callpath_instrs -= done.instrs;
        s_.mem.locals = std::move(done.saved_locals);
        if (done.dest) s_.mem.var(*done.dest)[0] = v;
        s_.frames.back().block = done.cont;
        s_.frames.back().instr = 0;
        proceed(StepOutcome::Kind::Continue);
        return;
      }
      case K::Halt:
        finish(TestCase::Origin::Halt, std::nullopt);
        return;
      case K::Error: {
        const lang::Sink& sink = p_.sinks[static_cast<size_t>(t.sink)];
        finish(TestCase::Origin::Error,
               concolic::BugEvent{sink.from_assert ? concolic::BugKind::AssertFail
                                                   : concolic::BugKind::Error,
                                  sink.id, sink.loc});
        return;
      }
    }
  }

  void go(SymState& s, int block) {
    s.frames.back().block = block;
    s.frames.back().instr = 0;
  }

  void branch(const lang::Terminator& t) {
    sym::Expr e = sym::to_bool(eval(*t.expr));
    if (!discharge(t.loc)) return;
    lang::BranchId ts = lang::true_arm(t.conditional), fs = lang::false_arm(t.conditional);
    if (e->is_const()) {
      go(s_, e->value ? t.target : t.alt);
      out_.sites.push_back(e->value ? ts : fs);
      proceed(StepOutcome::Kind::OneArm);
      return;
    }
    // The cached model already witnesses one arm; only the other needs a query.
    bool model_true = sym::evaluate(e, s_.model) != 0;
    sym::Expr other = model_true ? sym::lnot(e) : e;
    auto q = s_.phi.conjuncts();
    q.push_back(other);
    solver::Verdict v = query(q);
    if (solver::is_sat(v)) {
      SymState alt = s_;
      merge(alt.model, solver::model_of(v));
      SymState& st = model_true ? s_ : alt;
      SymState& sf = model_true ? alt : s_;
      st.phi.push(e, ts);
      sf.phi.push(sym::lnot(e), fs);
      go(st, t.target);
      go(sf, t.alt);
      st.stats.depth = st.phi.size();
      sf.stats.depth = sf.phi.size();
      st.stats.creation_order = next_id();
      sf.stats.creation_order = next_id();
      out_.kind = StepOutcome::Kind::Forked;
      out_.sites = {ts, fs};
      out_.next.push_back(std::move(st));
      out_.next.push_back(std::move(sf));
      return;
    }
    if (std::holds_alternative<solver::Unknown>(v)) {
      out_.diagnostic = "solver " + solver::to_string(v) + " on one arm; following the other";
    }
    if (model_true) {
      s_.phi.push(e, ts);
      go(s_, t.target);
    } else {
      s_.phi.push(sym::lnot(e), fs);
      go(s_, t.alt);
    }
    s_.stats.depth = s_.phi.size();
    out_.sites.push_back(model_true ? ts : fs);
    proceed(StepOutcome::Kind::OneArm);
  }

  const lang::Program& p_;
  SymState s_;
  solver::Solver& solver_;
  const StepContext& ctx_;
  std::vector<Obligation> obligations_;
  StepOutcome out_;
  std::int64_t local_creation_ = s_.stats.creation_order;
};

}  // namespace

SymState initial_state(const lang::Program& p) {
  SymState s;
  s.mem.globals = sym::SymbolicMemory::zeros(p.globals);
  for (const auto& [slot, value] : p.global_inits) s.mem.var(slot)[0] = sym::constant(value);
  for (size_t i = 0; i < p.inputs.size(); ++i) {
    if (p.inputs[i].slot.scope == lang::Slot::Scope::Global) bind_input(p, s, static_cast<int>(i));
  }
  push_frame(p, s, p.entry, std::nullopt, -1);
  for (int i = 0; i < p.symbol_count(); ++i) s.model[i] = 0;
  return s;
}

StepOutcome step_state(const lang::Program& p, SymState s, solver::Solver& solver,
                       const StepContext& ctx) {
  return Stepper(p, std::move(s), solver, ctx).run();
}

}  // namespace dse::egt
