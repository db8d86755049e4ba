// Semantic checks and lowering of the AST to basic blocks.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "dse/lang/program.hpp"

namespace dse::lang {

const char* to_string(BranchKind k) {
  switch (k) {
    case BranchKind::If: return "if";
    case BranchKind::WhileHeader: return "while-header";
    case BranchKind::SwitchCase: return "switch-case";
  }
  return "?";
}

BranchSite Program::site(BranchId id) const {
  const Conditional& c = conditionals.at(static_cast<size_t>(conditional_of(id)));
  BranchSite s;
  s.id = id;
  s.polarity = is_true_arm(id);
  s.kind = c.kind;
  s.function = c.function;
  s.in_loop_body = c.in_loop_body;
  s.shape = c.shape;
  s.conditional = c.id;
  return s;
}

int Program::symbol_count() const {
  int n = 0;
  for (const auto& in : inputs) n += in.length.value_or(1);
  return n;
}

std::string Program::symbol_name(int symbol) const {
  for (const auto& in : inputs) {
    int len = in.length.value_or(1);
    if (symbol >= in.first_symbol && symbol < in.first_symbol + len) {
      if (!in.length) return in.name;
      return in.name + "[" + std::to_string(symbol - in.first_symbol) + "]";
    }
  }
  return "?" + std::to_string(symbol);
}

int Program::function_index(const std::string& name) const {
  for (size_t i = 0; i < functions.size(); ++i) {
    if (functions[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

struct Binding {
  Slot slot;
  int length = 0;
};

ConditionShape shape_of(const Expr& root) {
  ConditionShape s;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit: s.uses_constant = true; break;
      case Expr::Kind::Index: s.uses_array_deref = true; break;
      case Expr::Kind::Binary:
        if (is_comparison(e.binop)) ++s.comparison_count;
        break;
      default: break;
    }
    for (const auto& a : e.args) walk(*a);
  };
  walk(root);
  const Expr* top = &root;
  while (top->kind == Expr::Kind::Unary && top->unop == UnOp::Not) {
    top = top->args[0].get();
  }
  s.is_equality = top->kind == Expr::Kind::Binary &&
                  (top->binop == BinOp::Eq || top->binop == BinOp::Ne);
  return s;
}

class Lowering {
 public:
  explicit Lowering(Program& p) : p_(p) {}

  void run() {
    declare_functions();
    declare_globals();
    for (size_t f = 0; f < p_.ast.functions.size(); ++f) {
      lower_function(static_cast<int>(f));
    }
    check_recursion();
    int next = 0;
    for (auto& b : p_.blocks) {
      b.first_instr = next;
      next += b.instr_count();
    }
    p_.total_instrs = next;
  }

 private:
  // ---- declarations ----

  void declare_functions() {
    for (size_t i = 0; i < p_.ast.functions.size(); ++i) {
      const auto& fd = p_.ast.functions[i];
      if (fn_index_.count(fd.name)) {
        throw SemanticError(fd.loc, "duplicate function '" + fd.name + "'");
      }
      fn_index_[fd.name] = static_cast<int>(i);
      Function f;
      f.name = fd.name;
      f.returns_value = fd.returns_value;
      p_.functions.push_back(std::move(f));
    }
    auto it = fn_index_.find("main");
    if (it == fn_index_.end()) {
      throw SemanticError({1, 1}, "program has no 'main' function");
    }
    p_.entry = it->second;
    const auto& main_def = p_.ast.functions[static_cast<size_t>(p_.entry)];
    if (!main_def.params.empty()) {
      throw SemanticError(main_def.loc, "'main' takes no parameters");
    }
  }

  void declare_globals() {
    for (auto& g : p_.ast.globals) {
      if (globals_.count(g.name)) {
        throw SemanticError(g.loc, "duplicate global '" + g.name + "'");
      }
      int length = g.array_len;
      if (g.init.kind == Init::Kind::InputArray) {
        if (length != 0 && length != g.init.length) {
          throw SemanticError(g.loc, "input_array length does not match '" + g.name + "'");
        }
        length = g.init.length;
      } else if (g.init.kind == Init::Kind::Input && length != 0) {
        throw SemanticError(g.loc, "input() initializes scalars only");
      } else if (g.init.kind == Init::Kind::Expr && length != 0) {
        throw SemanticError(g.loc, "array initializers are not supported");
      }
      Slot slot{Slot::Scope::Global, static_cast<int>(p_.globals.size())};
      p_.globals.push_back({g.name, length});
      globals_[g.name] = {slot, length};
      if (g.init.kind == Init::Kind::Expr) {
        p_.global_inits.emplace_back(slot, g.init.expr->value);
      } else if (g.init.kind == Init::Kind::Input ||
                 g.init.kind == Init::Kind::InputArray) {
        add_input(g.name, length, slot);
      }
    }
  }

  int add_input(const std::string& name, int length, Slot slot) {
    InputDecl in;
    in.name = name;
    if (length > 0) in.length = length;
    in.slot = slot;
    in.first_symbol = p_.symbol_count();
    p_.inputs.push_back(std::move(in));
    return static_cast<int>(p_.inputs.size()) - 1;
  }

  // ---- functions ----

  void lower_function(int fi) {
    fn_ = fi;
    const FunctionDef& fd = p_.ast.functions[static_cast<size_t>(fi)];
    Function& f = p_.functions[static_cast<size_t>(fi)];
    scopes_.clear();
    scopes_.emplace_back();
    loop_depth_ = 0;
    for (const auto& prm : fd.params) {
      if (scopes_.back().count(prm.name)) {
        throw SemanticError(prm.loc, "duplicate parameter '" + prm.name + "'");
      }
      Slot s = new_local(prm.name, 0);
      f.params.push_back(s);
      scopes_.back()[prm.name] = {s, 0};
    }
    cur_ = new_block();
    f.entry_block = cur_;
    lower_body(fd.body, /*top_level=*/true);
    Terminator t;
    t.kind = Terminator::Kind::Return;
    t.loc = fd.loc;
    finish(std::move(t));
  }

  Slot new_local(const std::string& name, int length) {
    Function& f = p_.functions[static_cast<size_t>(fn_)];
    Slot s{Slot::Scope::Local, static_cast<int>(f.locals.size())};
    f.locals.push_back({name, length});
    return s;
  }

  int new_block() {
    Block b;
    b.id = static_cast<int>(p_.blocks.size());
    b.function = fn_;
    p_.blocks.push_back(std::move(b));
    p_.functions[static_cast<size_t>(fn_)].blocks.push_back(p_.blocks.back().id);
    return p_.blocks.back().id;
  }

  Block& block(int id) { return p_.blocks[static_cast<size_t>(id)]; }

  void finish(Terminator t) { block(cur_).term = std::move(t); }

  void jump_to(int target) {
    Terminator t;
    t.kind = Terminator::Kind::Goto;
    t.target = target;
    finish(std::move(t));
    cur_ = target;
  }

  int add_conditional(BranchKind kind, ExprPtr cond, SourceLoc loc) {
    Conditional c;
    c.id = static_cast<int>(p_.conditionals.size());
    c.kind = kind;
    c.function = fn_;
    c.in_loop_body = loop_depth_ > 0;
    c.shape = shape_of(*cond);
    if (kind == BranchKind::SwitchCase) c.shape.is_equality = true;
    c.cond = std::move(cond);
    c.loc = loc;
    c.block = cur_;
    p_.conditionals.push_back(c);
    p_.functions[static_cast<size_t>(fn_)].conditionals.push_back(c.id);
    return c.id;
  }

  // Ends the current block with a two-way branch; returns (true, false)
  // successor blocks, both fresh.
  std::pair<int, int> branch(BranchKind kind, ExprPtr cond, SourceLoc loc) {
    int c = add_conditional(kind, cond, loc);
    int t = new_block();
    int f = new_block();
    Terminator term;
    term.kind = Terminator::Kind::Branch;
    term.conditional = c;
    term.expr = std::move(cond);
    term.target = t;
    term.alt = f;
    term.loc = loc;
    finish(std::move(term));
    return {t, f};
  }

  void lower_body(const std::vector<StmtPtr>& body, bool top_level = false) {
    scopes_.emplace_back();
    for (const auto& s : body) lower_stmt(*s, top_level);
    scopes_.pop_back();
  }

  void lower_stmt(Stmt& s, bool top_level) {
    switch (s.kind) {
      case Stmt::Kind::Decl: lower_decl(s, top_level); break;
      case Stmt::Kind::Assign: lower_assign(s); break;
      case Stmt::Kind::CallStmt: emit_call(*s.cond, std::nullopt, s.loc, false); break;
      case Stmt::Kind::If: {
        resolve_value(*s.cond);
        auto [t, f] = branch(BranchKind::If, s.cond, s.loc);
        int join = f;
        cur_ = t;
        lower_body(s.then_body);
        if (s.has_else) {
          join = new_block();
          jump_to(join);
          cur_ = f;
          lower_body(s.else_body);
        }
        jump_to(join);
        break;
      }
      case Stmt::Kind::While: {
        resolve_value(*s.cond);
        p_.functions[static_cast<size_t>(fn_)].has_loop = true;
        int header = new_block();
        jump_to(header);
        auto [body, exit] = branch(BranchKind::WhileHeader, s.cond, s.loc);
        cur_ = body;
        ++loop_depth_;
        lower_body(s.then_body);
        --loop_depth_;
        jump_to(header);
        cur_ = exit;
        break;
      }
      case Stmt::Kind::Switch: {
        resolve_value(*s.cond);
        std::unordered_set<std::int32_t> seen;
        std::vector<int> case_ends;
        for (auto& c : s.cases) {
          if (!seen.insert(c.value).second) {
            throw SemanticError(c.loc, "duplicate case value " + std::to_string(c.value));
          }
          auto test = make_binary(BinOp::Eq, s.cond, make_int(c.value, c.loc), c.loc);
          auto [t, f] = branch(BranchKind::SwitchCase, test, c.loc);
          cur_ = t;
          lower_body(c.body);
          case_ends.push_back(cur_);
          cur_ = f;
        }
        if (s.has_default) lower_body(s.default_body);
        int join = new_block();
        jump_to(join);
        for (int end : case_ends) {
          cur_ = end;
          jump_to(join);
        }
        cur_ = join;
        break;
      }
      case Stmt::Kind::Return: {
        const Function& f = p_.functions[static_cast<size_t>(fn_)];
        if (s.cond && !f.returns_value) {
          throw SemanticError(s.loc, "void function '" + f.name + "' returns a value");
        }
        if (s.cond) resolve_value(*s.cond);
        Terminator t;
        t.kind = Terminator::Kind::Return;
        t.expr = s.cond;
        t.loc = s.loc;
        finish(std::move(t));
        cur_ = new_block();
        break;
      }
      case Stmt::Kind::Assert: {
        resolve_value(*s.cond);
        auto [fail, ok] = branch(BranchKind::If, make_unary(UnOp::Not, s.cond, s.loc), s.loc);
        cur_ = fail;
        emit_sink(s.loc, true);
        cur_ = ok;
        break;
      }
      case Stmt::Kind::Error:
        emit_sink(s.loc, false);
        cur_ = new_block();
        break;
      case Stmt::Kind::Halt: {
        Terminator t;
        t.kind = Terminator::Kind::Halt;
        t.loc = s.loc;
        finish(std::move(t));
        cur_ = new_block();
        break;
      }
      case Stmt::Kind::Block:
        lower_body(s.then_body);
        break;
    }
  }

  void emit_sink(SourceLoc loc, bool from_assert) {
    Sink k;
    k.id = static_cast<int>(p_.sinks.size());
    k.from_assert = from_assert;
    k.function = fn_;
    k.loc = loc;
    p_.sinks.push_back(k);
    Terminator t;
    t.kind = Terminator::Kind::Error;
    t.sink = k.id;
    t.loc = loc;
    finish(std::move(t));
  }

  void lower_decl(Stmt& s, bool top_level) {
    if (scopes_.back().count(s.name)) {
      throw SemanticError(s.loc, "redeclaration of '" + s.name + "'");
    }
    int length = s.array_len;
    const Init& init = s.init;
    bool is_input = init.kind == Init::Kind::Input || init.kind == Init::Kind::InputArray;
    if (is_input && !(top_level && fn_ == p_.entry)) {
      throw SemanticError(s.loc, "inputs may only be declared globally or at the top level of main");
    }
    if (init.kind == Init::Kind::InputArray) {
      if (length != 0 && length != init.length) {
        throw SemanticError(s.loc, "input_array length does not match '" + s.name + "'");
      }
      length = init.length;
    } else if (init.kind == Init::Kind::Input && length != 0) {
      throw SemanticError(s.loc, "input() initializes scalars only");
    } else if (init.kind == Init::Kind::Expr && length != 0) {
      throw SemanticError(s.loc, "array initializers are not supported");
    }
    // The initializer is resolved before the name comes into scope.
    if (init.kind == Init::Kind::Expr && init.expr->kind != Expr::Kind::Call) {
      resolve_value(*init.expr);
    }
    Slot slot = new_local(s.name, length);
    s.slot = slot;

    if (is_input) {
      Instr in;
      in.kind = Instr::Kind::Input;
      in.dest = slot;
      in.input = add_input(s.name, length, slot);
      in.loc = s.loc;
      block(cur_).body.push_back(std::move(in));
    } else if (init.kind == Init::Kind::Expr && init.expr->kind == Expr::Kind::Call) {
      emit_call(*init.expr, slot, s.loc, true);
    } else {
      Instr in;
      in.kind = Instr::Kind::Assign;
      in.dest = slot;
      in.value = init.kind == Init::Kind::Expr ? init.expr : make_int(0, s.loc);
      in.loc = s.loc;
      block(cur_).body.push_back(std::move(in));
    }
    scopes_.back()[s.name] = {slot, length};
  }

  void lower_assign(Stmt& s) {
    Expr& target = *s.target;
    Binding b = lookup(target.name, target.loc);
    target.slot = b.slot;
    if (target.kind == Expr::Kind::Var) {
      if (b.length != 0) {
        throw SemanticError(target.loc, "cannot assign to array '" + target.name + "'");
      }
      if (s.value->kind == Expr::Kind::Call) {
        emit_call(*s.value, b.slot, s.loc, true);
        return;
      }
      resolve_value(*s.value);
      Instr in;
      in.kind = Instr::Kind::Assign;
      in.dest = b.slot;
      in.value = s.value;
      in.loc = s.loc;
      block(cur_).body.push_back(std::move(in));
      return;
    }
    if (b.length == 0) {
      throw SemanticError(target.loc, "'" + target.name + "' is not an array");
    }
    if (s.value->kind == Expr::Kind::Call) {
      throw SemanticError(s.value->loc, "call results may only be assigned to scalar variables");
    }
    resolve_value(*target.args[0]);
    resolve_value(*s.value);
    Instr in;
    in.kind = Instr::Kind::Store;
    in.dest = b.slot;
    in.index = target.args[0];
    in.value = s.value;
    in.loc = s.loc;
    block(cur_).body.push_back(std::move(in));
  }

  void emit_call(Expr& call, std::optional<Slot> dest, SourceLoc loc, bool needs_value) {
    auto it = fn_index_.find(call.name);
    if (it == fn_index_.end()) {
      throw SemanticError(call.loc, "call to undeclared function '" + call.name + "'");
    }
    int callee = it->second;
    if (callee == p_.entry) throw SemanticError(call.loc, "'main' cannot be called");
    const auto& fd = p_.ast.functions[static_cast<size_t>(callee)];
    if (fd.params.size() != call.args.size()) {
      throw SemanticError(call.loc, "'" + call.name + "' expects " +
                                        std::to_string(fd.params.size()) + " argument(s)");
    }
    if (needs_value && !fd.returns_value) {
      throw SemanticError(call.loc, "void function '" + call.name + "' used as a value");
    }
    for (auto& a : call.args) resolve_value(*a);
    call.callee = callee;
    calls_[fn_].insert(callee);
    int cont = new_block();
    Terminator t;
    t.kind = Terminator::Kind::Call;
    t.callee = callee;
    t.args = call.args;
    t.dest = dest;
    t.target = cont;
    t.loc = loc;
    finish(std::move(t));
    cur_ = cont;
  }

  // ---- expressions ----

  Binding lookup(const std::string& name, SourceLoc loc) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    auto g = globals_.find(name);
    if (g != globals_.end()) return g->second;
    throw SemanticError(loc, "undeclared identifier '" + name + "'");
  }

  void resolve_value(Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return;
      case Expr::Kind::Var: {
        Binding b = lookup(e.name, e.loc);
        if (b.length != 0) {
          throw SemanticError(e.loc, "array '" + e.name + "' used as a scalar");
        }
        e.slot = b.slot;
        return;
      }
      case Expr::Kind::Index: {
        Binding b = lookup(e.name, e.loc);
        if (b.length == 0) {
          throw SemanticError(e.loc, "'" + e.name + "' is not an array");
        }
        e.slot = b.slot;
        resolve_value(*e.args[0]);
        return;
      }
      case Expr::Kind::Call:
        if (!fn_index_.count(e.name)) {
          throw SemanticError(e.loc, "call to undeclared function '" + e.name + "'");
        }
        throw SemanticError(e.loc, "calls may only appear as statements or assignment right-hand sides");
      case Expr::Kind::Unary:
      case Expr::Kind::Binary:
        for (auto& a : e.args) resolve_value(*a);
        return;
    }
  }

  void check_recursion() {
    // 0 = unvisited, 1 = on stack, 2 = done
    std::vector<int> state(p_.functions.size(), 0);
    std::function<void(int)> visit = [&](int f) {
      state[static_cast<size_t>(f)] = 1;
      for (int g : calls_[f]) {
        if (state[static_cast<size_t>(g)] == 1) {
          throw SemanticError(p_.ast.functions[static_cast<size_t>(g)].loc,
                              "recursion is not supported ('" +
                                  p_.functions[static_cast<size_t>(g)].name + "')");
        }
        if (state[static_cast<size_t>(g)] == 0) visit(g);
      }
      state[static_cast<size_t>(f)] = 2;
    };
    for (size_t f = 0; f < p_.functions.size(); ++f) {
      if (state[f] == 0) visit(static_cast<int>(f));
    }
  }

  Program& p_;
  std::unordered_map<std::string, int> fn_index_;
  std::unordered_map<std::string, Binding> globals_;
  std::vector<std::unordered_map<std::string, Binding>> scopes_;
  std::map<int, std::set<int>> calls_;
  int fn_ = 0;
  int cur_ = -1;
  int loop_depth_ = 0;
};

}  // namespace

Program parse(const std::string& source) {
  Program p;
  p.ast = parse_ast(source);
  Lowering(p).run();
  return p;
}

}  // namespace dse::lang
