#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dse::lang {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

enum class UnOp : std::uint8_t { Neg, Not };

enum class BinOp : std::uint8_t {
  Add, Sub, Mul, Div, Mod,
  Lt, Le, Gt, Ge, Eq, Ne,
  And, Or,
};

bool is_comparison(BinOp op);
bool is_logical(BinOp op);
const char* spelling(BinOp op);
const char* spelling(UnOp op);

/// Storage location of a variable after name resolution.
struct Slot {
  enum class Scope : std::uint8_t { Global, Local };
  Scope scope = Scope::Local;
  int index = -1;

  bool valid() const { return index >= 0; }
  friend bool operator==(const Slot&, const Slot&) = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
  enum class Kind : std::uint8_t { IntLit, Var, Index, Unary, Binary, Call };

  Kind kind = Kind::IntLit;
  SourceLoc loc;
  std::int32_t value = 0;      // IntLit
  std::string name;            // Var, Index, Call
  UnOp unop = UnOp::Neg;
  BinOp binop = BinOp::Add;
  std::vector<ExprPtr> args;   // operands, index, or call arguments

  // Filled in by semantic analysis.
  Slot slot;
  int callee = -1;
};

ExprPtr make_int(std::int32_t v, SourceLoc loc = {});
ExprPtr make_var(std::string name, SourceLoc loc = {});
ExprPtr make_index(std::string name, ExprPtr index, SourceLoc loc = {});
ExprPtr make_unary(UnOp op, ExprPtr e, SourceLoc loc = {});
ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r, SourceLoc loc = {});
ExprPtr make_call(std::string name, std::vector<ExprPtr> args, SourceLoc loc = {});

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;

/// Right-hand side of a declaration: nothing, an expression (possibly a
/// call), or one of the symbolic input sources.
struct Init {
  enum class Kind : std::uint8_t { None, Expr, Input, InputArray };
  Kind kind = Kind::None;
  ExprPtr expr;
  int length = 0;  // InputArray
};

struct SwitchCase {
  std::int32_t value = 0;
  SourceLoc loc;
  std::vector<StmtPtr> body;
};

struct Stmt {
  enum class Kind : std::uint8_t {
    Decl, Assign, CallStmt, If, While, Switch, Return, Assert, Error, Halt,
    Block,
  };

  Kind kind = Kind::Block;
  SourceLoc loc;

  // Decl
  std::string name;
  int array_len = 0;  // 0 for scalars
  Init init;

  // Assign: target is Var or Index; value may be a Call.
  ExprPtr target;
  ExprPtr value;

  // If/While/Switch/Assert/Return/CallStmt
  ExprPtr cond;
  std::vector<StmtPtr> then_body;  // If then-arm, While body, Block body
  std::vector<StmtPtr> else_body;
  bool has_else = false;
  std::vector<SwitchCase> cases;
  std::vector<StmtPtr> default_body;
  bool has_default = false;

  Slot slot;  // Decl, after analysis
};

struct Param {
  std::string name;
  SourceLoc loc;
};

struct FunctionDef {
  std::string name;
  bool returns_value = false;
  std::vector<Param> params;
  std::vector<StmtPtr> body;
  SourceLoc loc;
};

struct GlobalDecl {
  std::string name;
  int array_len = 0;
  Init init;  // None, Expr (an IntLit), Input or InputArray
  SourceLoc loc;
};

struct Ast {
  std::vector<GlobalDecl> globals;
  std::vector<FunctionDef> functions;
};

/// Structural equality that ignores source locations and resolution data.
bool equivalent(const Ast& a, const Ast& b);
bool equivalent(const Expr& a, const Expr& b);

}  // namespace dse::lang
