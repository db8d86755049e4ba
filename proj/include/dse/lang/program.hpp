#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dse/lang/ast.hpp"

namespace dse::lang {

using BranchId = int;

enum class BranchKind : std::uint8_t { If, WhileHeader, SwitchCase };
const char* to_string(BranchKind k);

/// Syntactic properties of a branch condition.
struct ConditionShape {
  bool uses_array_deref = false;
  bool uses_constant = false;
  bool is_equality = false;
  int comparison_count = 0;
};

/// One source conditional. Its true arm is branch site 2*id, its false arm
/// 2*id+1.
struct Conditional {
  int id = 0;
  BranchKind kind = BranchKind::If;
  int function = 0;
  bool in_loop_body = false;
  ExprPtr cond;
  ConditionShape shape;
  SourceLoc loc;
  int block = -1;  // block whose terminator evaluates cond
};

struct BranchSite {
  BranchId id = 0;
  bool polarity = true;  // true arm?
  BranchKind kind = BranchKind::If;
  int function = 0;
  bool in_loop_body = false;
  ConditionShape shape;
  int conditional = 0;
};

inline BranchId true_arm(int conditional) { return 2 * conditional; }
inline BranchId false_arm(int conditional) { return 2 * conditional + 1; }
inline BranchId opposite(BranchId b) { return b ^ 1; }
inline int conditional_of(BranchId b) { return b / 2; }
inline bool is_true_arm(BranchId b) { return (b & 1) == 0; }

struct InputDecl {
  std::string name;
  std::optional<int> length;  // nullopt for scalars
  Slot slot;
  int first_symbol = 0;  // index into the flat symbol list
};

struct VarInfo {
  std::string name;
  int length = 0;  // 0 for scalars
};

/// Error sinks: error() statements and the failure arm of assert().
struct Sink {
  int id = 0;
  bool from_assert = false;
  int function = 0;
  SourceLoc loc;
};

struct Instr {
  enum class Kind : std::uint8_t { Assign, Store, Input };
  Kind kind = Kind::Assign;
  Slot dest;
  ExprPtr index;  // Store
  ExprPtr value;  // Assign, Store
  int input = -1; // Input: index into Program::inputs
  SourceLoc loc;
};

struct Terminator {
  enum class Kind : std::uint8_t { Goto, Branch, Call, Return, Halt, Error };
  Kind kind = Kind::Halt;
  int target = -1;        // Goto, Branch true target, Call continuation
  int alt = -1;           // Branch false target
  int conditional = -1;   // Branch
  ExprPtr expr;           // Branch condition, Return value
  int callee = -1;        // Call
  std::vector<ExprPtr> args;
  std::optional<Slot> dest;  // Call result (scalar variables only)
  int sink = -1;          // Error
  SourceLoc loc;
};

struct Block {
  int id = 0;
  int function = 0;
  std::vector<Instr> body;
  Terminator term;
  int first_instr = 0;  // global id of body[0]; the terminator is first_instr + body.size()

  int instr_count() const { return static_cast<int>(body.size()) + 1; }
};

struct Function {
  std::string name;
  bool returns_value = false;
  std::vector<Slot> params;
  std::vector<VarInfo> locals;
  int entry_block = -1;
  std::vector<int> blocks;
  std::vector<int> conditionals;
  bool has_loop = false;
  int branch_site_count() const { return 2 * static_cast<int>(conditionals.size()); }
};

/// A parsed, checked and lowered MiniC program. Immutable after parse().
struct Program {
  Ast ast;
  std::vector<Function> functions;
  std::vector<VarInfo> globals;
  std::vector<std::pair<Slot, std::int32_t>> global_inits;
  std::vector<InputDecl> inputs;
  std::vector<Conditional> conditionals;
  std::vector<Block> blocks;
  std::vector<Sink> sinks;
  int entry = -1;
  int total_instrs = 0;

  int branch_count() const { return 2 * static_cast<int>(conditionals.size()); }
  BranchSite site(BranchId id) const;
  int symbol_count() const;
  /// Display name of a flat input symbol, e.g. "x" or "a[2]".
  std::string symbol_name(int symbol) const;
  int function_index(const std::string& name) const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceLoc loc, const std::string& msg);
  SourceLoc loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

class SemanticError : public std::runtime_error {
 public:
  SemanticError(SourceLoc loc, const std::string& msg);
  SourceLoc loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

/// Parses, checks and lowers MiniC source. Throws ParseError or SemanticError.
Program parse(const std::string& source);
Program parse_file(const std::string& path);

/// Parses into an AST only (no checking). Throws ParseError.
Ast parse_ast(const std::string& source);

std::string pretty_print(const Ast& ast);
std::string pretty_print(const Expr& e);

}  // namespace dse::lang
