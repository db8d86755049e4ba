#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dse/lang/program.hpp"

namespace dse::lang {

ParseError::ParseError(SourceLoc loc, const std::string& msg)
    : std::runtime_error(std::to_string(loc.line) + ":" +
                         std::to_string(loc.column) + ": syntax error: " + msg),
      loc_(loc) {}

SemanticError::SemanticError(SourceLoc loc, const std::string& msg)
    : std::runtime_error(std::to_string(loc.line) + ":" +
                         std::to_string(loc.column) + ": error: " + msg),
      loc_(loc) {}

namespace {

enum class Tok : std::uint8_t {
  End, Ident, Number,
  KwInt, KwVoid, KwIf, KwElse, KwWhile, KwSwitch, KwCase, KwDefault,
  KwReturn, KwAssert, KwError, KwHalt, KwInput, KwInputArray,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Semi, Comma, Colon, Assign,
  Plus, Minus, Star, Slash, Percent,
  Lt, Le, Gt, Ge, EqEq, NotEq, AndAnd, OrOr, Bang,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t number = 0;
  SourceLoc loc;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Assign: return "'='";
    default: return "token";
  }
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.loc = {line_, col_};
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_')) {
          word += advance();
        }
        t.kind = keyword(word);
        t.text = std::move(word);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::int64_t v = 0;
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          v = v * 10 + (advance() - '0');
          if (v > (std::int64_t{1} << 31)) {
            throw ParseError(t.loc, "integer literal out of range");
          }
        }
        t.kind = Tok::Number;
        t.number = v;
      } else {
        t.kind = punct();
        if (t.kind == Tok::End) {
          throw ParseError(t.loc, std::string("unexpected character '") + c + "'");
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  bool peek_is(const char* s) const { return src_.compare(pos_, std::char_traits<char>::length(s), s) == 0; }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (peek_is("//")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  static Tok keyword(const std::string& w) {
    static const std::pair<const char*, Tok> kws[] = {
        {"int", Tok::KwInt},       {"void", Tok::KwVoid},
        {"if", Tok::KwIf},         {"else", Tok::KwElse},
        {"while", Tok::KwWhile},   {"switch", Tok::KwSwitch},
        {"case", Tok::KwCase},     {"default", Tok::KwDefault},
        {"return", Tok::KwReturn}, {"assert", Tok::KwAssert},
        {"error", Tok::KwError},   {"halt", Tok::KwHalt},
        {"input", Tok::KwInput},   {"input_array", Tok::KwInputArray},
    };
    for (const auto& [s, t] : kws) {
      if (w == s) return t;
    }
    return Tok::Ident;
  }

  Tok punct() {
    static const std::pair<const char*, Tok> two[] = {
        {"<=", Tok::Le}, {">=", Tok::Ge},     {"==", Tok::EqEq},
        {"!=", Tok::NotEq}, {"&&", Tok::AndAnd}, {"||", Tok::OrOr},
    };
    for (const auto& [s, t] : two) {
      if (peek_is(s)) {
        advance();
        advance();
        return t;
      }
    }
    Tok t = Tok::End;
    switch (src_[pos_]) {
      case '(': t = Tok::LParen; break;
      case ')': t = Tok::RParen; break;
      case '{': t = Tok::LBrace; break;
      case '}': t = Tok::RBrace; break;
      case '[': t = Tok::LBracket; break;
      case ']': t = Tok::RBracket; break;
      case ';': t = Tok::Semi; break;
      case ',': t = Tok::Comma; break;
      case ':': t = Tok::Colon; break;
      case '=': t = Tok::Assign; break;
      case '+': t = Tok::Plus; break;
      case '-': t = Tok::Minus; break;
      case '*': t = Tok::Star; break;
      case '/': t = Tok::Slash; break;
      case '%': t = Tok::Percent; break;
      case '<': t = Tok::Lt; break;
      case '>': t = Tok::Gt; break;
      case '!': t = Tok::Bang; break;
      default: return Tok::End;
    }
    advance();
    return t;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Ast program() {
    Ast ast;
    while (!at(Tok::End)) {
      SourceLoc loc = cur().loc;
      bool is_void = at(Tok::KwVoid);
      if (!is_void) expect(Tok::KwInt, "'int' or 'void'");
      else next();
      std::string name = expect_ident();
      if (at(Tok::LParen)) {
        ast.functions.push_back(function(std::move(name), !is_void, loc));
      } else {
        if (is_void) throw ParseError(loc, "variables cannot be void");
        ast.globals.push_back(global(std::move(name), loc));
      }
    }
    return ast;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok t) const { return cur().kind == t; }
  const Token& next() { return toks_[pos_++]; }

  bool accept(Tok t) {
    if (!at(t)) return false;
    ++pos_;
    return true;
  }

  const Token& expect(Tok t, const char* what = nullptr) {
    if (!at(t)) {
      throw ParseError(cur().loc, std::string("expected ") +
                                      (what ? what : describe(t)) + " before " +
                                      found());
    }
    return next();
  }

  std::string found() const {
    const Token& t = cur();
    if (t.kind == Tok::End) return "end of input";
    if (t.kind == Tok::Number) return "'" + std::to_string(t.number) + "'";
    if (!t.text.empty()) return "'" + t.text + "'";
    return describe(t.kind);
  }

  std::string expect_ident() { return expect(Tok::Ident).text; }

  int expect_length() {
    const Token& t = expect(Tok::Number, "array length");
    if (t.number <= 0 || t.number > (1 << 20)) {
      throw ParseError(t.loc, "array length must be positive");
    }
    return static_cast<int>(t.number);
  }

  std::int32_t literal(bool negative, const Token& t) {
    std::int64_t v = negative ? -t.number : t.number;
    if (v > INT32_MAX || v < INT32_MIN) throw ParseError(t.loc, "integer literal out of range");
    return static_cast<std::int32_t>(v);
  }

  FunctionDef function(std::string name, bool returns_value, SourceLoc loc) {
    FunctionDef f;
    f.name = std::move(name);
    f.returns_value = returns_value;
    f.loc = loc;
    expect(Tok::LParen);
    if (!at(Tok::RParen)) {
      do {
        expect(Tok::KwInt, "'int'");
        Param p;
        p.loc = cur().loc;
        p.name = expect_ident();
        f.params.push_back(std::move(p));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    f.body = block();
    return f;
  }

  GlobalDecl global(std::string name, SourceLoc loc) {
    GlobalDecl g;
    g.name = std::move(name);
    g.loc = loc;
    if (accept(Tok::LBracket)) {
      g.array_len = expect_length();
      expect(Tok::RBracket);
    }
    if (accept(Tok::Assign)) g.init = initializer(true);
    expect(Tok::Semi);
    return g;
  }

  Init initializer(bool global_scope) {
    Init init;
    if (accept(Tok::KwInput)) {
      expect(Tok::LParen);
      expect(Tok::RParen);
      init.kind = Init::Kind::Input;
    } else if (accept(Tok::KwInputArray)) {
      expect(Tok::LParen);
      init.length = expect_length();
      expect(Tok::RParen);
      init.kind = Init::Kind::InputArray;
    } else if (global_scope) {
      bool neg = accept(Tok::Minus);
      const Token& t = expect(Tok::Number, "constant initializer");
      init.kind = Init::Kind::Expr;
      init.expr = make_int(literal(neg, t), t.loc);
    } else {
      init.kind = Init::Kind::Expr;
      init.expr = expression();
    }
    return init;
  }

  std::vector<StmtPtr> block() {
    expect(Tok::LBrace);
    std::vector<StmtPtr> body;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) expect(Tok::RBrace);
      body.push_back(statement());
    }
    next();
    return body;
  }

  std::vector<StmtPtr> arm() {
    if (at(Tok::LBrace)) return block();
    return {statement()};
  }

  StmtPtr statement() {
    auto s = std::make_shared<Stmt>();
    s->loc = cur().loc;
    switch (cur().kind) {
      case Tok::KwInt: {
        next();
        s->kind = Stmt::Kind::Decl;
        s->name = expect_ident();
        if (accept(Tok::LBracket)) {
          s->array_len = expect_length();
          expect(Tok::RBracket);
        }
        if (accept(Tok::Assign)) s->init = initializer(false);
        expect(Tok::Semi);
        return s;
      }
      case Tok::KwIf:
        next();
        s->kind = Stmt::Kind::If;
        expect(Tok::LParen);
        s->cond = expression();
        expect(Tok::RParen);
        s->then_body = arm();
        if (accept(Tok::KwElse)) {
          s->has_else = true;
          s->else_body = arm();
        }
        return s;
      case Tok::KwWhile:
        next();
        s->kind = Stmt::Kind::While;
        expect(Tok::LParen);
        s->cond = expression();
        expect(Tok::RParen);
        s->then_body = arm();
        return s;
      case Tok::KwSwitch:
        next();
        s->kind = Stmt::Kind::Switch;
        expect(Tok::LParen);
        s->cond = expression();
        expect(Tok::RParen);
        expect(Tok::LBrace);
        while (at(Tok::KwCase)) {
          SwitchCase c;
          c.loc = next().loc;
          bool neg = accept(Tok::Minus);
          c.value = literal(neg, expect(Tok::Number, "case value"));
          expect(Tok::Colon);
          while (!at(Tok::KwCase) && !at(Tok::KwDefault) && !at(Tok::RBrace)) {
            if (at(Tok::End)) expect(Tok::RBrace);
            c.body.push_back(statement());
          }
          s->cases.push_back(std::move(c));
        }
        if (accept(Tok::KwDefault)) {
          expect(Tok::Colon);
          s->has_default = true;
          while (!at(Tok::RBrace)) {
            if (at(Tok::End)) expect(Tok::RBrace);
            s->default_body.push_back(statement());
          }
        }
        expect(Tok::RBrace);
        return s;
      case Tok::KwReturn:
        next();
        s->kind = Stmt::Kind::Return;
        if (!at(Tok::Semi)) s->cond = expression();
        expect(Tok::Semi);
        return s;
      case Tok::KwAssert:
        next();
        s->kind = Stmt::Kind::Assert;
        expect(Tok::LParen);
        s->cond = expression();
        expect(Tok::RParen);
        expect(Tok::Semi);
        return s;
      case Tok::KwError:
        next();
        s->kind = Stmt::Kind::Error;
        expect(Tok::LParen);
        expect(Tok::RParen);
        expect(Tok::Semi);
        return s;
      case Tok::KwHalt:
        next();
        s->kind = Stmt::Kind::Halt;
        expect(Tok::Semi);
        return s;
      case Tok::LBrace:
        s->kind = Stmt::Kind::Block;
        s->then_body = block();
        return s;
      case Tok::Ident: {
        ExprPtr lhs = postfix();
        if (lhs->kind == Expr::Kind::Call) {
          s->kind = Stmt::Kind::CallStmt;
          s->cond = std::move(lhs);
          expect(Tok::Semi);
          return s;
        }
        s->kind = Stmt::Kind::Assign;
        s->target = std::move(lhs);
        expect(Tok::Assign);
        s->value = expression();
        expect(Tok::Semi);
        return s;
      }
      default:
        throw ParseError(cur().loc, "expected statement before " + found());
    }
  }

  ExprPtr expression() { return logical_or(); }

  ExprPtr logical_or() {
    ExprPtr l = logical_and();
    while (at(Tok::OrOr)) {
      SourceLoc loc = next().loc;
      l = make_binary(BinOp::Or, l, logical_and(), loc);
    }
    return l;
  }

  ExprPtr logical_and() {
    ExprPtr l = equality();
    while (at(Tok::AndAnd)) {
      SourceLoc loc = next().loc;
      l = make_binary(BinOp::And, l, equality(), loc);
    }
    return l;
  }

  ExprPtr equality() {
    ExprPtr l = relational();
    while (at(Tok::EqEq) || at(Tok::NotEq)) {
      BinOp op = at(Tok::EqEq) ? BinOp::Eq : BinOp::Ne;
      SourceLoc loc = next().loc;
      l = make_binary(op, l, relational(), loc);
    }
    return l;
  }

  ExprPtr relational() {
    ExprPtr l = additive();
    for (;;) {
      BinOp op;
      if (at(Tok::Lt)) op = BinOp::Lt;
      else if (at(Tok::Le)) op = BinOp::Le;
      else if (at(Tok::Gt)) op = BinOp::Gt;
      else if (at(Tok::Ge)) op = BinOp::Ge;
      else return l;
      SourceLoc loc = next().loc;
      l = make_binary(op, l, additive(), loc);
    }
  }

  ExprPtr additive() {
    ExprPtr l = multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
      SourceLoc loc = next().loc;
      l = make_binary(op, l, multiplicative(), loc);
    }
    return l;
  }

  ExprPtr multiplicative() {
    ExprPtr l = unary();
    for (;;) {
      BinOp op;
      if (at(Tok::Star)) op = BinOp::Mul;
      else if (at(Tok::Slash)) op = BinOp::Div;
      else if (at(Tok::Percent)) op = BinOp::Mod;
      else return l;
      SourceLoc loc = next().loc;
      l = make_binary(op, l, unary(), loc);
    }
  }

  ExprPtr unary() {
    SourceLoc loc = cur().loc;
    if (accept(Tok::Minus)) {
      // Fold "-<literal>" so INT_MIN is expressible.
      if (at(Tok::Number)) return make_int(literal(true, next()), loc);
      return make_unary(UnOp::Neg, unary(), loc);
    }
    if (accept(Tok::Bang)) return make_unary(UnOp::Not, unary(), loc);
    return postfix();
  }

  ExprPtr postfix() {
    const Token& t = cur();
    SourceLoc loc = t.loc;
    if (t.kind == Tok::Number) {
      next();
      return make_int(literal(false, t), loc);
    }
    if (accept(Tok::LParen)) {
      ExprPtr e = expression();
      expect(Tok::RParen);
      return e;
    }
    if (t.kind == Tok::KwInput || t.kind == Tok::KwInputArray) {
      throw ParseError(loc, "input() may only initialize a declaration");
    }
    std::string name = expect_ident();
    if (accept(Tok::LBracket)) {
      ExprPtr idx = expression();
      expect(Tok::RBracket);
      return make_index(std::move(name), std::move(idx), loc);
    }
    if (accept(Tok::LParen)) {
      std::vector<ExprPtr> args;
      if (!at(Tok::RParen)) {
        do {
          args.push_back(expression());
        } while (accept(Tok::Comma));
      }
      expect(Tok::RParen);
      return make_call(std::move(name), std::move(args), loc);
    }
    return make_var(std::move(name), loc);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

}  // namespace

Ast parse_ast(const std::string& source) {
  Lexer lexer(source);
  Parser parser(lexer.run());
  return parser.program();
}

Program parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace dse::lang
