#include "stocs/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <optional>

#include "stocs/error.hpp"

namespace stocs {

Expr Expr::integer(std::int64_t value) {
  Expr e;
  e.op = ExprOp::IntLiteral;
  e.literal = value;
  return e;
}

Expr Expr::variable(std::string name) {
  Expr e;
  e.op = ExprOp::VariableRef;
  e.name = std::move(name);
  return e;
}

Expr Expr::unary(ExprOp op, Expr operand) {
  Expr e;
  e.op = op;
  e.children.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(ExprOp op, Expr lhs, Expr rhs) {
  Expr e;
  e.op = op;
  e.children.push_back(std::move(lhs));
  e.children.push_back(std::move(rhs));
  return e;
}

namespace {

enum class Tok { Int, Ident, And, Or, Not, Plus, Minus, Star, LParen, RParen, Cmp, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t pos = 0;
  std::string_view text;
  std::int64_t value = 0;
  ExprOp cmp = ExprOp::Eq;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.pos = pos_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      t.kind = Tok::Int;
      t.text = src_.substr(start, pos_ - start);
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
      if (ec != std::errc()) fail(start, "integer literal out of range");
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      t.text = src_.substr(start, pos_ - start);
      if (t.text == "and") t.kind = Tok::And;
      else if (t.text == "or") t.kind = Tok::Or;
      else if (t.text == "not") t.kind = Tok::Not;
      else t.kind = Tok::Ident;
      return t;
    }
    ++pos_;
    switch (c) {
      case '+': t.kind = Tok::Plus; return t;
      case '-': t.kind = Tok::Minus; return t;
      case '*': t.kind = Tok::Star; return t;
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case '=': t.kind = Tok::Cmp; t.cmp = ExprOp::Eq; return t;
      case '!':
        if (pos_ < src_.size() && src_[pos_] == '=') {
          ++pos_;
          t.kind = Tok::Cmp;
          t.cmp = ExprOp::Ne;
          return t;
        }
        break;
      case '<':
      case '>': {
        bool eq = pos_ < src_.size() && src_[pos_] == '=';
        if (eq) ++pos_;
        t.kind = Tok::Cmp;
        t.cmp = c == '<' ? (eq ? ExprOp::Le : ExprOp::Lt) : (eq ? ExprOp::Ge : ExprOp::Gt);
        return t;
      }
      default:
        break;
    }
    fail(t.pos, std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] static void fail(std::size_t pos, const std::string& what) {
    throw Error(ErrorCode::SyntaxError, what + " at position " + std::to_string(pos));
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  Expr parse() {
    Expr e = parse_or();
    if (cur_.kind != Tok::End) Lexer::fail(cur_.pos, "unexpected trailing input");
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (cur_.kind == Tok::Or) {
      advance();
      lhs = Expr::binary(ExprOp::Or, std::move(lhs), parse_and());
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_not();
    while (cur_.kind == Tok::And) {
      advance();
      lhs = Expr::binary(ExprOp::And, std::move(lhs), parse_not());
    }
    return lhs;
  }

  Expr parse_not() {
    if (cur_.kind == Tok::Not) {
      advance();
      return Expr::unary(ExprOp::Not, parse_not());
    }
    return parse_comparison();
  }

  Expr parse_comparison() {
    Expr lhs = parse_additive();
    if (cur_.kind != Tok::Cmp) return lhs;
    ExprOp op = cur_.cmp;
    advance();
    Expr rhs = parse_additive();
    if (cur_.kind == Tok::Cmp) {
      throw Error(ErrorCode::ChainedComparison,
                  "comparisons do not chain (position " + std::to_string(cur_.pos) + ")");
    }
    return Expr::binary(op, std::move(lhs), std::move(rhs));
  }

  Expr parse_additive() {
    Expr lhs = parse_multiplicative();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      ExprOp op = cur_.kind == Tok::Plus ? ExprOp::Add : ExprOp::Sub;
      advance();
      lhs = Expr::binary(op, std::move(lhs), parse_multiplicative());
    }
    return lhs;
  }

  Expr parse_multiplicative() {
    Expr lhs = parse_unary();
    while (cur_.kind == Tok::Star) {
      advance();
      lhs = Expr::binary(ExprOp::Mul, std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (cur_.kind == Tok::Minus) {
      advance();
      // "-7" is a negative literal so that printed literals reparse unchanged.
      if (cur_.kind == Tok::Int) {
        Expr lit = Expr::integer(-cur_.value);
        advance();
        return lit;
      }
      return Expr::unary(ExprOp::Neg, parse_unary());
    }
    return parse_atom();
  }

  Expr parse_atom() {
    switch (cur_.kind) {
      case Tok::Int: {
        Expr e = Expr::integer(cur_.value);
        advance();
        return e;
      }
      case Tok::Ident: {
        Expr e = Expr::variable(std::string(cur_.text));
        advance();
        return e;
      }
      case Tok::LParen: {
        advance();
        Expr e = parse_or();
        if (cur_.kind != Tok::RParen) Lexer::fail(cur_.pos, "expected ')'");
        advance();
        return e;
      }
      case Tok::End:
        Lexer::fail(cur_.pos, "unexpected end of expression");
      default:
        Lexer::fail(cur_.pos, "unexpected token");
    }
  }

  Lexer lexer_;
  Token cur_;
};

int precedence(const Expr& e) {
  switch (e.op) {
    case ExprOp::Or: return 1;
    case ExprOp::And: return 2;
    case ExprOp::Not: return 3;
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge: return 4;
    case ExprOp::Add:
    case ExprOp::Sub: return 5;
    case ExprOp::Mul: return 6;
    case ExprOp::Neg: return 7;
    case ExprOp::IntLiteral: return e.literal < 0 ? 7 : 8;
    case ExprOp::VariableRef: return 8;
  }
  return 8;
}

std::string_view symbol(ExprOp op) {
  switch (op) {
    case ExprOp::Add: return " + ";
    case ExprOp::Sub: return " - ";
    case ExprOp::Mul: return "*";
    case ExprOp::Eq: return " = ";
    case ExprOp::Ne: return " != ";
    case ExprOp::Lt: return " < ";
    case ExprOp::Le: return " <= ";
    case ExprOp::Gt: return " > ";
    case ExprOp::Ge: return " >= ";
    case ExprOp::And: return " and ";
    case ExprOp::Or: return " or ";
    default: return "";
  }
}

void render(const Expr& e, int min_prec, std::string& out) {
  int prec = precedence(e);
  bool paren = prec < min_prec;
  if (paren) out += '(';
  switch (e.op) {
    case ExprOp::IntLiteral:
      out += std::to_string(e.literal);
      break;
    case ExprOp::VariableRef:
      out += e.name;
      break;
    case ExprOp::Neg:
      out += '-';
      // A literal operand is always grouped: "-3" would reparse as a literal.
      render(e.children[0], e.children[0].op == ExprOp::IntLiteral ? 9 : prec, out);
      break;
    case ExprOp::Not:
      out += "not ";
      render(e.children[0], prec, out);
      break;
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge:
      render(e.children[0], prec + 1, out);
      out += symbol(e.op);
      render(e.children[1], prec + 1, out);
      break;
    default:
      render(e.children[0], prec, out);
      out += symbol(e.op);
      render(e.children[1], prec + 1, out);
      break;
  }
  if (paren) out += ')';
}

void collect_names(const Expr& e, std::vector<std::string>& out) {
  if (e.op == ExprOp::VariableRef) {
    if (std::find(out.begin(), out.end(), e.name) == out.end()) out.push_back(e.name);
    return;
  }
  for (const auto& c : e.children) collect_names(c, out);
}

void expect(const Expr& e, ExprType want) {
  if (type_of(e) != want) {
    throw Error(ErrorCode::TypeError,
                "expected " + std::string(want == ExprType::Integer ? "integer" : "boolean") +
                    " operand in '" + to_string(e) + "'");
  }
}

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Expr& expr) {
  std::string out;
  render(expr, 0, out);
  return out;
}

ExprType type_of(const Expr& e) {
  switch (e.op) {
    case ExprOp::IntLiteral:
    case ExprOp::VariableRef:
      return ExprType::Integer;
    case ExprOp::Neg:
      expect(e.children[0], ExprType::Integer);
      return ExprType::Integer;
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
      expect(e.children[0], ExprType::Integer);
      expect(e.children[1], ExprType::Integer);
      return ExprType::Integer;
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge:
      expect(e.children[0], ExprType::Integer);
      expect(e.children[1], ExprType::Integer);
      return ExprType::Boolean;
    case ExprOp::Not:
      expect(e.children[0], ExprType::Boolean);
      return ExprType::Boolean;
    case ExprOp::And:
    case ExprOp::Or:
      expect(e.children[0], ExprType::Boolean);
      expect(e.children[1], ExprType::Boolean);
      return ExprType::Boolean;
  }
  return ExprType::Integer;
}

std::vector<std::string> referenced_names(const Expr& expr) {
  std::vector<std::string> names;
  collect_names(expr, names);
  return names;
}

std::int64_t evaluate(const Expr& e, std::span<const int> values) {
  auto arg = [&](std::size_t i) { return evaluate(e.children[i], values); };
  switch (e.op) {
    case ExprOp::IntLiteral: return e.literal;
    case ExprOp::VariableRef: return values[static_cast<std::size_t>(e.slot)];
    case ExprOp::Add: return arg(0) + arg(1);
    case ExprOp::Sub: return arg(0) - arg(1);
    case ExprOp::Mul: return arg(0) * arg(1);
    case ExprOp::Neg: return -arg(0);
    case ExprOp::Eq: return arg(0) == arg(1);
    case ExprOp::Ne: return arg(0) != arg(1);
    case ExprOp::Lt: return arg(0) < arg(1);
    case ExprOp::Le: return arg(0) <= arg(1);
    case ExprOp::Gt: return arg(0) > arg(1);
    case ExprOp::Ge: return arg(0) >= arg(1);
    case ExprOp::And: return arg(0) != 0 && arg(1) != 0;
    case ExprOp::Or: return arg(0) != 0 || arg(1) != 0;
    case ExprOp::Not: return arg(0) == 0;
  }
  return 0;
}

}  // namespace stocs
