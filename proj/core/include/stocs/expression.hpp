#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stocs {

enum class ExprOp {
  IntLiteral,
  VariableRef,
  Add,
  Sub,
  Mul,
  Neg,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
  Not,
};

enum class ExprType { Integer, Boolean };

/// Expression tree used by expression constraints and objectives.
///
/// `slot` is the index of the referenced variable in the owning instance's
/// order; it is -1 until the expression has been bound by validation.
struct Expr {
  ExprOp op = ExprOp::IntLiteral;
  std::int64_t literal = 0;
  std::string name;
  int slot = -1;
  std::vector<Expr> children;

  static Expr integer(std::int64_t value);
  static Expr variable(std::string name);
  static Expr unary(ExprOp op, Expr operand);
  static Expr binary(ExprOp op, Expr lhs, Expr rhs);

  bool operator==(const Expr&) const = default;
};

/// Parses the constraint/objective expression grammar. Precedence from
/// lowest to highest: or, and, not, comparison (non-associative),
/// additive, multiplicative, unary minus, atoms.
Expr parse_expression(std::string_view text);

/// Renders with the minimum parentheses needed to reparse to the same tree.
std::string to_string(const Expr& expr);

/// Throws TypeError when an operator receives the wrong kind of operand.
ExprType type_of(const Expr& expr);

/// Distinct variable names in order of first appearance.
std::vector<std::string> referenced_names(const Expr& expr);

/// Evaluates a bound expression against a value vector indexed by slot.
/// Booleans evaluate to 0/1.
std::int64_t evaluate(const Expr& expr, std::span<const int> values);

}  // namespace stocs
