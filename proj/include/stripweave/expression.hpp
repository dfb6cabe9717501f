#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <string_view>

#include "stripweave/dual.hpp"
#include "stripweave/errors.hpp"

namespace stripweave {

enum class ExprKind { Constant, Variable, Unary, Binary };
enum class UnaryOp { Neg, Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// Immutable expression tree node over the variables u1 (index 0) and u2 (index 1).
struct ExprNode {
  ExprKind kind = ExprKind::Constant;
  double value = 0.0;
  int variable = 0;
  UnaryOp unary = UnaryOp::Neg;
  BinaryOp binary = BinaryOp::Add;
  bool has_variables = false;
  Expr lhs;
  Expr rhs;
};

Expr make_constant(double value);
Expr make_variable(int index);
Expr make_unary(UnaryOp op, Expr arg);
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs);

/// Parses one arithmetic expression. Error offsets are reported relative to
/// `base_offset` so callers can point into a larger document.
Expr parse_expression(std::string_view text, std::size_t base_offset = 0);

/// Fully parenthesized text form; parse_expression(to_string(e)) evaluates
/// bit-identically to e.
std::string to_string(const Expr& expr);

inline bool depends_on_variables(const ExprNode& node) { return node.has_variables; }

namespace detail {

inline bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

template <typename Scalar>
Scalar power(const Scalar& base, const ExprNode& exponent_node, const Scalar& exponent) {
  using std::exp;
  using std::log;
  using std::pow;
  const double b = value_of(base);
  if (!depends_on_variables(exponent_node)) {
    const double n = value_of(exponent);
    if (b < 0.0 && !is_integer(n)) {
      throw DomainError("negative base raised to non-integer power");
    }
    return pow(base, n);
  }
  if (b <= 0.0) {
    throw DomainError("variable exponent requires a positive base");
  }
  return exp(exponent * log(base));
}

}  // namespace detail

/// Evaluates the tree with any scalar supporting the usual arithmetic and
/// elementary functions (double, Dual2).
template <typename Scalar>
Scalar evaluate(const ExprNode& node, const Scalar& u1, const Scalar& u2) {
  using std::abs;
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  using std::tan;
  using std::tanh;
  switch (node.kind) {
    case ExprKind::Constant:
      return Scalar(node.value);
    case ExprKind::Variable:
      return node.variable == 0 ? u1 : u2;
    case ExprKind::Unary: {
      const Scalar a = evaluate(*node.lhs, u1, u2);
      switch (node.unary) {
        case UnaryOp::Neg: return -a;
        case UnaryOp::Sin: return sin(a);
        case UnaryOp::Cos: return cos(a);
        case UnaryOp::Tan: return tan(a);
        case UnaryOp::Sinh: return sinh(a);
        case UnaryOp::Cosh: return cosh(a);
        case UnaryOp::Tanh: return tanh(a);
        case UnaryOp::Exp: return exp(a);
        case UnaryOp::Log:
          if (value_of(a) <= 0.0) throw DomainError("log of non-positive value");
          return log(a);
        case UnaryOp::Sqrt:
          if (value_of(a) < 0.0) throw DomainError("sqrt of negative value");
          return sqrt(a);
        case UnaryOp::Abs: return abs(a);
      }
      break;
    }
    case ExprKind::Binary: {
      const Scalar a = evaluate(*node.lhs, u1, u2);
      const Scalar b = evaluate(*node.rhs, u1, u2);
      switch (node.binary) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return a / b;
        case BinaryOp::Pow: return detail::power(a, *node.rhs, b);
      }
      break;
    }
  }
  throw Error("corrupt expression node");
}

inline double evaluate(const Expr& expr, double u1, double u2) { return evaluate<double>(*expr, u1, u2); }

}  // namespace stripweave
