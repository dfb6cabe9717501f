#include "stripweave/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <numbers>
#include <utility>

namespace stripweave {

Expr make_constant(double value) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Constant;
  node->value = value;
  return node;
}

Expr make_variable(int index) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Variable;
  node->variable = index;
  node->has_variables = true;
  return node;
}

Expr make_unary(UnaryOp op, Expr arg) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Unary;
  node->unary = op;
  node->has_variables = arg->has_variables;
  node->lhs = std::move(arg);
  return node;
}

Expr make_binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Binary;
  node->binary = op;
  node->has_variables = lhs->has_variables || rhs->has_variables;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

namespace {

struct FunctionName {
  std::string_view name;
  UnaryOp op;
};

constexpr std::array<FunctionName, 10> kFunctions{{
    {"sin", UnaryOp::Sin},
    {"cos", UnaryOp::Cos},
    {"tan", UnaryOp::Tan},
    {"sinh", UnaryOp::Sinh},
    {"cosh", UnaryOp::Cosh},
    {"tanh", UnaryOp::Tanh},
    {"exp", UnaryOp::Exp},
    {"log", UnaryOp::Log},
    {"sqrt", UnaryOp::Sqrt},
    {"abs", UnaryOp::Abs},
}};

// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | u1 | u2 | pi | e | func '(' sum ')' | '(' sum ')'
class Parser {
 public:
  Parser(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  Expr parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty expression", base_ + pos_);
    Expr e = sum();
    skip_space();
    if (pos_ != text_.size()) {
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", base_ + pos_);
    }
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw ParseError(std::string("expected '") + c + "'", base_ + pos_);
    }
  }

  Expr sum() {
    Expr lhs = product();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(BinaryOp::Add, lhs, product());
      } else if (accept('-')) {
        lhs = make_binary(BinaryOp::Sub, lhs, product());
      } else {
        return lhs;
      }
    }
  }

  Expr product() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(BinaryOp::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_binary(BinaryOp::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return make_unary(UnaryOp::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return make_binary(BinaryOp::Pow, base, unary());
    return base;
  }

  Expr primary() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("unexpected end of expression", base_ + pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", base_ + pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      // Exponent only if followed by digits (optionally signed); otherwise 'e' is Euler's number
      // and the juxtaposition is a syntax error caught by the caller.
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", base_ + start);
    return make_constant(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view id = text_.substr(start, pos_ - start);
    if (id == "u1") return make_variable(0);
    if (id == "u2") return make_variable(1);
    if (id == "pi") return make_constant(std::numbers::pi);
    if (id == "e") return make_constant(std::numbers::e);
    for (const auto& f : kFunctions) {
      if (f.name == id) {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != '(') {
          throw ParseError("function '" + std::string(id) + "' requires an argument list", base_ + pos_);
        }
        ++pos_;
        Expr arg = sum();
        expect(')');
        return make_unary(f.op, arg);
      }
    }
    throw ParseError("unknown identifier '" + std::string(id) + "'", base_ + start);
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

std::string_view unary_name(UnaryOp op) {
  for (const auto& f : kFunctions) {
    if (f.op == op) return f.name;
  }
  return "neg";
}

char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

}  // namespace

Expr parse_expression(std::string_view text, std::size_t base_offset) {
  return Parser(text, base_offset).parse();
}

std::string to_string(const Expr& expr) {
  const ExprNode& n = *expr;
  switch (n.kind) {
    case ExprKind::Constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", std::abs(n.value));
      return std::signbit(n.value) ? "(-" + std::string(buf) + ")" : std::string(buf);
    }
    case ExprKind::Variable:
      return n.variable == 0 ? "u1" : "u2";
    case ExprKind::Unary:
      if (n.unary == UnaryOp::Neg) return "(-" + to_string(n.lhs) + ")";
      return std::string(unary_name(n.unary)) + "(" + to_string(n.lhs) + ")";
    case ExprKind::Binary:
      return "(" + to_string(n.lhs) + " " + binary_symbol(n.binary) + " " + to_string(n.rhs) + ")";
  }
  return {};
}

}  // namespace stripweave
