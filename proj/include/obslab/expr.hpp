#pragma once

// Closed-form expression grammar for coefficient, obstacle and boundary
// functions: constants, pi, coordinates x1/x2, + - * /, sin, cos, exp.
// Expressions carry exact symbolic partial derivatives so that mixed
// x-xi integrand derivatives and obstacle Hessian bounds never rely on
// numerical differentiation of the coefficient.

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "obslab/core.hpp"

namespace obslab {

class ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

enum class ExprOp { Const, Coord, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp };

class ExprNode {
 public:
  ExprOp op;
  double value = 0.0;  // Const
  int axis = 0;        // Coord
  ExprPtr lhs, rhs;

  static ExprPtr constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Const;
    n->value = v;
    return n;
  }
  static ExprPtr coord(int axis) {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Coord;
    n->axis = axis;
    return n;
  }
  static ExprPtr unary(ExprOp op, ExprPtr a) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->lhs = std::move(a);
    return n;
  }
  static ExprPtr binary(ExprOp op, ExprPtr a, ExprPtr b) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  double eval(const Vec& x) const {
    switch (op) {
      case ExprOp::Const: return value;
      case ExprOp::Coord: return x[axis];
      case ExprOp::Add: return lhs->eval(x) + rhs->eval(x);
      case ExprOp::Sub: return lhs->eval(x) - rhs->eval(x);
      case ExprOp::Mul: return lhs->eval(x) * rhs->eval(x);
      case ExprOp::Div: return lhs->eval(x) / rhs->eval(x);
      case ExprOp::Neg: return -lhs->eval(x);
      case ExprOp::Sin: return std::sin(lhs->eval(x));
      case ExprOp::Cos: return std::cos(lhs->eval(x));
      case ExprOp::Exp: return std::exp(lhs->eval(x));
    }
    return 0.0;
  }
};

namespace expr_detail {

inline bool is_const(const ExprPtr& e, double v) {
  return e->op == ExprOp::Const && e->value == v;
}

// Light constant folding keeps derivative trees small.
inline ExprPtr add(ExprPtr a, ExprPtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->op == ExprOp::Const && b->op == ExprOp::Const)
    return ExprNode::constant(a->value + b->value);
  return ExprNode::binary(ExprOp::Add, std::move(a), std::move(b));
}
inline ExprPtr sub(ExprPtr a, ExprPtr b) {
  if (is_const(b, 0.0)) return a;
  if (a->op == ExprOp::Const && b->op == ExprOp::Const)
    return ExprNode::constant(a->value - b->value);
  return ExprNode::binary(ExprOp::Sub, std::move(a), std::move(b));
}
inline ExprPtr mul(ExprPtr a, ExprPtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return ExprNode::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->op == ExprOp::Const && b->op == ExprOp::Const)
    return ExprNode::constant(a->value * b->value);
  return ExprNode::binary(ExprOp::Mul, std::move(a), std::move(b));
}
inline ExprPtr div(ExprPtr a, ExprPtr b) {
  if (is_const(a, 0.0)) return ExprNode::constant(0.0);
  if (is_const(b, 1.0)) return a;
  return ExprNode::binary(ExprOp::Div, std::move(a), std::move(b));
}
inline ExprPtr neg(ExprPtr a) {
  if (a->op == ExprOp::Const) return ExprNode::constant(-a->value);
  return ExprNode::unary(ExprOp::Neg, std::move(a));
}

}  // namespace expr_detail

/// Exact partial derivative with respect to coordinate `axis`.
inline ExprPtr differentiate(const ExprPtr& e, int axis) {
  using namespace expr_detail;
  switch (e->op) {
    case ExprOp::Const: return ExprNode::constant(0.0);
    case ExprOp::Coord: return ExprNode::constant(e->axis == axis ? 1.0 : 0.0);
    case ExprOp::Add: return add(differentiate(e->lhs, axis), differentiate(e->rhs, axis));
    case ExprOp::Sub: return sub(differentiate(e->lhs, axis), differentiate(e->rhs, axis));
    case ExprOp::Mul:
      return add(mul(differentiate(e->lhs, axis), e->rhs),
                 mul(e->lhs, differentiate(e->rhs, axis)));
    case ExprOp::Div:
      return div(sub(mul(differentiate(e->lhs, axis), e->rhs),
                     mul(e->lhs, differentiate(e->rhs, axis))),
                 mul(e->rhs, e->rhs));
    case ExprOp::Neg: return neg(differentiate(e->lhs, axis));
    case ExprOp::Sin:
      return mul(ExprNode::unary(ExprOp::Cos, e->lhs), differentiate(e->lhs, axis));
    case ExprOp::Cos:
      return neg(mul(ExprNode::unary(ExprOp::Sin, e->lhs), differentiate(e->lhs, axis)));
    case ExprOp::Exp:
      return mul(ExprNode::unary(ExprOp::Exp, e->lhs), differentiate(e->lhs, axis));
  }
  return ExprNode::constant(0.0);
}

class ExprParseError : public std::runtime_error {
 public:
  ExprParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")") {}
};

namespace expr_detail {

class Parser {
 public:
  explicit Parser(std::string src) : src_(std::move(src)) {}

  ExprPtr parse() {
    ExprPtr e = expression();
    skip_space();
    if (pos_ != src_.size()) throw ExprParseError("trailing input", pos_);
    return e;
  }

 private:
  std::string src_;
  std::size_t pos_ = 0;

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_space();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  ExprPtr expression() {
    ExprPtr e = term();
    for (;;) {
      if (eat('+'))
        e = ExprNode::binary(ExprOp::Add, e, term());
      else if (eat('-'))
        e = ExprNode::binary(ExprOp::Sub, e, term());
      else
        return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = factor();
    for (;;) {
      if (eat('*'))
        e = ExprNode::binary(ExprOp::Mul, e, factor());
      else if (eat('/'))
        e = ExprNode::binary(ExprOp::Div, e, factor());
      else
        return e;
    }
  }

  ExprPtr factor() {
    if (eat('-')) return ExprNode::unary(ExprOp::Neg, factor());
    if (eat('+')) return factor();
    return primary();
  }

  ExprPtr primary() {
    skip_space();
    if (pos_ >= src_.size()) throw ExprParseError("unexpected end of expression", pos_);
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (eat('(')) {
      ExprPtr e = expression();
      if (!eat(')')) throw ExprParseError("expected ')'", pos_);
      return e;
    }
    throw ExprParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  ExprPtr number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
            src_[pos_] == 'e' || src_[pos_] == 'E' ||
            ((src_[pos_] == '+' || src_[pos_] == '-') && pos_ > start &&
             (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E'))))
      ++pos_;
    try {
      std::size_t used = 0;
      double v = std::stod(src_.substr(start, pos_ - start), &used);
      if (used != pos_ - start) throw ExprParseError("malformed number", start);
      return ExprNode::constant(v);
    } catch (const std::logic_error&) {
      throw ExprParseError("malformed number", start);
    }
  }

  ExprPtr identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name = src_.substr(start, pos_ - start);
    if (name == "pi") return ExprNode::constant(std::numbers::pi);
    if (name == "x1" || name == "x") return ExprNode::coord(0);
    if (name == "x2" || name == "y") return ExprNode::coord(1);
    if (name == "sin" || name == "cos" || name == "exp") {
      if (!eat('(')) throw ExprParseError("expected '(' after " + name, pos_);
      ExprPtr arg = expression();
      if (!eat(')')) throw ExprParseError("expected ')'", pos_);
      ExprOp op = name == "sin" ? ExprOp::Sin : name == "cos" ? ExprOp::Cos : ExprOp::Exp;
      return ExprNode::unary(op, arg);
    }
    throw ExprParseError("unknown identifier '" + name + "'", start);
  }
};

}  // namespace expr_detail

inline ExprPtr parse_expr(const std::string& src) {
  return expr_detail::Parser(src).parse();
}

inline std::string expr_to_string(const ExprPtr& e) {
  std::ostringstream os;
  os.precision(17);  // constants must survive a parse round trip
  switch (e->op) {
    case ExprOp::Const: os << e->value; break;
    case ExprOp::Coord: os << "x" << (e->axis + 1); break;
    case ExprOp::Add: os << "(" << expr_to_string(e->lhs) << " + " << expr_to_string(e->rhs) << ")"; break;
    case ExprOp::Sub: os << "(" << expr_to_string(e->lhs) << " - " << expr_to_string(e->rhs) << ")"; break;
    case ExprOp::Mul: os << "(" << expr_to_string(e->lhs) << " * " << expr_to_string(e->rhs) << ")"; break;
    case ExprOp::Div: os << "(" << expr_to_string(e->lhs) << " / " << expr_to_string(e->rhs) << ")"; break;
    case ExprOp::Neg: os << "(-" << expr_to_string(e->lhs) << ")"; break;
    case ExprOp::Sin: os << "sin(" << expr_to_string(e->lhs) << ")"; break;
    case ExprOp::Cos: os << "cos(" << expr_to_string(e->lhs) << ")"; break;
    case ExprOp::Exp: os << "exp(" << expr_to_string(e->lhs) << ")"; break;
  }
  return os.str();
}

}  // namespace obslab
