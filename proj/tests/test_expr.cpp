#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "obslab/expr.hpp"

using namespace obslab;

namespace {
double ev(const std::string& s, double x1, double x2 = 0.0) {
  return parse_expr(s)->eval(Vec{x1, x2});
}
}  // namespace

TEST_CASE("literals and constants") {
  CHECK(ev("3", 0) == 3.0);
  CHECK(ev("2.5e-3", 0) == 2.5e-3);
  CHECK(ev("pi", 0) == Catch::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(ev("1", 123.0) == 1.0);
}

TEST_CASE("coordinates and aliases") {
  CHECK(ev("x1", 0.25, 0.75) == 0.25);
  CHECK(ev("x2", 0.25, 0.75) == 0.75);
  CHECK(ev("x", 0.25, 0.75) == 0.25);   // alias for x1
  CHECK(ev("y", 0.25, 0.75) == 0.75);   // alias for x2
}

TEST_CASE("arithmetic and precedence") {
  CHECK(ev("1 + 2*3", 0) == 7.0);
  CHECK(ev("(1 + 2)*3", 0) == 9.0);
  CHECK(ev("2 - 3 - 4", 0) == -5.0);  // left associative
  CHECK(ev("12/4/3", 0) == 1.0);
  CHECK(ev("-x1*x1", 2.0) == -4.0);   // unary minus binds the factor
  CHECK(ev("3 - -2", 0) == 5.0);
}

TEST_CASE("functions") {
  CHECK(ev("sin(pi/2)", 0) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(ev("cos(0)", 0) == 1.0);
  CHECK(ev("exp(1)", 0) == Catch::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(ev("sin(x1)*cos(x2)", 0.3, 0.7) ==
        Catch::Approx(std::sin(0.3) * std::cos(0.7)).epsilon(1e-15));
}

TEST_CASE("a shipped coefficient expression") {
  const double x1 = 0.2, x2 = 0.6;
  CHECK(ev("1 + 0.5*sin(2*pi*x1)*sin(2*pi*x2)", x1, x2) ==
        Catch::Approx(1.0 + 0.5 * std::sin(2 * std::numbers::pi * x1) *
                                std::sin(2 * std::numbers::pi * x2))
            .epsilon(1e-15));
}

TEST_CASE("parse errors carry a position") {
  CHECK_THROWS_AS(parse_expr(""), ExprParseError);
  CHECK_THROWS_AS(parse_expr("1 +"), ExprParseError);
  CHECK_THROWS_AS(parse_expr("sin(1"), ExprParseError);
  CHECK_THROWS_AS(parse_expr("bogus(2)"), ExprParseError);
  CHECK_THROWS_AS(parse_expr("1 2"), ExprParseError);
  try {
    parse_expr("1 + @");
    FAIL("expected a parse error");
  } catch (const ExprParseError& e) {
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

TEST_CASE("symbolic differentiation against central differences") {
  const std::vector<std::string> exprs = {
      "x1*x1 + 3*x2",
      "sin(2*pi*x1)*cos(x2)",
      "exp(x1*x2)",
      "1/(1 + x1*x1)",
      "0.5 - (x1*x1 + x2*x2)",
      "exp(sin(x1) + x2/3) - x1*cos(x2*x2)",
  };
  const Vec pts[] = {{0.3, -0.4}, {-0.9, 0.1}, {0.0, 0.0}, {0.7, 0.7}};
  const double d = 1e-6;
  for (const std::string& s : exprs) {
    ExprPtr e = parse_expr(s);
    for (int axis = 0; axis < 2; ++axis) {
      ExprPtr de = differentiate(e, axis);
      for (const Vec& x : pts) {
        Vec xp = x, xm = x;
        xp[axis] += d;
        xm[axis] -= d;
        const double fd = (e->eval(xp) - e->eval(xm)) / (2 * d);
        CHECK(de->eval(x) == Catch::Approx(fd).margin(1e-8));
      }
    }
  }
}

TEST_CASE("derivative of a constant folds to zero") {
  ExprPtr z = differentiate(parse_expr("pi*3 + 2"), 0);
  CHECK(z->eval(Vec{1.0, 2.0}) == 0.0);
  CHECK(expr_to_string(z) == "0");
}

TEST_CASE("round trip through expr_to_string") {
  for (const std::string& s :
       {"1 + 0.5*sin(2*pi*x1)*sin(2*pi*x2)", "x1*x1 - x2/(1 + x2*x2)", "exp(-x1)"}) {
    ExprPtr e = parse_expr(s);
    ExprPtr r = parse_expr(expr_to_string(e));
    for (double a : {-0.8, 0.0, 0.37, 1.0})
      for (double b : {-0.5, 0.21, 0.9})
        CHECK(e->eval(Vec{a, b}) == Catch::Approx(r->eval(Vec{a, b})).epsilon(1e-14));
  }
}
