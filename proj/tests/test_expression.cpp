#include <gtest/gtest.h>

#include <cmath>

#include "curvglue/expression.hpp"

using namespace curvglue;

namespace {

Vec pt(double a, double b, double c) {
  Vec x(3);
  x << a, b, c;
  return x;
}

double eval(const std::string& s, const Vec& x = pt(0.5, -1.5, 2.0)) { return parse_expression(s, 3)(x); }

ParseError error_of(const std::string& s, int n = 3, int line = 1, int column = 1) {
  try {
    parse_expression(s, n, line, column);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for '" << s << "'";
  return ParseError("none", 0, 0);
}

}  // namespace

TEST(Expression, PrecedenceAndAssociativity) {
  EXPECT_EQ(eval("1 + 2 * 3"), 7.0);
  EXPECT_EQ(eval("(1 + 2) * 3"), 9.0);
  EXPECT_EQ(eval("8 / 4 / 2"), 1.0);
  EXPECT_EQ(eval("10 - 4 - 3"), 3.0);
  EXPECT_EQ(eval("2 ^ 3 ^ 2"), 512.0);
  EXPECT_EQ(eval("2 * 3 ^ 2"), 18.0);
}

TEST(Expression, UnaryOperators) {
  EXPECT_EQ(eval("-2 ^ 2"), -4.0);
  EXPECT_EQ(eval("-2 * 3"), -6.0);
  EXPECT_EQ(eval("-2 + 3"), 1.0);
  EXPECT_EQ(eval("2 ^ -1"), 0.5);
  EXPECT_EQ(eval("+3"), 3.0);
  EXPECT_EQ(eval("--3"), 3.0);
}

TEST(Expression, VariablesFunctionsAndConstants) {
  EXPECT_EQ(eval("x1"), 0.5);
  EXPECT_EQ(eval("x2"), -1.5);
  EXPECT_EQ(eval("xn"), 2.0);
  EXPECT_EQ(eval("(1 - xn)^2"), 1.0);
  EXPECT_NEAR(eval("sin(pi / 6)"), 0.5, 1e-15);
  EXPECT_NEAR(eval("cos(x1) ^ 2 + sin(x1) ^ 2"), 1.0, 1e-15);
  EXPECT_NEAR(eval("exp(log(3))"), 3.0, 1e-15);
  EXPECT_NEAR(eval("sqrt(16) + tan(0)"), 4.0, 1e-15);
  EXPECT_EQ(eval("1e-3 * 2.5E2"), 0.25);
  EXPECT_EQ(eval(".5"), 0.5);
}

TEST(Expression, MaxVariable) {
  EXPECT_EQ(parse_expression("1 + pi", 3).max_variable(), 0);
  EXPECT_EQ(parse_expression("x1 * x2", 3).max_variable(), 2);
  EXPECT_EQ(parse_expression("xn", 3).max_variable(), 3);
}

TEST(Expression, PrintRoundTrip) {
  const char* cases[] = {"1 + 2 * 3", "-x1 ^ 2 + sin(xn) / 3", "2 ^ 3 ^ 2", "(1 - xn)^2 * exp(-x2)", "0.1 + pi"};
  const Vec x = pt(0.3, 0.7, -0.2);
  for (const char* c : cases) {
    const Expression e = parse_expression(c, 3);
    const std::string p = e.print();
    const Expression back = parse_expression(p, 3);
    EXPECT_EQ(back.print(), p) << c;
    EXPECT_EQ(back(x), e(x)) << c;
  }
  EXPECT_EQ(parse_expression("1 + 2 * x1", 3).print(), "(1 + (2 * x1))");
}

TEST(Expression, ErrorsCarryLineAndColumn) {
  const ParseError unclosed = error_of("sin(x1");
  EXPECT_EQ(unclosed.line(), 1);
  EXPECT_EQ(unclosed.column(), 7);
  EXPECT_NE(std::string(unclosed.what()).find("line 1, column 7"), std::string::npos);

  const ParseError unknown = error_of("1 + x4");
  EXPECT_EQ(unknown.column(), 5);
  EXPECT_NE(unknown.detail().find("x4"), std::string::npos);

  EXPECT_EQ(error_of("2 $ 3").column(), 3);
  EXPECT_EQ(error_of("1.2.3").column(), 1);
  EXPECT_EQ(error_of("(1 + 2").column(), 7);
  EXPECT_EQ(error_of("1 +").column(), 4);
  EXPECT_EQ(error_of("1 2").column(), 3);
  EXPECT_EQ(error_of("foo(1)").column(), 1);
  EXPECT_EQ(error_of("sin 1").column(), 5);
  EXPECT_EQ(error_of("").column(), 1);

  const ParseError offset = error_of("x1 + )", 3, 12, 9);
  EXPECT_EQ(offset.line(), 12);
  EXPECT_EQ(offset.column(), 14);
}
