#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "kintegra/expr.hpp"

using kintegra::Expr;
using kintegra::ParseError;

namespace {

double eval(const std::string& src, std::vector<double> x = {}) {
  return Expr::parse(src).eval(x);
}

}  // namespace

TEST_CASE("numbers, variables and arithmetic") {
  CHECK(eval("2") == 2.0);
  CHECK(eval("2.5e1") == 25.0);
  CHECK(eval("x1", {4.0}) == 4.0);
  CHECK(eval("x2 - x1", {1.0, 10.0}) == 9.0);
  CHECK(eval("1 + 2*3") == 7.0);
  CHECK(eval("(1 + 2)*3") == 9.0);
  CHECK(eval("8 / 4 / 2") == 1.0);  // left associative
  CHECK(eval("1 - 2 - 3") == -4.0);
}

TEST_CASE("powers bind tighter than unary minus and take integer exponents") {
  CHECK(eval("-x1^2", {3.0}) == -9.0);
  CHECK(eval("(-x1)^2", {3.0}) == 9.0);
  CHECK(eval("x1^-2", {2.0}) == 0.25);
  CHECK(eval("2^10") == 1024.0);
  CHECK(eval("x1^0", {5.0}) == 1.0);
  CHECK_THROWS_AS(Expr::parse("x1^2.5"), ParseError);
  CHECK_THROWS_AS(Expr::parse("x1^x2"), ParseError);
}

TEST_CASE("functions") {
  CHECK(eval("sin(0)") == 0.0);
  CHECK(eval("cos(0)") == 1.0);
  CHECK(eval("exp(0)") == 1.0);
  CHECK(eval("log(1)") == 0.0);
  CHECK(eval("sqrt(x1)", {16.0}) == 4.0);
  CHECK(eval("sin(x1)^2 + cos(x1)^2", {0.7}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("whitespace is free") {
  CHECK(eval("  1+ 2 *  x1 ", {3.0}) == 7.0);
}

TEST_CASE("parse errors carry byte offsets") {
  auto offset_of = [](const std::string& src) {
    try {
      Expr::parse(src);
    } catch (const ParseError& e) {
      return e.offset;
    }
    return static_cast<std::size_t>(-1);
  };
  CHECK(offset_of("1 + ") == 4);
  CHECK(offset_of("foo(1)") == 0);
  CHECK(offset_of("1 + bar(2)") == 4);
  CHECK(offset_of("x0") == 0);   // indices are 1-based
  CHECK(offset_of("(1 + 2") == 6);
  CHECK(offset_of("1 ) 2") == 2);
  CHECK(offset_of("1 + @") == 4);

  try {
    Expr::parse("x0");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("1-based") != std::string::npos);
    CHECK(std::string(e.what()).find("offset 0") != std::string::npos);
  }
}

TEST_CASE("str round-trips to an identical tree") {
  const char* cases[] = {
      "1 + 2*x1",          "-x1^2 + sin(x2)",       "(x1 + x2)*(x1 - x2)",
      "sqrt(x1^2 + x2^2)", "x1/x2/x3",              "1 - (2 - 3)",
      "-(x1 + 1)",         "exp(-x1^2)*cos(2*x2)",  "x1^-3",
  };
  for (const char* src : cases) {
    Expr e = Expr::parse(src);
    Expr round = Expr::parse(e.str());
    CHECK(e.same_tree(round));
  }
}

TEST_CASE("max_var_index sees through nesting") {
  CHECK(Expr::parse("1 + 2").max_var_index() == 0);
  CHECK(Expr::parse("x3").max_var_index() == 3);
  CHECK(Expr::parse("sin(x2) + x5*x1").max_var_index() == 5);
}

TEST_CASE("eval rejects too-few coordinates") {
  Expr e = Expr::parse("x3");
  std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(e.eval(two), std::invalid_argument);
}

TEST_CASE("default-constructed expression is empty") {
  Expr e;
  CHECK(e.empty());
  CHECK_FALSE(Expr::parse("1").empty());
}
