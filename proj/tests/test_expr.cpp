#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nashlab/expr.hpp"
#include "oracles.hpp"

using namespace nashlab;
namespace oracle = nashlab::testing;

TEST_CASE("parse fixture trees") {
  Expr e = parse_expr("x1*exp(x1)");
  REQUIRE(e->kind == ExprKind::Mul);
  CHECK(e->lhs->kind == ExprKind::Variable);
  CHECK(e->lhs->name == "x1");
  REQUIRE(e->rhs->kind == ExprKind::Exp);
  CHECK(e->rhs->lhs->name == "x1");

  // Constant subexpressions fold: (1+2i) is a single constant.
  Expr f = parse_expr("(1+2i)*x1^2");
  REQUIRE(f->kind == ExprKind::Mul);
  REQUIRE(f->lhs->kind == ExprKind::Constant);
  CHECK(f->lhs->value == Cx(1, 2));
  REQUIRE(f->rhs->kind == ExprKind::Pow);
  CHECK(f->rhs->exponent == 2);
  CHECK(f->rhs->lhs->name == "x1");
}

TEST_CASE("parse errors carry 1-based columns") {
  try {
    parse_expr("x1**");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position == 4);
  }

  try {
    parse_expr("x1 + y2", std::set<std::string>{"x1"});
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position == 6);
    CHECK(std::string(e.what()).find("y2") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_expr("exp x1"), ParseError);
  CHECK_THROWS_AS(parse_expr("(x1"), ParseError);
  CHECK_THROWS_AS(parse_expr("x1^-2"), ParseError);
  CHECK_THROWS_AS(parse_expr(""), ParseError);
}

TEST_CASE("grammar precedence") {
  // power > unary minus > mul/div > add/sub
  Expr e = parse_expr("-x1^2");
  REQUIRE(e->kind == ExprKind::Neg);
  CHECK(e->lhs->kind == ExprKind::Pow);

  Expr f = parse_expr("1-x1-x1");  // left associative
  REQUIRE(f->kind == ExprKind::Sub);
  CHECK(f->lhs->kind == ExprKind::Sub);

  Expr g = parse_expr("x1+x1*x1");
  REQUIRE(g->kind == ExprKind::Add);
  CHECK(g->rhs->kind == ExprKind::Mul);
}

TEST_CASE("expr_eval analytic fixtures") {
  Expr e = parse_expr("x1*exp(x1)");
  CHECK(std::abs(expr_eval(e, {{"x1", Cx(0, 0)}})) == 0.0);

  Cx at1 = expr_eval(e, {{"x1", Cx(1, 0)}});
  CHECK(std::abs(at1 - std::exp(1.0)) <= 1e-12 * std::exp(1.0));

  Cx ipi(0, M_PI);
  Cx atipi = expr_eval(e, {{"x1", ipi}});
  CHECK(std::abs(atipi - Cx(0, -M_PI)) <= 1e-12 * M_PI);
}

TEST_CASE("expr_eval errors") {
  CHECK_THROWS_AS(expr_eval(parse_expr("1/x1"), {{"x1", Cx(0, 0)}}), NumericError);
  CHECK_THROWS_AS(expr_eval(parse_expr("x1+x2"), {{"x1", Cx(1, 0)}}), NumericError);
}

TEST_CASE("taylor_truncate fixtures") {
  UniPoly t = taylor_truncate(parse_expr("exp(x1)"), Cx(0, 0), 2);
  REQUIRE(t.coeffs().size() == 3);
  CHECK(std::abs(t.coeffs()[0] - Cx(1, 0)) <= 1e-15);
  CHECK(std::abs(t.coeffs()[1] - Cx(1, 0)) <= 1e-15);
  CHECK(std::abs(t.coeffs()[2] - Cx(0.5, 0)) <= 1e-15);

  UniPoly xt = taylor_truncate(parse_expr("x1*exp(x1)"), Cx(0, 0), 3);
  CHECK(std::abs(xt.coeffs()[0]) == 0.0);
  CHECK(std::abs(xt.coeffs()[1] - Cx(1, 0)) <= 1e-15);
  CHECK(std::abs(xt.coeffs()[2] - Cx(1, 0)) <= 1e-15);
  CHECK(std::abs(xt.coeffs()[3] - Cx(0.5, 0)) <= 1e-15);

  UniPoly c = taylor_truncate(parse_expr("5"), Cx(0, 0), 4);
  CHECK(std::abs(c.coeffs()[0] - Cx(5, 0)) == 0.0);
  for (size_t k = 1; k < c.coeffs().size(); ++k) CHECK(std::abs(c.coeffs()[k]) == 0.0);
}

TEST_CASE("taylor_truncate error cases") {
  CHECK_THROWS_AS(taylor_truncate(parse_expr("1/x1"), Cx(0, 0), 3), NumericError);
  CHECK_THROWS_AS(taylor_truncate(parse_expr("x1+x2"), Cx(0, 0), 3), NumericError);
}

TEST_CASE("taylor remainder obeys the Cauchy estimate") {
  // |e - T_k| <= 2 * max_{|x|=R} |e| * (|x|/R)^{k+1} on |x| <= R/2.
  const double R = 1.0;
  for (const char* text : {"x1*exp(x1)", "exp(x1)", "1/(1+x1)"}) {
    Expr e = parse_expr(text);
    double m = 0.0;
    for (int i = 0; i < 256; ++i) {
      double th = 2.0 * M_PI * i / 256;
      m = std::max(m, std::abs(expr_eval(e, {{"x1", Cx(R * std::cos(th), R * std::sin(th))}})));
    }
    for (int k : {2, 5, 9}) {
      UniPoly t = taylor_truncate(e, Cx(0, 0), k);
      oracle::Rng rng(500 + k);
      for (int rep = 0; rep < 50; ++rep) {
        Cx x = 0.5 * R * rng.unit_disc();
        double err = std::abs(expr_eval(e, {{"x1", x}}) - t.eval(x));
        double bound = 2.0 * m * std::pow(std::abs(x) / R, k + 1);
        CHECK(err <= bound + 1e-14);
      }
    }
  }
}

namespace {

// Random trees in parsed normal form: constant folding cannot fire (binary
// arithmetic nodes always keep a variable on one side), so parse(print(t))
// must reproduce the tree exactly.
Expr random_tree(oracle::Rng& rng, int depth) {
  if (depth == 0) {
    if (rng.uniform() < 0.5) return make_var(rng.uniform() < 0.5 ? "x1" : "x2");
    return make_const(Cx(rng.uniform(-2, 2), rng.uniform(-2, 2)));
  }
  int pick = rng.uniform_int(0, 6);
  Expr var_side = random_tree(rng, depth - 1);
  if (var_side->kind == ExprKind::Constant) var_side = make_var("x1");
  switch (pick) {
    case 0: return make_add(var_side, random_tree(rng, depth - 1));
    case 1: return make_sub(var_side, random_tree(rng, depth - 1));
    case 2: return make_mul(var_side, random_tree(rng, depth - 1));
    case 3: return make_div(random_tree(rng, depth - 1), var_side);
    case 4: return make_pow(var_side, rng.uniform_int(0, 4));
    case 5: return make_exp(random_tree(rng, depth - 1));
    default: return make_neg(var_side);
  }
}

}  // namespace

TEST_CASE("print/parse round trip on 100 random trees") {
  oracle::Rng rng(501);
  for (int rep = 0; rep < 100; ++rep) {
    Expr t = random_tree(rng, rng.uniform_int(1, 6));
    Expr back = parse_expr(to_string(t));
    CHECK(expr_equal(t, back));
  }
}

TEST_CASE("expr_eval agrees with poly_eval on polynomial trees") {
  oracle::Rng rng(502);
  std::vector<std::string> vars{"x1", "x2"};
  for (int rep = 0; rep < 30; ++rep) {
    Expr t = parse_expr("(x1+2*x2)^2 - x1*x2 + 3");
    if (rep > 0) {
      // Mix in random polynomial trees too.
      t = make_add(make_mul(make_var("x1"), random_tree(rng, 2)), make_const(rng.unit_disc()));
      if (!expr_to_poly(t, vars)) continue;  // division by a variable etc.
    }
    auto poly = expr_to_poly(t, vars);
    REQUIRE(poly.has_value());
    std::map<std::string, Cx> pt{{"x1", rng.unit_disc()}, {"x2", rng.unit_disc()}};
    Cx a = expr_eval(t, pt);
    Cx b = poly_eval(*poly, pt);
    CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("unipoly_to_expr round trip through evaluation") {
  UniPoly p({Cx(1, 0), Cx(0, -2), Cx(3, 0.5)});
  Expr tree = unipoly_to_expr(p, "x1", Cx(0.5, 0));
  oracle::Rng rng(503);
  for (int rep = 0; rep < 20; ++rep) {
    Cx x = rng.unit_disc();
    Cx direct = p.eval(x - Cx(0.5, 0));
    CHECK(std::abs(expr_eval(tree, {{"x1", x}}) - direct) <= 1e-13);
  }
}

TEST_CASE("holomap evaluation and sampling") {
  Polydisc d = make_disc(Cx(0, 0), 1.0);
  HoloMap h = make_holomap({"x1"},
                           {parse_expr("-x1"), parse_expr("x1*exp(x1)"), parse_expr("1")}, d);
  CVec x(1);
  x << Cx(0.5, 0);
  CVec v = h.eval(x);
  REQUIRE(v.size() == 3);
  CHECK(std::abs(v[0] + Cx(0.5, 0)) <= 1e-15);
  CHECK(std::abs(v[1] - Cx(0.5, 0) * std::exp(Cx(0.5, 0))) <= 1e-15);
  CHECK(std::abs(v[2] - Cx(1, 0)) <= 1e-15);

  CHECK_THROWS_AS(make_holomap({"x1"}, {parse_expr("x2")}, d), NumericError);

  auto mixed = sample_mixed(d, 200);
  CHECK(mixed.size() == 200);
  for (const CVec& pt : mixed) CHECK(std::abs(pt[0]) <= 1.0 + 1e-9);

  auto boundary = sample_boundary(d, 64);
  CHECK(boundary.size() == 64);
  for (const CVec& pt : boundary) CHECK(std::abs(std::abs(pt[0]) - 1.0) <= 1e-12);
}
