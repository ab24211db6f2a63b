#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "nashlab/variety.hpp"
#include "oracles.hpp"

using namespace nashlab;
namespace oracle = nashlab::testing;

namespace {

const std::vector<std::string> kV{"v1", "v2", "v3"};

std::vector<CVec> example12_images(int count, double radius = 1.0) {
  Polydisc d = make_disc(Cx(0, 0), radius);
  HoloMap h = make_holomap({"x1"},
                           {parse_expr("-x1"), parse_expr("x1*exp(x1)"), parse_expr("1")}, d);
  return map_images(h, sample_mixed(d, count));
}

std::vector<CVec> twisted_cubic_images(int count) {
  Polydisc d = make_disc(Cx(0, 0), 1.0);
  HoloMap h = make_holomap({"x1"},
                           {parse_expr("x1"), parse_expr("x1^2"), parse_expr("x1^3")}, d);
  return map_images(h, sample_mixed(d, count));
}

Eigen::VectorXcd rel_to_vec(const MultiPoly& rel, const std::vector<Exponents>& monos) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(monos.size()));
  for (size_t j = 0; j < monos.size(); ++j) v[static_cast<Eigen::Index>(j)] = rel.coeff(monos[j]);
  return v;
}

Eigen::MatrixXcd relations_matrix(const std::vector<MultiPoly>& rels, int p, int d) {
  auto monos = monomials_up_to(p, d);
  Eigen::MatrixXcd q(static_cast<Eigen::Index>(monos.size()),
                     static_cast<Eigen::Index>(rels.size()));
  for (size_t k = 0; k < rels.size(); ++k) {
    q.col(static_cast<Eigen::Index>(k)) = rel_to_vec(rels[k], monos);
  }
  return q;
}

Eigen::MatrixXcd monomial_matrix(const std::vector<CVec>& pts, int p, int d) {
  auto monos = monomials_up_to(p, d);
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(pts.size()),
                     static_cast<Eigen::Index>(monos.size()));
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = 0; j < monos.size(); ++j) {
      Cx acc(1, 0);
      for (size_t a = 0; a < monos[j].size(); ++a) {
        for (int k = 0; k < monos[j][a]; ++k) acc *= pts[i][static_cast<Eigen::Index>(a)];
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  }
  return m;
}

double collinearity(const MultiPoly& a, const MultiPoly& b, int p, int d) {
  auto monos = monomials_up_to(p, d);
  Eigen::VectorXcd va = rel_to_vec(a, monos), vb = rel_to_vec(b, monos);
  return std::abs(va.dot(vb)) / (va.norm() * vb.norm());
}

}  // namespace

TEST_CASE("vanishing ideal of the xe^x curve") {
  auto images = example12_images(200);
  VarietyBasis basis = vanishing_ideal(images, kV, 2, 1e-8);

  // 4 relations: the degree-<=2 multiples of (v3 - 1). Independent rank
  // oracle: pivoted QR on the raw monomial matrix.
  CHECK(basis.relations.size() == 4);
  CHECK(oracle::qr_rank(monomial_matrix(images, 3, 2), 1e-8) == 6);

  REQUIRE(basis.nullity_by_degree.size() == 3);
  CHECK(basis.nullity_by_degree[0] == 0);
  CHECK(basis.nullity_by_degree[1] == 1);
  CHECK(basis.nullity_by_degree[2] == 4);

  // The unique degree-1 relation is proportional to v3 - 1.
  CHECK(basis.minimal_degree == 1);
  REQUIRE(basis.minimal_relations.size() == 1);
  MultiPoly expected(kV);
  expected.add_term({0, 0, 1}, Cx(1, 0));
  expected.add_term({0, 0, 0}, Cx(-1, 0));
  CHECK(collinearity(basis.minimal_relations[0], expected, 3, 1) >= 1.0 - 1e-8);

  CHECK(basis.max_holdout_residual <= 1e-8);

  // Orthonormality of the returned coefficient vectors.
  Eigen::MatrixXcd q = relations_matrix(basis.relations, 3, 2);
  CHECK((q.adjoint() * q - Eigen::MatrixXcd::Identity(4, 4)).norm() <= 1e-10);
}

TEST_CASE("vanishing ideal of the twisted cubic") {
  auto images = twisted_cubic_images(200);
  VarietyBasis basis = vanishing_ideal(images, kV, 2, 1e-8);
  CHECK(basis.relations.size() == 3);
  CHECK(oracle::qr_rank(monomial_matrix(images, 3, 2), 1e-8) == 7);
  CHECK(basis.max_holdout_residual <= 1e-8);

  // The classical quadrics lie in the returned span...
  std::vector<MultiPoly> quadrics;
  {
    MultiPoly a(kV);  // v2 - v1^2
    a.add_term({0, 1, 0}, Cx(1, 0));
    a.add_term({2, 0, 0}, Cx(-1, 0));
    MultiPoly b(kV);  // v3 - v1 v2
    b.add_term({0, 0, 1}, Cx(1, 0));
    b.add_term({1, 1, 0}, Cx(-1, 0));
    MultiPoly c(kV);  // v1 v3 - v2^2
    c.add_term({1, 0, 1}, Cx(1, 0));
    c.add_term({0, 2, 0}, Cx(-1, 0));
    quadrics = {a, b, c};
  }
  Eigen::MatrixXcd q = relations_matrix(basis.relations, 3, 2);
  auto monos = monomials_up_to(3, 2);
  for (const MultiPoly& quad : quadrics) {
    Eigen::VectorXcd v = rel_to_vec(quad, monos);
    v /= v.norm();
    double residual = (v - q * (q.adjoint() * v)).norm();
    CHECK(residual <= 1e-6);
  }

  // ...and vanish identically under the parametrization (symbolic check:
  // substitute v = (t, t^2, t^3) by exponent bookkeeping).
  for (const MultiPoly& quad : quadrics) {
    std::vector<Cx> tc(7, Cx(0, 0));
    for (const auto& [e, c] : quad.terms()) {
      tc[static_cast<size_t>(e[0] + 2 * e[1] + 3 * e[2])] += c;
    }
    for (Cx c : tc) CHECK(std::abs(c) == 0.0);
  }
}

TEST_CASE("point variety") {
  CVec a(3);
  a << Cx(0.3, -0.2), Cx(1.5, 0), Cx(0, 2);
  std::vector<CVec> samples(20, a);
  VarietyBasis basis = vanishing_ideal(samples, kV, 1, 1e-8);
  CHECK(basis.relations.size() == 3);

  auto monos = monomials_up_to(3, 1);
  Eigen::MatrixXcd q = relations_matrix(basis.relations, 3, 1);
  for (int j = 0; j < 3; ++j) {
    MultiPoly rel(kV);  // v_j - a_j
    Exponents e{0, 0, 0};
    e[static_cast<size_t>(j)] = 1;
    rel.add_term(e, Cx(1, 0));
    rel.add_term({0, 0, 0}, -a[j]);
    Eigen::VectorXcd v = rel_to_vec(rel, monos);
    v /= v.norm();
    CHECK((v - q * (q.adjoint() * v)).norm() <= 1e-8);
  }
  CHECK(membership_residual(basis, a) <= 1e-12);
}

TEST_CASE("vanishing ideal error cases") {
  std::vector<CVec> few(5, CVec::Zero(3));
  CHECK_THROWS_AS(vanishing_ideal(few, kV, 2, 1e-8), NumericError);
}

TEST_CASE("membership residual fixtures") {
  VarietyBasis basis = vanishing_ideal(example12_images(200), kV, 2, 1e-8);

  CVec on_image(3);  // H(2), far outside the sampled window but on the variety
  on_image << Cx(-2, 0), Cx(2, 0) * std::exp(Cx(2, 0)), Cx(1, 0);
  CHECK(membership_residual(basis, on_image) <= 1e-8);

  CVec off(3);
  off << Cx(0, 0), Cx(0, 0), Cx(2, 0);
  CHECK(membership_residual(basis, off) > 0.1);
}

TEST_CASE("nullity is stable under sample doubling") {
  VarietyBasis b1 = vanishing_ideal(example12_images(200), kV, 2, 1e-8);
  VarietyBasis b2 = vanishing_ideal(example12_images(400), kV, 2, 1e-8);
  REQUIRE(b1.relations.size() == b2.relations.size());

  // Principal angles between the two relation subspaces.
  Eigen::MatrixXcd q1 = relations_matrix(b1.relations, 3, 2);
  Eigen::MatrixXcd q2 = relations_matrix(b2.relations, 3, 2);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(q1.adjoint() * q2);
  double min_cos = svd.singularValues().minCoeff();
  CHECK(std::acos(std::min(1.0, min_cos)) <= 1e-6);
}

TEST_CASE("nash witness fixtures") {
  Polydisc unit = make_disc(Cx(0, 0), 1.0);
  Polydisc half = make_disc(Cx(0, 0), 0.5);

  auto w1 = nash_witness(parse_expr("x1^2"), "x1", unit, 2);
  REQUIRE(w1.has_value());
  MultiPoly exp1({"x1", "y"});  // y - x^2
  exp1.add_term({0, 1}, Cx(1, 0));
  exp1.add_term({2, 0}, Cx(-1, 0));
  CHECK(collinearity(*w1, exp1, 2, 2) >= 1.0 - 1e-8);

  auto w2 = nash_witness(parse_expr("1/(1+x1)"), "x1", half, 2);
  REQUIRE(w2.has_value());
  MultiPoly exp2({"x1", "y"});  // y + x y - 1
  exp2.add_term({0, 1}, Cx(1, 0));
  exp2.add_term({1, 1}, Cx(1, 0));
  exp2.add_term({0, 0}, Cx(-1, 0));
  CHECK(collinearity(*w2, exp2, 2, 2) >= 1.0 - 1e-8);

  // Residuals on a fresh grid.
  for (const auto& [witness, text, disc] :
       {std::tuple{*w1, "x1^2", unit}, std::tuple{*w2, "1/(1+x1)", half}}) {
    Expr f = parse_expr(text);
    for (const CVec& x : sample_interior(disc, 8)) {
      Cx y = expr_eval(f, {{"x1", x[0]}});
      CHECK(std::abs(poly_eval(witness, {{"x1", x[0]}, {"y", y}})) <= 1e-8);
    }
  }

  // exp has no witness -- on a disc large enough that its transcendence is
  // numerically visible (on small discs e^x is a polynomial to machine
  // precision and every degree-6 monomial basis of the graph degenerates).
  Polydisc wide = make_disc(Cx(0, 0), 16.0);
  auto none = nash_witness(parse_expr("exp(x1)"), "x1", wide, 4);
  CHECK(!none.has_value());
  // Oracle: the graph monomial matrix has full numerical rank.
  std::vector<CVec> graph;
  for (const CVec& x : sample_mixed(wide, 300)) {
    CVec g(2);
    g << x[0], std::exp(x[0]);
    graph.push_back(g);
  }
  CHECK(oracle::qr_rank_scaled(monomial_matrix(graph, 2, 4), 1e-8) ==
        static_cast<int>(monomials_up_to(2, 4).size()));
}

TEST_CASE("nash witness returns the relation exactly when rank drops") {
  // f = x: the degree-1 graph relation y - x.
  auto w = nash_witness(parse_expr("x1"), "x1", make_disc(Cx(0, 0), 1.0), 3);
  REQUIRE(w.has_value());
  MultiPoly expected({"x1", "y"});
  expected.add_term({0, 1}, Cx(1, 0));
  expected.add_term({1, 0}, Cx(-1, 0));
  CHECK(collinearity(*w, expected, 2, 1) >= 1.0 - 1e-8);
}

namespace {

struct LinearFixture {
  HoloMap h;
  VarietyBasis basis;
  std::vector<CVec> validation;
};

LinearFixture linear_fixture() {
  Polydisc d = make_disc(Cx(0, 0), 1.0);
  HoloMap h = make_holomap(
      {"x1"},
      {parse_expr("x1"), parse_expr("exp(x1)-1"), parse_expr("x1+exp(x1)-1")}, d);
  VarietyBasis basis = vanishing_ideal(map_images(h, sample_mixed(d, 200)), kV, 1, 1e-8);
  return {h, basis, sample_interior(make_disc(Cx(0, 0), 0.9), 9)};
}

}  // namespace

TEST_CASE("make_approximant parametric keeps membership") {
  Polydisc d = make_disc(Cx(0, 0), 1.0);
  HoloMap h = make_holomap({"x1"},
                           {parse_expr("-x1"), parse_expr("x1*exp(x1)"), parse_expr("1")}, d);
  VarietyBasis basis = vanishing_ideal(map_images(h, sample_mixed(d, 200)), kV, 2, 1e-8);
  ApproxScheme scheme;
  scheme.kind = ApproxScheme::Kind::Parametric;
  scheme.components = {"-x1", "(x1 - 1/NU)*exp(x1)", "1"};
  auto validation = sample_interior(make_disc(Cx(0, 0), 0.9), 9);

  ApproximantResult a = make_approximant(scheme, h, basis, 5, validation);
  CHECK(a.max_membership <= 1e-8);
  CVec x(1);
  x << Cx(0.3, 0.1);
  CVec v = a.map.eval(x);
  Cx expected = (x[0] - Cx(0.2, 0)) * std::exp(x[0]);
  CHECK(std::abs(v[1] - expected) <= 1e-14);
}

TEST_CASE("make_approximant constrained truncation recomputes the solved component") {
  LinearFixture fx = linear_fixture();
  ApproxScheme scheme;
  scheme.kind = ApproxScheme::Kind::ConstrainedTruncation;
  scheme.free_components = {0, 1};
  scheme.solved_components[2] = "v1 + v2";

  ApproximantResult a = make_approximant(scheme, fx.h, fx.basis, 3, fx.validation);
  // Expected: (x, x + x^2/2 + x^3/6, 2x + x^2/2 + x^3/6), on the variety
  // exactly.
  oracle::Rng rng(601);
  for (int rep = 0; rep < 20; ++rep) {
    Cx x = 0.9 * rng.unit_disc();
    CVec v = a.map.eval((CVec(1) << x).finished());
    Cx t2 = x + x * x / 2.0 + x * x * x / 6.0;
    CHECK(std::abs(v[0] - x) <= 1e-14);
    CHECK(std::abs(v[1] - t2) <= 1e-14);
    CHECK(std::abs(v[2] - (x + t2)) <= 1e-14);
  }
  CHECK(a.max_membership <= 1e-12);

  // Truncation sup distances are non-increasing in nu.
  double prev = std::numeric_limits<double>::infinity();
  for (int nu : {1, 2, 4, 8, 16}) {
    double sup = make_approximant(scheme, fx.h, fx.basis, nu, fx.validation).sup_distance;
    CHECK(sup <= prev + 1e-12);
    prev = sup;
  }
}

TEST_CASE("make_approximant unconstrained shift leaves the variety") {
  LinearFixture fx = linear_fixture();
  ApproxScheme scheme;
  scheme.kind = ApproxScheme::Kind::UnconstrainedTruncation;
  scheme.shifts[2] = "1/NU";

  for (int nu : {4, 8, 16}) {
    ApproximantResult a = make_approximant(scheme, fx.h, fx.basis, nu, fx.validation);
    CHECK(a.max_membership >= 0.05 / nu);
    CHECK(a.max_membership <= 1.0 / nu);
  }
}

TEST_CASE("make_approximant rejects incomplete solved forms") {
  LinearFixture fx = linear_fixture();
  ApproxScheme scheme;
  scheme.kind = ApproxScheme::Kind::ConstrainedTruncation;
  scheme.free_components = {0, 1};  // component 2 neither free nor solved
  CHECK_THROWS_AS(make_approximant(scheme, fx.h, fx.basis, 3, fx.validation), NumericError);

  // A solved form inconsistent with the variety fails the membership gate.
  ApproxScheme bad;
  bad.kind = ApproxScheme::Kind::ConstrainedTruncation;
  bad.free_components = {0, 1};
  bad.solved_components[2] = "v1 - v2";
  CHECK_THROWS_AS(make_approximant(bad, fx.h, fx.basis, 3, fx.validation), NumericError);
}
