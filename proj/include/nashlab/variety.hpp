#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nashlab/expr.hpp"
#include "nashlab/poly.hpp"
#include "nashlab/types.hpp"

namespace nashlab {

/// Monomial exponent tuples of total degree <= max_degree in nvars
/// variables, graded (degree ascending) then lexicographic. The prefix up to
/// degree k is exactly monomials_up_to(nvars, k).
std::vector<Exponents> monomials_up_to(int nvars, int max_degree);

/// Orthonormal basis of polynomial relations vanishing on the generating
/// samples, found from the near-null right-singular directions of the
/// column-scaled monomial evaluation matrix.
struct VarietyBasis {
  std::vector<std::string> vars;       // v_1..v_p
  int degree_bound = 0;
  double svd_tol = 0.0;
  int sample_count = 0;                // total samples handed in
  std::vector<MultiPoly> relations;    // unit-norm, mutually orthogonal
  std::vector<double> singular_values;
  std::vector<int> nullity_by_degree;  // nullity of the degree-<=k truncation
  int minimal_degree = -1;             // smallest k with a relation, -1 none
  std::vector<MultiPoly> minimal_relations;
  double max_holdout_residual = 0.0;
};

/// Every 5th sample is held out for validation; the rest generate the basis.
/// Requires sample_count >= 3 * #monomials(degree_bound).
VarietyBasis vanishing_ideal(const std::vector<CVec>& samples,
                             const std::vector<std::string>& vars, int degree_bound,
                             double svd_tol);

/// max over relations of |relation(point)| / (1 + ||point||^degree_bound).
double membership_residual(const VarietyBasis& basis, const CVec& point);

/// Lowest-degree nonzero relation P with P(x, f(x)) = 0 on samples of the
/// graph of the (univariate) component over the domain, or nullopt when the
/// graph monomial matrix has full rank up to degree_bound.
std::optional<MultiPoly> nash_witness(const Expr& component, const std::string& var,
                                      const Polydisc& domain, int degree_bound,
                                      int sample_count = 300, double svd_tol = 1e-8);

struct ApproxScheme {
  enum class Kind { Parametric, ConstrainedTruncation, UnconstrainedTruncation };
  Kind kind = Kind::Parametric;
  /// Parametric: one template per component; the literal token NU is
  /// substituted by the integer nu before parsing.
  std::vector<std::string> components;
  /// Constrained truncation: Taylor order nu on the free components,
  /// the rest recomputed from solved-form expressions in the free
  /// coefficient variables.
  std::vector<int> free_components;
  std::map<int, std::string> solved_components;
  /// Unconstrained truncation: optional additive shifts per component
  /// (templates over the base variables, NU substituted).
  std::map<int, std::string> shifts;
};

/// `NU` -> decimal value of nu, identifier-boundary aware.
std::string substitute_nu(const std::string& text, int nu);

struct ApproximantResult {
  HoloMap map;
  double sup_distance = 0.0;     // max over grid, components of |H_nu - H|
  double max_membership = 0.0;   // max membership residual over the grid
};

/// Builds H_nu. Constrained kinds must stay on the variety: membership
/// residual above membership_tol raises NumericError. The negative-control
/// kind skips the membership gate (the residual is still reported).
ApproximantResult make_approximant(const ApproxScheme& scheme, const HoloMap& h,
                                   const VarietyBasis& basis, int nu,
                                   const std::vector<CVec>& validation_grid,
                                   double membership_tol = 1e-6);

}  // namespace nashlab
