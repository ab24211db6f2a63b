#pragma once

#include <map>
#include <string>
#include <vector>

#include "nashlab/types.hpp"

namespace nashlab {

using Exponents = std::vector<int>;

/// Dense multivariate polynomial over an ordered block of named variables.
/// Terms are a map from exponent tuples to complex coefficients; exactly-zero
/// coefficients are pruned, so iteration order (lexicographic on the tuple)
/// is reproducible.
class MultiPoly {
public:
  MultiPoly() = default;
  explicit MultiPoly(std::vector<std::string> variables) : vars_(std::move(variables)) {}

  static MultiPoly constant(std::vector<std::string> variables, Cx value);
  static MultiPoly variable(std::vector<std::string> variables, const std::string& name);

  const std::vector<std::string>& variables() const { return vars_; }
  const std::map<Exponents, Cx>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  /// Maximum total degree of a stored term; -1 for the zero polynomial.
  int total_degree() const;
  int degree_in(const std::string& var) const;
  /// max |coefficient|; 0 for the zero polynomial.
  double coeff_scale() const;

  /// Accumulates c into the term with exponents e, pruning exact zeros.
  void add_term(const Exponents& e, Cx c);
  Cx coeff(const Exponents& e) const;

  MultiPoly operator+(const MultiPoly& o) const;
  MultiPoly operator-(const MultiPoly& o) const;
  MultiPoly operator*(const MultiPoly& o) const;
  MultiPoly operator-() const;
  MultiPoly scaled(Cx f) const;

  int var_index(const std::string& name) const;  // -1 when absent

  std::string to_string(int sig_digits = 6) const;

private:
  std::vector<std::string> vars_;
  std::map<Exponents, Cx> terms_;
};

/// Evaluates p at a full assignment of its (appearing) variables.
Cx poly_eval(const MultiPoly& p, const std::map<std::string, Cx>& point);

/// Partial evaluation: substitutes the given values and returns a polynomial
/// over the remaining variables (in their original order).
MultiPoly substitute(const MultiPoly& p, const std::map<std::string, Cx>& values);

/// p viewed as a univariate polynomial in `var`: coefficient k is a
/// polynomial in the remaining variables.
std::vector<MultiPoly> coeffs_in(const MultiPoly& p, const std::string& var);

/// Determinant of the Sylvester matrix of p and q with respect to `var`,
/// expanded over the remaining variables. Both inputs need positive degree
/// in `var`.
MultiPoly sylvester_resultant(const MultiPoly& p, const MultiPoly& q, const std::string& var);

/// Dense univariate polynomial, coefficients by ascending power. Degree is
/// normalized against the relative threshold kLeadTol * scale(): leading
/// coefficients below it are treated as zero, which is how degree drops
/// (properness failures) become visible.
class UniPoly {
public:
  static constexpr double kLeadTol = 1e-10;

  UniPoly() = default;
  explicit UniPoly(std::vector<Cx> coeffs);

  const std::vector<Cx>& coeffs() const { return c_; }
  double scale() const;
  /// Normalized degree; -1 when every coefficient is below the threshold.
  int degree() const;
  bool is_zero() const { return degree() < 0; }
  /// Copy trimmed to the normalized degree (empty when zero).
  UniPoly normalized() const;

  Cx eval(Cx z) const;
  UniPoly derivative() const;

private:
  std::vector<Cx> c_;
};

/// Requires p to involve at most one variable.
UniPoly to_unipoly(const MultiPoly& p);

/// All deg(p) roots by the Aberth-Ehrlich simultaneous iteration (repeated
/// values for multiple roots). Every returned root r satisfies
/// |p(r)| <= tol * scale(p), otherwise NumericError is raised.
std::vector<Cx> aberth_roots(const UniPoly& p, double tol);

struct RootCluster {
  Cx center;
  int multiplicity = 0;
  double radius = 0.0;  // max distance of a member to the center
};

/// Single-linkage clustering at the given radius; centers are arithmetic
/// means and multiplicities sum to the input length.
std::vector<RootCluster> cluster_roots(const std::vector<Cx>& roots, double radius);

/// 1e-6 * (1 + max |root|).
double default_cluster_radius(const std::vector<Cx>& roots);

}  // namespace nashlab
