#include "nashlab/variety.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace nashlab {

namespace {

void tuples_of_degree(int nvars, int degree, Exponents& cur, int pos,
                      std::vector<Exponents>& out) {
  if (pos == nvars - 1) {
    cur[static_cast<size_t>(pos)] = degree;
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= degree; ++k) {
    cur[static_cast<size_t>(pos)] = k;
    tuples_of_degree(nvars, degree - k, cur, pos + 1, out);
  }
}

}  // namespace

std::vector<Exponents> monomials_up_to(int nvars, int max_degree) {
  std::vector<Exponents> out;
  if (nvars <= 0) return out;
  Exponents cur(static_cast<size_t>(nvars), 0);
  for (int d = 0; d <= max_degree; ++d) tuples_of_degree(nvars, d, cur, 0, out);
  return out;
}

namespace {

Cx eval_monomial(const Exponents& e, const CVec& point) {
  Cx acc(1.0, 0.0);
  for (size_t i = 0; i < e.size(); ++i) {
    for (int k = 0; k < e[i]; ++k) acc *= point[static_cast<int>(i)];
  }
  return acc;
}

Eigen::MatrixXcd evaluation_matrix(const std::vector<CVec>& samples,
                                   const std::vector<Exponents>& monos) {
  Eigen::MatrixXcd a(samples.size(), monos.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    for (size_t j = 0; j < monos.size(); ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          eval_monomial(monos[j], samples[i]);
    }
  }
  return a;
}

struct NullspaceResult {
  Eigen::MatrixXcd basis;  // columns orthonormal in coefficient space
  std::vector<double> singular_values;
};

// Columns are scaled to unit norm before the SVD so the relative threshold
// means the same thing across degrees; the near-null directions are scaled
// back, re-orthonormalized and phase-fixed.
NullspaceResult scaled_nullspace(const Eigen::MatrixXcd& a, double svd_tol) {
  Eigen::Index m = a.cols();
  Eigen::VectorXd col_scale(m);
  Eigen::MatrixXcd as = a;
  for (Eigen::Index j = 0; j < m; ++j) {
    double s = as.col(j).norm();
    col_scale[j] = (s > 0.0) ? s : 1.0;
    as.col(j) /= col_scale[j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(as, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  NullspaceResult out;
  out.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
  double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
  if (!(sigma_max > 0.0)) throw NumericError("vanishing_ideal: degenerate sample set (all singular values vanish)");

  int nullity = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma[k] < svd_tol * sigma_max) ++nullity;
  }
  // Rectangular matrices with fewer rows than columns have structural
  // nullspace beyond the listed singular values.
  nullity += static_cast<int>(m - sigma.size());

  if (nullity == 0) {
    out.basis = Eigen::MatrixXcd(m, 0);
    return out;
  }
  Eigen::MatrixXcd raw(m, nullity);
  for (int k = 0; k < nullity; ++k) {
    Eigen::VectorXcd v = svd.matrixV().col(m - 1 - k);
    raw.col(k) = v.cwiseQuotient(col_scale.cast<Cx>());
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(raw);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, nullity);
  // Deterministic representatives: largest entry made real positive.
  for (int k = 0; k < nullity; ++k) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      double mag = std::abs(q(i, k));
      if (mag > best) {
        best = mag;
        imax = i;
      }
    }
    Cx u = q(imax, k);
    if (std::abs(u) > 0.0) q.col(k) *= std::conj(u) / std::abs(u);
  }
  out.basis = q;
  return out;
}

MultiPoly relation_from_vector(const Eigen::VectorXcd& c, const std::vector<Exponents>& monos,
                               const std::vector<std::string>& vars) {
  MultiPoly p(vars);
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (c[j] != Cx(0.0, 0.0)) p.add_term(monos[static_cast<size_t>(j)], c[j]);
  }
  return p;
}

}  // namespace

VarietyBasis vanishing_ideal(const std::vector<CVec>& samples,
                             const std::vector<std::string>& vars, int degree_bound,
                             double svd_tol) {
  const int p = static_cast<int>(vars.size());
  auto monos = monomials_up_to(p, degree_bound);
  const size_t m = monos.size();
  if (samples.size() < 3 * m) {
    throw NumericError("vanishing_ideal: too few samples (" + std::to_string(samples.size()) +
                       " for " + std::to_string(m) + " monomials; need >= 3x)");
  }
  for (const CVec& s : samples) {
    if (s.size() != p) throw NumericError("vanishing_ideal: sample dimension mismatch");
  }

  std::vector<CVec> generating, holdout;
  for (size_t i = 0; i < samples.size(); ++i) {
    ((i % 5 == 4) ? holdout : generating).push_back(samples[i]);
  }

  Eigen::MatrixXcd a = evaluation_matrix(generating, monos);
  NullspaceResult ns = scaled_nullspace(a, svd_tol);

  VarietyBasis basis;
  basis.vars = vars;
  basis.degree_bound = degree_bound;
  basis.svd_tol = svd_tol;
  basis.sample_count = static_cast<int>(samples.size());
  basis.singular_values = ns.singular_values;
  for (int k = 0; k < ns.basis.cols(); ++k) {
    basis.relations.push_back(relation_from_vector(ns.basis.col(k), monos, vars));
  }

  // Nullity of every degree truncation; monomials are graded so the degree-k
  // block is a column prefix.
  basis.nullity_by_degree.assign(static_cast<size_t>(degree_bound) + 1, 0);
  for (int k = 0; k <= degree_bound; ++k) {
    size_t mk = monomials_up_to(p, k).size();
    if (k == degree_bound) {
      basis.nullity_by_degree[static_cast<size_t>(k)] = static_cast<int>(basis.relations.size());
      break;
    }
    NullspaceResult sub = scaled_nullspace(a.leftCols(static_cast<Eigen::Index>(mk)), svd_tol);
    basis.nullity_by_degree[static_cast<size_t>(k)] = static_cast<int>(sub.basis.cols());
    if (sub.basis.cols() > 0 && basis.minimal_degree < 0) {
      basis.minimal_degree = k;
      auto sub_monos = monomials_up_to(p, k);
      for (int c = 0; c < sub.basis.cols(); ++c) {
        basis.minimal_relations.push_back(relation_from_vector(sub.basis.col(c), sub_monos, vars));
      }
    }
  }
  if (basis.minimal_degree < 0 && !basis.relations.empty()) {
    basis.minimal_degree = degree_bound;
    basis.minimal_relations = basis.relations;
  }

  for (const CVec& s : holdout) {
    basis.max_holdout_residual = std::max(basis.max_holdout_residual, membership_residual(basis, s));
  }
  return basis;
}

double membership_residual(const VarietyBasis& basis, const CVec& point) {
  if (point.size() != static_cast<int>(basis.vars.size())) {
    throw NumericError("membership_residual: point dimension mismatch");
  }
  double denom = 1.0 + std::pow(point.norm(), basis.degree_bound);
  std::map<std::string, Cx> assign;
  for (size_t i = 0; i < basis.vars.size(); ++i) assign[basis.vars[i]] = point[static_cast<int>(i)];
  double worst = 0.0;
  for (const MultiPoly& rel : basis.relations) {
    worst = std::max(worst, std::abs(poly_eval(rel, assign)) / denom);
  }
  return worst;
}

std::optional<MultiPoly> nash_witness(const Expr& component, const std::string& var,
                                      const Polydisc& domain, int degree_bound,
                                      int sample_count, double svd_tol) {
  if (domain.dim() != 1) throw NumericError("nash_witness: univariate components only");
  auto vars_used = expr_variables(component);
  if (vars_used.size() > 1 || (vars_used.size() == 1 && *vars_used.begin() != var)) {
    throw NumericError("nash_witness: component must use only " + var);
  }
  auto base = sample_mixed(domain, sample_count);
  std::vector<CVec> graph;
  graph.reserve(base.size());
  for (const CVec& x : base) {
    Cx fx = expr_eval(component, {{var, x[0]}});
    CVec g(2);
    g << x[0], fx;
    graph.push_back(g);
  }
  VarietyBasis basis = vanishing_ideal(graph, {var, "y"}, degree_bound, svd_tol);
  if (basis.relations.empty()) return std::nullopt;
  return basis.minimal_relations.front();
}

std::string substitute_nu(const std::string& text, int nu) {
  std::string out;
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  for (size_t i = 0; i < text.size();) {
    if (text.compare(i, 2, "NU") == 0 && (i == 0 || !is_ident(text[i - 1])) &&
        (i + 2 >= text.size() || !is_ident(text[i + 2]))) {
      out += std::to_string(nu);
      i += 2;
    } else {
      out += text[i++];
    }
  }
  return out;
}

ApproximantResult make_approximant(const ApproxScheme& scheme, const HoloMap& h,
                                   const VarietyBasis& basis, int nu,
                                   const std::vector<CVec>& validation_grid,
                                   double membership_tol) {
  if (nu < 1) throw NumericError("make_approximant: nu must be positive");
  const int p = h.target_dim();
  std::set<std::string> allowed(h.base_vars.begin(), h.base_vars.end());
  std::vector<Expr> comps;

  switch (scheme.kind) {
    case ApproxScheme::Kind::Parametric: {
      if (static_cast<int>(scheme.components.size()) != p) {
        throw NumericError("make_approximant: parametric component count mismatch");
      }
      for (const std::string& tmpl : scheme.components) {
        comps.push_back(parse_expr(substitute_nu(tmpl, nu), allowed));
      }
      break;
    }
    case ApproxScheme::Kind::ConstrainedTruncation: {
      if (h.base_dim() != 1) throw NumericError("make_approximant: truncation needs n = 1");
      std::vector<bool> is_free(static_cast<size_t>(p), false);
      for (int j : scheme.free_components) {
        if (j < 0 || j >= p) throw NumericError("make_approximant: free component index out of range");
        is_free[static_cast<size_t>(j)] = true;
      }
      for (int j = 0; j < p; ++j) {
        if (!is_free[static_cast<size_t>(j)] && !scheme.solved_components.count(j)) {
          throw NumericError("make_approximant: component " + std::to_string(j) +
                             " is neither free nor in solved form");
        }
      }
      Cx center = h.domain.center[0];
      std::map<std::string, Expr> free_trees;
      comps.resize(static_cast<size_t>(p));
      for (int j = 0; j < p; ++j) {
        if (!is_free[static_cast<size_t>(j)]) continue;
        UniPoly t = taylor_truncate(h.components[static_cast<size_t>(j)], center, nu);
        Expr tree = unipoly_to_expr(t, h.base_vars[0], center);
        comps[static_cast<size_t>(j)] = tree;
        free_trees[basis.vars[static_cast<size_t>(j)]] = tree;
      }
      for (const auto& [j, text] : scheme.solved_components) {
        std::set<std::string> free_vars;
        for (int k : scheme.free_components) free_vars.insert(basis.vars[static_cast<size_t>(k)]);
        Expr solved = parse_expr(text, free_vars);
        comps[static_cast<size_t>(j)] = substitute_vars(solved, free_trees);
      }
      break;
    }
    case ApproxScheme::Kind::UnconstrainedTruncation: {
      if (h.base_dim() != 1) throw NumericError("make_approximant: truncation needs n = 1");
      Cx center = h.domain.center[0];
      for (int j = 0; j < p; ++j) {
        UniPoly t = taylor_truncate(h.components[static_cast<size_t>(j)], center, nu);
        Expr tree = unipoly_to_expr(t, h.base_vars[0], center);
        auto it = scheme.shifts.find(j);
        if (it != scheme.shifts.end()) {
          tree = make_add(tree, parse_expr(substitute_nu(it->second, nu), allowed));
        }
        comps.push_back(tree);
      }
      break;
    }
  }

  ApproximantResult out{make_holomap(h.base_vars, std::move(comps), h.domain), 0.0, 0.0};
  for (const CVec& x : validation_grid) {
    CVec a = out.map.eval(x);
    CVec b = h.eval(x);
    out.sup_distance = std::max(out.sup_distance, (a - b).cwiseAbs().maxCoeff());
    out.max_membership = std::max(out.max_membership, membership_residual(basis, a));
  }
  if (scheme.kind != ApproxScheme::Kind::UnconstrainedTruncation &&
      out.max_membership > membership_tol) {
    throw NumericError("make_approximant: approximant leaves the variety (membership residual " +
                       fmt12(out.max_membership) + " > " + fmt12(membership_tol) + ")");
  }
  return out;
}

}  // namespace nashlab
