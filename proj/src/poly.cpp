#include "nashlab/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <sstream>

namespace nashlab {

MultiPoly MultiPoly::constant(std::vector<std::string> variables, Cx value) {
  MultiPoly p(std::move(variables));
  p.add_term(Exponents(p.vars_.size(), 0), value);
  return p;
}

MultiPoly MultiPoly::variable(std::vector<std::string> variables, const std::string& name) {
  MultiPoly p(std::move(variables));
  int k = p.var_index(name);
  if (k < 0) throw NumericError("MultiPoly::variable: unknown variable " + name);
  Exponents e(p.vars_.size(), 0);
  e[static_cast<size_t>(k)] = 1;
  p.add_term(e, Cx(1.0, 0.0));
  return p;
}

int MultiPoly::var_index(const std::string& name) const {
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int MultiPoly::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  }
  return d;
}

int MultiPoly::degree_in(const std::string& var) const {
  int k = var_index(var);
  if (k < 0) return 0;
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[static_cast<size_t>(k)]);
  return d;
}

double MultiPoly::coeff_scale() const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) s = std::max(s, std::abs(c));
  return s;
}

void MultiPoly::add_term(const Exponents& e, Cx c) {
  if (e.size() != vars_.size()) throw NumericError("MultiPoly::add_term: exponent tuple length mismatch");
  require_finite(c, "MultiPoly coefficient");
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (c != Cx(0.0, 0.0)) terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second == Cx(0.0, 0.0)) terms_.erase(it);
}

Cx MultiPoly::coeff(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Cx(0.0, 0.0) : it->second;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
  MultiPoly r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
  MultiPoly r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
  return r;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
  MultiPoly r(vars_);
  Exponents e(vars_.size(), 0);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

MultiPoly MultiPoly::operator-() const { return scaled(Cx(-1.0, 0.0)); }

MultiPoly MultiPoly::scaled(Cx f) const {
  MultiPoly r(vars_);
  for (const auto& [e, c] : terms_) r.add_term(e, c * f);
  return r;
}

std::string MultiPoly::to_string(int sig_digits) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(sig_digits);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real();
    if (c.imag() >= 0) os << "+";
    os << c.imag() << "i)";
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      os << "*" << vars_[i];
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

Cx poly_eval(const MultiPoly& p, const std::map<std::string, Cx>& point) {
  const auto& vars = p.variables();
  // Power tables per variable up to the degree actually used.
  std::vector<std::vector<Cx>> pows(vars.size());
  for (size_t i = 0; i < vars.size(); ++i) {
    int d = p.degree_in(vars[i]);
    if (d == 0) continue;
    auto it = point.find(vars[i]);
    if (it == point.end()) throw NumericError("poly_eval: missing variable " + vars[i]);
    pows[i].resize(static_cast<size_t>(d) + 1);
    pows[i][0] = Cx(1.0, 0.0);
    for (int k = 1; k <= d; ++k) pows[i][static_cast<size_t>(k)] = pows[i][static_cast<size_t>(k - 1)] * it->second;
  }
  Cx acc(0.0, 0.0);
  for (const auto& [e, c] : p.terms()) {
    Cx t = c;
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] > 0) t *= pows[i][static_cast<size_t>(e[i])];
    }
    acc += t;
  }
  return acc;
}

MultiPoly substitute(const MultiPoly& p, const std::map<std::string, Cx>& values) {
  const auto& vars = p.variables();
  std::vector<int> keep;                // indices of remaining variables
  std::vector<std::string> rem_vars;
  std::vector<std::vector<Cx>> pows(vars.size());
  for (size_t i = 0; i < vars.size(); ++i) {
    auto it = values.find(vars[i]);
    if (it == values.end()) {
      keep.push_back(static_cast<int>(i));
      rem_vars.push_back(vars[i]);
      continue;
    }
    int d = p.degree_in(vars[i]);
    pows[i].resize(static_cast<size_t>(d) + 1);
    pows[i][0] = Cx(1.0, 0.0);
    for (int k = 1; k <= d; ++k) pows[i][static_cast<size_t>(k)] = pows[i][static_cast<size_t>(k - 1)] * it->second;
  }
  MultiPoly r(rem_vars);
  Exponents re(rem_vars.size(), 0);
  for (const auto& [e, c] : p.terms()) {
    Cx t = c;
    for (size_t i = 0; i < e.size(); ++i) {
      if (!pows[i].empty()) t *= pows[i][static_cast<size_t>(e[i])];
    }
    for (size_t j = 0; j < keep.size(); ++j) re[j] = e[static_cast<size_t>(keep[j])];
    r.add_term(re, t);
  }
  return r;
}

std::vector<MultiPoly> coeffs_in(const MultiPoly& p, const std::string& var) {
  int k = p.var_index(var);
  if (k < 0) throw NumericError("coeffs_in: unknown variable " + var);
  std::vector<std::string> rem_vars;
  for (size_t i = 0; i < p.variables().size(); ++i) {
    if (static_cast<int>(i) != k) rem_vars.push_back(p.variables()[i]);
  }
  int d = p.degree_in(var);
  std::vector<MultiPoly> out(static_cast<size_t>(d) + 1, MultiPoly(rem_vars));
  Exponents re(rem_vars.size(), 0);
  for (const auto& [e, c] : p.terms()) {
    size_t j = 0;
    for (size_t i = 0; i < e.size(); ++i) {
      if (static_cast<int>(i) != k) re[j++] = e[i];
    }
    out[static_cast<size_t>(e[static_cast<size_t>(k)])].add_term(re, c);
  }
  return out;
}

namespace {

// Determinant by Laplace expansion over rows with memoization on the set of
// still-available columns. Fine for the small Sylvester matrices used here.
class PolyDeterminant {
public:
  PolyDeterminant(const std::vector<std::vector<MultiPoly>>& m, std::vector<std::string> vars)
      : m_(m), vars_(std::move(vars)), n_(m.size()), memo_(static_cast<size_t>(1) << n_) {}

  MultiPoly run() { return det((static_cast<uint32_t>(1) << n_) - 1); }

private:
  MultiPoly det(uint32_t mask) {
    if (mask == 0) return MultiPoly::constant(vars_, Cx(1.0, 0.0));
    auto& slot = memo_[mask];
    if (slot) return *slot;
    size_t row = n_ - static_cast<size_t>(__builtin_popcount(mask));
    MultiPoly acc(vars_);
    int sign = 1;
    for (size_t col = 0; col < n_; ++col) {
      if (!(mask & (1u << col))) continue;
      const MultiPoly& entry = m_[row][col];
      if (!entry.is_zero()) {
        MultiPoly sub = det(mask & ~(1u << col));
        MultiPoly term = entry * sub;
        acc = (sign > 0) ? acc + term : acc - term;
      }
      sign = -sign;
    }
    slot = std::make_unique<MultiPoly>(acc);
    return acc;
  }

  const std::vector<std::vector<MultiPoly>>& m_;
  std::vector<std::string> vars_;
  size_t n_;
  std::vector<std::unique_ptr<MultiPoly>> memo_;
};

}  // namespace

MultiPoly sylvester_resultant(const MultiPoly& p, const MultiPoly& q, const std::string& var) {
  int dp = p.degree_in(var);
  int dq = q.degree_in(var);
  if (dp < 1 || dq < 1) throw NumericError("sylvester_resultant: degree 0 in " + var);
  auto pc = coeffs_in(p, var);
  auto qc = coeffs_in(q, var);
  const std::vector<std::string> rem_vars = pc.front().variables();
  size_t n = static_cast<size_t>(dp + dq);
  if (n > 16) throw NumericError("sylvester_resultant: matrix too large");

  std::vector<std::vector<MultiPoly>> m(n, std::vector<MultiPoly>(n, MultiPoly(rem_vars)));
  // dq rows of p's coefficients (descending), then dp rows of q's.
  for (int r = 0; r < dq; ++r) {
    for (int j = 0; j <= dp; ++j) m[static_cast<size_t>(r)][static_cast<size_t>(r + j)] = pc[static_cast<size_t>(dp - j)];
  }
  for (int r = 0; r < dp; ++r) {
    for (int j = 0; j <= dq; ++j) m[static_cast<size_t>(dq + r)][static_cast<size_t>(r + j)] = qc[static_cast<size_t>(dq - j)];
  }
  return PolyDeterminant(m, rem_vars).run();
}

UniPoly::UniPoly(std::vector<Cx> coeffs) : c_(std::move(coeffs)) {
  for (Cx v : c_) require_finite(v, "UniPoly coefficient");
}

double UniPoly::scale() const {
  double s = 0.0;
  for (Cx v : c_) s = std::max(s, std::abs(v));
  return s;
}

int UniPoly::degree() const {
  double thresh = kLeadTol * scale();
  for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) {
    if (std::abs(c_[static_cast<size_t>(k)]) > thresh) return k;
  }
  return -1;
}

UniPoly UniPoly::normalized() const {
  int d = degree();
  if (d < 0) return UniPoly();
  return UniPoly(std::vector<Cx>(c_.begin(), c_.begin() + d + 1));
}

Cx UniPoly::eval(Cx z) const {
  Cx acc(0.0, 0.0);
  for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) acc = acc * z + c_[static_cast<size_t>(k)];
  return acc;
}

UniPoly UniPoly::derivative() const {
  if (c_.size() <= 1) return UniPoly(std::vector<Cx>{Cx(0.0, 0.0)});
  std::vector<Cx> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return UniPoly(std::move(d));
}

UniPoly to_unipoly(const MultiPoly& p) {
  if (p.variables().size() > 1) throw NumericError("to_unipoly: more than one variable");
  int d = p.variables().empty() ? 0 : p.degree_in(p.variables()[0]);
  std::vector<Cx> c(static_cast<size_t>(d) + 1, Cx(0.0, 0.0));
  for (const auto& [e, coef] : p.terms()) {
    size_t k = e.empty() ? 0 : static_cast<size_t>(e[0]);
    c[k] = coef;
  }
  return UniPoly(std::move(c));
}

std::vector<Cx> aberth_roots(const UniPoly& p, double tol) {
  UniPoly w = p.normalized();
  if (w.is_zero()) throw NumericError("aberth_roots: zero polynomial");
  const double sc = w.scale();

  // Exact zero roots are split off first; the iteration handles the rest.
  std::vector<Cx> coeffs = w.coeffs();
  int zero_roots = 0;
  while (coeffs.size() > 1 && coeffs.front() == Cx(0.0, 0.0)) {
    coeffs.erase(coeffs.begin());
    ++zero_roots;
  }
  UniPoly core{std::vector<Cx>(coeffs)};
  int n = static_cast<int>(coeffs.size()) - 1;
  if (n + zero_roots < 1) throw NumericError("aberth_roots: degree 0 polynomial");

  std::vector<Cx> roots(static_cast<size_t>(zero_roots), Cx(0.0, 0.0));
  if (n >= 1) {
    UniPoly dcore = core.derivative();
    Cx lead = coeffs.back();
    double bound = 0.0;
    for (int k = 0; k < n; ++k) bound = std::max(bound, std::abs(coeffs[static_cast<size_t>(k)] / lead));
    bound += 1.0;

    std::vector<Cx> z(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      double theta = 2.0 * M_PI * k / n + 0.45;
      z[static_cast<size_t>(k)] = bound * Cx(std::cos(theta), std::sin(theta));
    }

    const int max_iter = 200;
    const double step_tol = 1e-14 * bound;
    for (int iter = 0; iter < max_iter; ++iter) {
      double max_step = 0.0;
      for (int k = 0; k < n; ++k) {
        Cx zk = z[static_cast<size_t>(k)];
        Cx pv = core.eval(zk);
        if (pv == Cx(0.0, 0.0)) continue;
        Cx dv = dcore.eval(zk);
        Cx wk = (dv == Cx(0.0, 0.0)) ? Cx(0.0, 0.0) : pv / dv;
        Cx s(0.0, 0.0);
        for (int j = 0; j < n; ++j) {
          if (j == k) continue;
          Cx diff = zk - z[static_cast<size_t>(j)];
          if (std::abs(diff) < 1e-300) continue;
          s += Cx(1.0, 0.0) / diff;
        }
        Cx denom = Cx(1.0, 0.0) - wk * s;
        Cx step = (std::abs(denom) < 1e-300) ? wk : wk / denom;
        if (dv == Cx(0.0, 0.0)) {
          // Derivative vanished away from a root: nudge deterministically.
          step = Cx(-1e-3 * bound, 1e-3 * bound);
        }
        z[static_cast<size_t>(k)] = zk - step;
        max_step = std::max(max_step, std::abs(step));
      }
      if (max_step < step_tol) break;
    }
    roots.insert(roots.end(), z.begin(), z.end());
  }

  for (Cx r : roots) {
    double res = std::abs(w.eval(r));
    if (!(res <= tol * sc)) {
      throw NumericError("aberth_roots: no convergence, residual " + fmt12(res) +
                         " exceeds " + fmt12(tol * sc));
    }
  }
  std::sort(roots.begin(), roots.end(), [](Cx a, Cx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

std::vector<RootCluster> cluster_roots(const std::vector<Cx>& roots, double radius) {
  if (radius <= 0.0) throw NumericError("cluster_roots: radius must be positive");
  size_t n = roots.size();
  std::vector<size_t> parent(n);
  std::iota(parent.begin(), parent.end(), size_t{0});
  auto find = [&](size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (std::abs(roots[i] - roots[j]) <= radius) {
        size_t ra = find(i), rb = find(j);
        if (ra != rb) parent[rb] = ra;
      }
    }
  }
  std::map<size_t, std::vector<size_t>> groups;
  for (size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

  std::vector<RootCluster> out;
  for (const auto& [root_id, members] : groups) {
    RootCluster c;
    Cx sum(0.0, 0.0);
    for (size_t i : members) sum += roots[i];
    c.center = sum / static_cast<double>(members.size());
    c.multiplicity = static_cast<int>(members.size());
    for (size_t i : members) c.radius = std::max(c.radius, std::abs(roots[i] - c.center));
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
    if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
    return a.center.imag() < b.center.imag();
  });
  return out;
}

double default_cluster_radius(const std::vector<Cx>& roots) {
  double m = 0.0;
  for (Cx r : roots) m = std::max(m, std::abs(r));
  return 1e-6 * (1.0 + m);
}

}  // namespace nashlab
