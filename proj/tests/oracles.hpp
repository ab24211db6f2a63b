// Test-only oracles: every route here is independent of the implementation
// path it cross-checks (companion eigenvalues vs the Aberth iteration,
// pivoted-QR rank vs the SVD threshold, LU determinants vs the symbolic
// Sylvester expansion).
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "nashlab/poly.hpp"
#include "nashlab/types.hpp"

namespace nashlab::testing {

// Portable deterministic RNG (splitmix64), independent of libstdc++
// distributions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Uniform over the closed unit disc.
  Cx unit_disc() {
    double r = std::sqrt(uniform());
    double t = 2.0 * M_PI * uniform();
    return Cx(r * std::cos(t), r * std::sin(t));
  }

private:
  std::uint64_t state_;
};

// Roots via the companion-matrix eigenvalues (Eigen's complex Schur path).
inline std::vector<Cx> companion_roots(const UniPoly& p) {
  UniPoly w = p.normalized();
  const auto& c = w.coeffs();
  int n = static_cast<int>(c.size()) - 1;
  if (n < 1) throw NumericError("companion_roots: degree < 1");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) m(i, i - 1) = Cx(1.0, 0.0);
  for (int i = 0; i < n; ++i) m(i, n - 1) = -c[static_cast<size_t>(i)] / c.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  std::vector<Cx> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(roots.begin(), roots.end(), [](Cx a, Cx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

inline Cx lu_determinant(const Eigen::MatrixXcd& m) {
  return Eigen::FullPivLU<Eigen::MatrixXcd>(m).determinant();
}

// Numerical rank by column-pivoted QR with a relative threshold.
inline int qr_rank(const Eigen::MatrixXcd& m, double rel_tol) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(m);
  qr.setThreshold(rel_tol);
  return static_cast<int>(qr.rank());
}

// Same with unit-scaled columns (for matrices of wildly mixed magnitudes).
inline int qr_rank_scaled(Eigen::MatrixXcd m, double rel_tol) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = m.col(j).norm();
    if (s > 0.0) m.col(j) /= s;
  }
  return qr_rank(m, rel_tol);
}

// Monic polynomial with the given roots, expanded.
inline UniPoly poly_from_roots(const std::vector<Cx>& roots) {
  std::vector<Cx> c{Cx(1.0, 0.0)};
  for (Cx r : roots) {
    std::vector<Cx> next(c.size() + 1, Cx(0.0, 0.0));
    for (size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  return UniPoly(std::move(c));
}

// Bottleneck optimal matching: smallest achievable max pairwise distance
// over perfect matchings of two equal-size point lists (bitmask DP).
inline double matching_distance(const std::vector<Cx>& a, const std::vector<Cx>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  size_t n = a.size();
  if (n == 0) return 0.0;
  if (n > 16) throw NumericError("matching_distance: too many points");
  std::vector<double> dp(static_cast<size_t>(1) << n, std::numeric_limits<double>::infinity());
  dp[0] = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (dp[mask] == std::numeric_limits<double>::infinity()) continue;
    size_t i = static_cast<size_t>(__builtin_popcount(mask));
    if (i == n) continue;
    for (size_t j = 0; j < n; ++j) {
      if (mask & (1u << j)) continue;
      double cost = std::max(dp[mask], std::abs(a[i] - b[j]));
      std::uint32_t next = mask | (1u << j);
      dp[next] = std::min(dp[next], cost);
    }
  }
  return dp[(1u << n) - 1];
}

// Flattens cluster output to a root list with multiplicity repetitions.
inline std::vector<Cx> flatten_clusters(const std::vector<RootCluster>& clusters) {
  std::vector<Cx> out;
  for (const RootCluster& c : clusters) {
    for (int k = 0; k < c.multiplicity; ++k) out.push_back(c.center);
  }
  return out;
}

}  // namespace nashlab::testing
