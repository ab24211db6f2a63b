#include "nashlab/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace nashlab {

void require_finite(Cx v, const char* context) {
  if (!is_finite(v)) {
    throw NumericError(std::string("non-finite value in ") + context);
  }
}

bool Polydisc::contains(const CVec& x, double slack) const {
  if (x.size() != center.size()) return false;
  for (int a = 0; a < dim(); ++a) {
    if (std::abs(x[a] - center[a]) > radii[static_cast<size_t>(a)] + slack) return false;
  }
  return true;
}

double Polydisc::boundary_gap(const CVec& x) const {
  double gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim(); ++a) {
    gap = std::min(gap, radii[static_cast<size_t>(a)] - std::abs(x[a] - center[a]));
  }
  return gap;
}

double Polydisc::max_radius() const {
  double r = 0.0;
  for (double ra : radii) r = std::max(r, ra);
  return r;
}

Polydisc make_disc(Cx center, double radius) {
  Polydisc d;
  d.center = CVec::Constant(1, center);
  d.radii = {radius};
  return d;
}

namespace {

// Per-axis grid values c - r .. c + r in the real and imaginary directions.
std::vector<Cx> axis_grid(Cx c, double r, int per_axis) {
  std::vector<Cx> pts;
  if (per_axis <= 1) {
    pts.push_back(c);
    return pts;
  }
  for (int i = 0; i < per_axis; ++i) {
    double re = c.real() - r + 2.0 * r * i / (per_axis - 1);
    for (int j = 0; j < per_axis; ++j) {
      double im = c.imag() - r + 2.0 * r * j / (per_axis - 1);
      Cx x(re, im);
      if (std::abs(x - c) <= r * (1.0 + 1e-12)) pts.push_back(x);
    }
  }
  // Coarse grids can clip away entirely (all four corners of a 2x2 grid lie
  // outside the disc); keep the center so the product is never empty.
  if (pts.empty()) pts.push_back(c);
  return pts;
}

}  // namespace

std::vector<CVec> sample_interior(const Polydisc& d, int per_axis) {
  std::vector<std::vector<Cx>> per_axis_pts;
  for (int a = 0; a < d.dim(); ++a) {
    per_axis_pts.push_back(axis_grid(d.center[a], d.radii[static_cast<size_t>(a)], per_axis));
  }
  std::vector<CVec> out;
  std::vector<size_t> idx(per_axis_pts.size(), 0);
  while (true) {
    CVec x(d.dim());
    for (int a = 0; a < d.dim(); ++a) x[a] = per_axis_pts[static_cast<size_t>(a)][idx[static_cast<size_t>(a)]];
    out.push_back(x);
    int a = d.dim() - 1;
    while (a >= 0) {
      if (++idx[static_cast<size_t>(a)] < per_axis_pts[static_cast<size_t>(a)].size()) break;
      idx[static_cast<size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return out;
}

std::vector<CVec> sample_boundary(const Polydisc& d, int count) {
  std::vector<CVec> out;
  if (count <= 0) return out;
  const int n = d.dim();
  const double tau = 2.0 * M_PI;
  // Points per circle so the product covers >= count, then take the first
  // `count` of the deterministic product enumeration.
  int per = std::max(1, static_cast<int>(std::ceil(std::pow(static_cast<double>(count), 1.0 / n))));
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  while (static_cast<int>(out.size()) < count) {
    CVec x(n);
    for (int a = 0; a < n; ++a) {
      double theta = tau * (static_cast<double>(idx[static_cast<size_t>(a)]) + 0.5 * a) / per;
      x[a] = d.center[a] + d.radii[static_cast<size_t>(a)] * Cx(std::cos(theta), std::sin(theta));
    }
    out.push_back(x);
    int a = n - 1;
    while (a >= 0) {
      if (++idx[static_cast<size_t>(a)] < static_cast<size_t>(per)) break;
      idx[static_cast<size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return out;
}

std::vector<CVec> sample_mixed(const Polydisc& d, int count) {
  std::vector<CVec> out;
  if (count <= 0) return out;
  int boundary_n = count / 4;
  int interior_n = count - boundary_n;
  out = sample_boundary(d, boundary_n);

  int per_axis = 2;
  std::vector<CVec> grid;
  while (true) {
    grid = sample_interior(d, per_axis);
    if (static_cast<int>(grid.size()) >= interior_n) break;
    ++per_axis;
    if (per_axis > 4096) throw NumericError("sample_mixed: interior grid blow-up");
  }
  // Evenly strided subset keeps the coverage of the full grid.
  size_t total = grid.size();
  for (int t = 0; t < interior_n; ++t) {
    size_t k = static_cast<size_t>(static_cast<double>(t) * static_cast<double>(total) / interior_n);
    out.push_back(grid[std::min(k, total - 1)]);
  }
  return out;
}

std::string fmt12(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace nashlab
