#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nashlab {

/// Complex scalar used throughout. Stored values are kept finite; operations
/// that would produce NaN/Inf in a stored value raise NumericError instead.
using Cx = std::complex<double>;

/// A point in C^n (base), C^p (coefficient space) or C^m (fiber space).
using CVec = Eigen::VectorXcd;

/// Failure inside a numerical stage: non-convergence, degenerate input,
/// violated hypothesis (e.g. properness), non-analytic expansion point.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Rejected experiment configuration (schema violation, bad dimensions,
/// unparsable expression inside a config).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Expression text violating the grammar. `position` is a 1-based column.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message), position(position) {}
  std::size_t position;
};

inline bool is_finite(Cx v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

void require_finite(Cx v, const char* context);

/// Axis-aligned polydisc { x in C^d : |x_a - center_a| <= radius_a }.
struct Polydisc {
  CVec center;
  std::vector<double> radii;

  int dim() const { return static_cast<int>(radii.size()); }
  bool contains(const CVec& x, double slack = 1e-12) const;
  /// min over axes of radius_a - |x_a - center_a| (negative outside).
  double boundary_gap(const CVec& x) const;
  double max_radius() const;
};

Polydisc make_disc(Cx center, double radius);

/// Cartesian re/im grid per axis, clipped to each disc. per_axis = points per
/// real direction, so one complex axis contributes up to per_axis^2 points.
std::vector<CVec> sample_interior(const Polydisc& d, int per_axis);

/// Equispaced points on the distinguished boundary (product of circles).
std::vector<CVec> sample_boundary(const Polydisc& d, int count);

/// Exactly `count` points: floor(count/4) boundary samples plus an evenly
/// strided subset of an interior grid. Deterministic for fixed inputs.
std::vector<CVec> sample_mixed(const Polydisc& d, int count);

/// Fixed 12-significant-digit formatting used by every report writer.
std::string fmt12(double x);
/// x rounded through the 12-digit decimal representation (report numbers).
double round12(double x);

}  // namespace nashlab
