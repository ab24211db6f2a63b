#pragma once

#include <string>
#include <vector>

#include "nashlab/expr.hpp"
#include "nashlab/poly.hpp"
#include "nashlab/types.hpp"

namespace nashlab {

/// The defining data of X = {(x,z) : q_i(H(x), z) = 0}: the polynomials q_i
/// over the coefficient and fiber variable blocks, the coefficient map H and
/// the relatively compact base region the experiments run over.
struct SystemFamily {
  std::vector<MultiPoly> q;              // in (coeff_vars, fiber_vars)
  std::vector<std::string> coeff_vars;   // v_1..v_p
  std::vector<std::string> fiber_vars;   // z_1..z_m
  HoloMap h;
  Polydisc base_region;                  // relatively compact in h.domain

  int n() const { return h.base_dim(); }
  int m() const { return static_cast<int>(fiber_vars.size()); }
  int p() const { return static_cast<int>(coeff_vars.size()); }
  int s() const { return static_cast<int>(q.size()); }
};

/// Validates variable usage, dimensions and m <= 2.
SystemFamily make_system(std::vector<MultiPoly> q, std::vector<std::string> coeff_vars,
                         std::vector<std::string> fiber_vars, HoloMap h, Polydisc base_region);

struct FiberRoot {
  CVec z;
  int multiplicity = 1;
};

/// All fiber roots of the substituted system over one base point, inside the
/// ball of the given radius. Restrictions that vanish identically are
/// excluded from root generation but recorded (0-based equation indices).
struct FiberSlice {
  CVec base_point;
  double radius = 0.0;
  std::vector<FiberRoot> roots;
  double residual_max = 0.0;            // max_i |q_i(root)| / scale_i over kept roots
  std::vector<int> degenerate_equations;
  int discarded_outside = 0;            // multiplicity discarded by the ball filter
};

struct FiberOpts {
  double tol_res = 1e-7;        // residual filter, relative to restriction scale
  double aberth_tol = 1e-9;     // root-finder residual gate
  double cluster_radius = 0.0;  // 0 = 1e-6 * (1 + max|root|)
  double degen_tol = 1e-12;     // restriction treated as 0 below this x system scale
};

int total_multiplicity(const FiberSlice& slice);
int total_multiplicity_within(const FiberSlice& slice, double r);

/// Solves the fiber over x. m = 1: roots of the lowest-degree nonzero
/// restriction filtered by the rest; m = 2: Sylvester elimination of z_2
/// against the first pivot restriction, then back-substitution, with every
/// candidate verified against all residuals.
FiberSlice fiber_solve(const SystemFamily& sys, const HoloMap& map, const CVec& x, double r,
                       const FiberOpts& opts = {});

struct R0Result {
  double r0 = 0.0;
  double margin = 0.0;          // min over roots of | ||z|| - r0 |
  int total_multiplicity = 0;   // constant fiber multiplicity over clean points
};

/// Doubling search r in {1, 2, 4, ...}: accepts the first r where every grid
/// fiber has the same multiplicity inside r and 2r, no root sits within
/// 0.1*r of the sphere, and the multiplicity is constant over the
/// degeneracy-free grid points. Escaped roots (properness failures) never
/// stabilize and raise NumericError at the cap.
R0Result find_r0(const SystemFamily& sys, const HoloMap& map, const std::vector<CVec>& grid,
                 const FiberOpts& opts = {}, double r_cap = 65536.0);

struct PropernessReport {
  bool pass = false;
  double min_sphere_gap = 0.0;
  double required_gap = 0.0;
  bool multiplicity_constant = false;
  int total_multiplicity = -1;
  std::vector<std::string> witnesses;
};

/// Verifies the sphere clearance and fiber-degree constancy over the grid
/// plus boundary samples of the base region.
PropernessReport check_proper(const SystemFamily& sys, const HoloMap& map,
                              const std::vector<CVec>& grid, double r,
                              const FiberOpts& opts = {}, int boundary_samples = 64,
                              double margin_frac = 0.1);

// The tracking bound must separate two scales: a root on an n-dimensional
// branch moves at most O(sqrt(probe_radius)) under a probe (order-2
// tangency), while a spurious isolated point has no nearby root at all
// beyond its distance to the closest true sheet. The defaults keep
// sqrt(1e-4) = 0.01 well inside the bound and still resolve sheets 0.03 x
// radius apart.
struct PersistenceOpts {
  int k_probes = 4;
  double probe_radius_frac = 1e-4;  // x base-region radius
  double track_bound_frac = 0.03;   // x base-region radius, displacement bound
};

struct PersistenceInfo {
  double probe_radius = 0.0;
  bool shrunk = false;
};

/// Keeps exactly the roots whose every probe fiber (base point displaced in
/// k_probes directions) contains a root within the tracking bound: the
/// computational pure-dimensional part. Probes that would leave the base
/// region shrink the radius (reported via info).
FiberSlice persistent_roots(const SystemFamily& sys, const HoloMap& map, const FiberSlice& slice,
                            const PersistenceOpts& opts = {}, const FiberOpts& fiber_opts = {},
                            PersistenceInfo* info = nullptr);

struct SheetCount {
  int max_cardinality = 0;
  int generic_cardinality = 0;  // mode of the distinct-root counts
};

SheetCount sheet_count(const std::vector<FiberSlice>& slices);
SheetCount sheet_count(const SystemFamily& sys, const HoloMap& map,
                       const std::vector<CVec>& grid, double r, const FiberOpts& opts = {});

}  // namespace nashlab
