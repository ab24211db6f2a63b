#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nashlab/fibers.hpp"
#include "nashlab/types.hpp"

namespace nashlab {

/// Transversal test slice {x0} x B(z0, epsilon): a vertical ball at a simple
/// fiber root. Transversality is exactly what the simple-root requirement
/// buys, so degree counts against it are honest intersection degrees.
struct VerticalSlice {
  CVec base_point;
  CVec center;
  double epsilon = 0.0;
};

struct Check1lResult {
  double sup = 0.0;  // sup over reference roots of distance to nearest candidate root
  bool pass = false;
};

/// Condition (1l): every root of the reference family is approximated by a
/// root of the candidate family over the same grid. Empty candidate fibers
/// under nonempty reference fibers give sup = inf.
Check1lResult check_1l(const std::vector<FiberSlice>& reference,
                       const std::vector<FiberSlice>& candidate, double tol);

struct SpuriousRoot {
  CVec base_point;
  CVec z;
  double dist_to_reference = 0.0;
};

struct Check2lResult {
  std::vector<SpuriousRoot> spurious;
  bool pass = false;
};

/// Condition (2l) against the canonical test compact: candidate roots at
/// distance >= delta from every reference root over the same base point are
/// spurious accumulation witnesses.
Check2lResult check_2l(const std::vector<FiberSlice>& reference,
                       const std::vector<FiberSlice>& candidate, double delta);

/// Total multiplicity of the slice's roots inside the vertical ball. With
/// enforce_transversal (the reference-set mode) the ball must isolate a
/// single simple root at its center, otherwise NumericError is raised.
int chain_degree_at(const FiberSlice& slice, const VerticalSlice& t, double center_tol = 1e-6,
                    bool enforce_transversal = true);
int chain_degree_at(const SystemFamily& sys, const HoloMap& map, const VerticalSlice& t,
                    const FiberOpts& opts = {}, double center_tol = 1e-6,
                    bool enforce_transversal = true);

struct DegreeTest {
  CVec base_point;
  CVec center;
  double epsilon = 0.0;
  int deg_reference = 0;
  int deg_candidate = 0;
  bool pass = false;
};

struct NuRecord {
  int nu = 0;
  double sup_1l_full = 0.0;  // unfiltered family
  double sup_1l_pure = 0.0;  // persistence-filtered family
  std::vector<SpuriousRoot> spurious_full;
  std::vector<SpuriousRoot> spurious_pure;
  std::vector<DegreeTest> degree_tests;  // filtered family only
  SheetCount sheets_pure;
  bool pass_1l = false;
  bool pass_2l = false;
  bool pass_chain = false;
  bool pass_sheets = false;
};

struct ConvergenceReport {
  std::vector<NuRecord> records;
  SheetCount sheets_reference;
  std::vector<int> nu_list;
  // Smallest tested nu from which the test passes for every larger tested
  // nu; -1 when absent.
  int nu_star_1l = -1;
  int nu_star_2l = -1;
  int nu_star_chain = -1;
  int nu_star_sheets = -1;
  bool pass = false;
  double r = 0.0;
  double tol_1l = 0.0;
  double delta = 0.0;
};

struct HarnessOpts {
  double r = 2.0;
  double conv_tol = 0.05;
  double delta = 0.0;      // 0 = 0.05 * r
  double eps_cap = 0.0;    // 0 = 0.2 * r
  FiberOpts fiber;
  PersistenceOpts persist;
};

/// The full verification harness: support convergence (1l)/(2l) on both the
/// raw and the persistence-filtered family over the grid, vertical-slice
/// degree tests at the sample points (filtered family, gated on support
/// convergence per nu), sheet-count equality, and the pass thresholds.
ConvergenceReport lemma22_check(const SystemFamily& sys, const HoloMap& h,
                                const std::vector<std::pair<int, HoloMap>>& family,
                                const std::vector<CVec>& grid,
                                const std::vector<CVec>& sample_points, const HarnessOpts& opts);

}  // namespace nashlab
