#include "nashlab/fibers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace nashlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MultiPoly pruned(const MultiPoly& p, double rel_tol) {
  double thresh = rel_tol * p.coeff_scale();
  MultiPoly out(p.variables());
  for (const auto& [e, c] : p.terms()) {
    if (std::abs(c) > thresh) out.add_term(e, c);
  }
  return out;
}

struct Restrictions {
  std::vector<MultiPoly> polys;  // over the fiber variables, pruned
  std::vector<double> scales;    // pre-prune coefficient scales
  std::vector<int> degenerate;   // identically-zero equations (0-based)
  std::vector<int> active;
};

Restrictions restrict_system(const SystemFamily& sys, const HoloMap& map, const CVec& x,
                             const FiberOpts& opts) {
  CVec v = map.eval(x);
  std::map<std::string, Cx> assign;
  for (int j = 0; j < sys.p(); ++j) assign[sys.coeff_vars[static_cast<size_t>(j)]] = v[j];

  Restrictions r;
  double system_scale = 0.0;
  for (const MultiPoly& qi : sys.q) {
    MultiPoly sub = substitute(qi, assign);
    r.polys.push_back(sub);
    r.scales.push_back(sub.coeff_scale());
    system_scale = std::max(system_scale, r.scales.back());
  }
  if (system_scale <= 0.0) {
    throw NumericError("fiber_solve: all restrictions identically zero (fiber not finite)");
  }
  for (int i = 0; i < sys.s(); ++i) {
    if (r.scales[static_cast<size_t>(i)] <= opts.degen_tol * system_scale) {
      r.degenerate.push_back(i);
    } else {
      r.active.push_back(i);
      r.polys[static_cast<size_t>(i)] = pruned(r.polys[static_cast<size_t>(i)], UniPoly::kLeadTol);
    }
  }
  if (r.active.empty()) {
    throw NumericError("fiber_solve: all restrictions identically zero (fiber not finite)");
  }
  return r;
}

struct PointCluster {
  CVec center;
  int multiplicity = 0;
};

std::vector<PointCluster> cluster_points(const std::vector<CVec>& pts, double radius) {
  size_t n = pts.size();
  std::vector<size_t> parent(n);
  std::iota(parent.begin(), parent.end(), size_t{0});
  auto find = [&](size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if ((pts[i] - pts[j]).norm() <= radius) {
        size_t ra = find(i), rb = find(j);
        if (ra != rb) parent[rb] = ra;
      }
    }
  }
  std::map<size_t, std::vector<size_t>> groups;
  for (size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<PointCluster> out;
  for (const auto& [root_id, members] : groups) {
    PointCluster c;
    c.center = CVec::Zero(pts[members.front()].size());
    for (size_t i : members) c.center += pts[i];
    c.center /= static_cast<double>(members.size());
    c.multiplicity = static_cast<int>(members.size());
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const PointCluster& a, const PointCluster& b) {
    for (int k = 0; k < a.center.size(); ++k) {
      if (a.center[k].real() != b.center[k].real()) return a.center[k].real() < b.center[k].real();
      if (a.center[k].imag() != b.center[k].imag()) return a.center[k].imag() < b.center[k].imag();
    }
    return false;
  });
  return out;
}

// Residual of restriction i at fiber point z, relative to its scale.
double relative_residual(const Restrictions& r, int i, const std::vector<std::string>& fiber_vars,
                         const CVec& z) {
  std::map<std::string, Cx> assign;
  for (int a = 0; a < z.size(); ++a) assign[fiber_vars[static_cast<size_t>(a)]] = z[a];
  return std::abs(poly_eval(r.polys[static_cast<size_t>(i)], assign)) / r.scales[static_cast<size_t>(i)];
}

FiberSlice finish_slice(const SystemFamily& sys, const Restrictions& r, const CVec& x, double rad,
                        std::vector<CVec> kept, const FiberOpts& opts) {
  FiberSlice slice;
  slice.base_point = x;
  slice.radius = rad;
  slice.degenerate_equations = r.degenerate;

  double maxnorm = 0.0;
  for (const CVec& z : kept) maxnorm = std::max(maxnorm, z.norm());
  double cluster_radius =
      opts.cluster_radius > 0.0 ? opts.cluster_radius : 1e-6 * (1.0 + maxnorm);

  for (const PointCluster& c : cluster_points(kept, cluster_radius)) {
    if (c.center.norm() < rad) {
      slice.roots.push_back({c.center, c.multiplicity});
      for (int i : r.active) {
        slice.residual_max =
            std::max(slice.residual_max, relative_residual(r, i, sys.fiber_vars, c.center));
      }
    } else {
      slice.discarded_outside += c.multiplicity;
    }
  }
  return slice;
}

FiberSlice solve_m1(const SystemFamily& sys, const Restrictions& r, const CVec& x, double rad,
                    const FiberOpts& opts) {
  std::vector<std::pair<int, UniPoly>> active;  // (equation, restriction)
  for (int i : r.active) active.emplace_back(i, to_unipoly(r.polys[static_cast<size_t>(i)]));

  int pivot = -1, pivot_deg = 0;
  for (const auto& [i, u] : active) {
    int d = u.degree();
    if (d == 0) {
      // Nonzero constant: the fiber is empty.
      return finish_slice(sys, r, x, rad, {}, opts);
    }
    if (pivot < 0 || d < pivot_deg) {
      pivot = i;
      pivot_deg = d;
    }
  }

  const UniPoly* pivot_poly = nullptr;
  for (const auto& [i, u] : active) {
    if (i == pivot) pivot_poly = &u;
  }
  std::vector<Cx> roots = aberth_roots(*pivot_poly, opts.aberth_tol);

  std::vector<CVec> kept;
  for (Cx z : roots) {
    bool ok = true;
    for (const auto& [i, u] : active) {
      if (std::abs(u.eval(z)) > opts.tol_res * u.scale()) {
        ok = false;
        break;
      }
    }
    if (ok) {
      CVec zz(1);
      zz << z;
      kept.push_back(zz);
    }
  }
  return finish_slice(sys, r, x, rad, std::move(kept), opts);
}

FiberSlice solve_m2(const SystemFamily& sys, const Restrictions& r, const CVec& x, double rad,
                    const FiberOpts& opts) {
  const std::string& z1 = sys.fiber_vars[0];
  const std::string& z2 = sys.fiber_vars[1];

  // Constraints on z1: restrictions free of z2, plus resultants against the
  // pivot (the first restriction of positive z2-degree).
  std::vector<UniPoly> constraints;
  int pivot = -1;
  for (int i : r.active) {
    const MultiPoly& pi = r.polys[static_cast<size_t>(i)];
    if (pi.degree_in(z2) == 0) {
      if (pi.total_degree() == 0) return finish_slice(sys, r, x, rad, {}, opts);
      constraints.push_back(to_unipoly(coeffs_in(pi, z2)[0]));
    } else if (pivot < 0) {
      pivot = i;
    }
  }
  if (pivot < 0) {
    throw NumericError("fiber_solve: no restriction involves " + z2 + " (fiber not finite)");
  }
  const MultiPoly& pivot_poly = r.polys[static_cast<size_t>(pivot)];
  for (int i : r.active) {
    if (i == pivot) continue;
    const MultiPoly& pi = r.polys[static_cast<size_t>(i)];
    if (pi.degree_in(z2) == 0) continue;
    MultiPoly res = sylvester_resultant(pivot_poly, pi, z2);
    double zero_thresh = 1e-10 *
                         std::pow(1.0 + pivot_poly.coeff_scale(), pi.degree_in(z2)) *
                         std::pow(1.0 + pi.coeff_scale(), pivot_poly.degree_in(z2));
    if (res.coeff_scale() <= zero_thresh) continue;  // shared component, no constraint
    UniPoly u = to_unipoly(res);
    if (u.degree() == 0) return finish_slice(sys, r, x, rad, {}, opts);
    constraints.push_back(u);
  }
  if (constraints.empty()) {
    throw NumericError("fiber_solve: cannot confine " + z1 + " (fiber not finite)");
  }

  size_t gen = 0;
  for (size_t k = 1; k < constraints.size(); ++k) {
    if (constraints[k].degree() < constraints[gen].degree()) gen = k;
  }
  std::vector<Cx> z1_candidates;
  for (Cx a : aberth_roots(constraints[gen], opts.aberth_tol)) {
    bool ok = true;
    for (const UniPoly& c : constraints) {
      if (std::abs(c.eval(a)) > opts.tol_res * c.scale()) {
        ok = false;
        break;
      }
    }
    if (ok) z1_candidates.push_back(a);
  }

  std::vector<int> generators{pivot};
  for (int i : r.active) {
    if (i != pivot && r.polys[static_cast<size_t>(i)].degree_in(z2) >= 1) generators.push_back(i);
  }

  std::vector<CVec> kept;
  for (Cx a : z1_candidates) {
    // Back-substitute; if the pivot degenerates at a, fall back to another
    // restriction with z2-degree >= 1 and let the residual filter decide.
    UniPoly sub;
    bool have = false;
    for (int i : generators) {
      const MultiPoly& pi = r.polys[static_cast<size_t>(i)];
      UniPoly cand = to_unipoly(substitute(pi, {{z1, a}}));
      double local_scale = pi.coeff_scale() * std::pow(1.0 + std::abs(a), pi.degree_in(z1));
      if (cand.scale() <= opts.degen_tol * local_scale) continue;  // vanishes on the line
      sub = cand;
      have = true;
      break;
    }
    if (!have) {
      throw NumericError("fiber_solve: every restriction vanishes on the line " + z1 + " = " +
                         fmt12(a.real()) + (a.imag() < 0 ? "-" : "+") + fmt12(std::abs(a.imag())) +
                         "i (fiber not finite)");
    }
    if (sub.degree() <= 0) continue;  // nonzero constant: no z2 over this candidate
    for (Cx b : aberth_roots(sub, opts.aberth_tol)) {
      CVec z(2);
      z << a, b;
      bool ok = true;
      for (int i : r.active) {
        if (relative_residual(r, i, sys.fiber_vars, z) > opts.tol_res) {
          ok = false;
          break;
        }
      }
      if (ok) kept.push_back(z);
    }
  }
  return finish_slice(sys, r, x, rad, std::move(kept), opts);
}

}  // namespace

SystemFamily make_system(std::vector<MultiPoly> q, std::vector<std::string> coeff_vars,
                         std::vector<std::string> fiber_vars, HoloMap h, Polydisc base_region) {
  if (q.empty()) throw NumericError("make_system: need at least one polynomial");
  if (fiber_vars.empty() || fiber_vars.size() > 2) {
    throw NumericError("make_system: fiber dimension must be 1 or 2");
  }
  if (static_cast<int>(coeff_vars.size()) != h.target_dim()) {
    throw NumericError("make_system: coefficient count differs from map dimension");
  }
  std::vector<std::string> all_vars = coeff_vars;
  all_vars.insert(all_vars.end(), fiber_vars.begin(), fiber_vars.end());
  for (const MultiPoly& qi : q) {
    if (qi.variables() != all_vars) {
      throw NumericError("make_system: q must be expressed over (coeff, fiber) variables");
    }
  }
  if (base_region.dim() != h.base_dim()) {
    throw NumericError("make_system: base region dimension mismatch");
  }
  for (int a = 0; a < base_region.dim(); ++a) {
    double reach = std::abs(base_region.center[a] - h.domain.center[a]) +
                   base_region.radii[static_cast<size_t>(a)];
    if (!(reach < h.domain.radii[static_cast<size_t>(a)])) {
      throw NumericError("make_system: base region not relatively compact in the map domain");
    }
  }
  SystemFamily sys;
  sys.q = std::move(q);
  sys.coeff_vars = std::move(coeff_vars);
  sys.fiber_vars = std::move(fiber_vars);
  sys.h = std::move(h);
  sys.base_region = std::move(base_region);
  return sys;
}

int total_multiplicity(const FiberSlice& slice) {
  int t = 0;
  for (const FiberRoot& r : slice.roots) t += r.multiplicity;
  return t;
}

int total_multiplicity_within(const FiberSlice& slice, double r) {
  int t = 0;
  for (const FiberRoot& root : slice.roots) {
    if (root.z.norm() < r) t += root.multiplicity;
  }
  return t;
}

FiberSlice fiber_solve(const SystemFamily& sys, const HoloMap& map, const CVec& x, double r,
                       const FiberOpts& opts) {
  if (x.size() != sys.n()) throw NumericError("fiber_solve: base point dimension mismatch");
  Restrictions rs = restrict_system(sys, map, x, opts);
  return (sys.m() == 1) ? solve_m1(sys, rs, x, r, opts) : solve_m2(sys, rs, x, r, opts);
}

R0Result find_r0(const SystemFamily& sys, const HoloMap& map, const std::vector<CVec>& grid,
                 const FiberOpts& opts, double r_cap) {
  if (grid.empty()) throw NumericError("find_r0: empty grid");
  std::vector<FiberSlice> slices;
  slices.reserve(grid.size());
  for (const CVec& x : grid) slices.push_back(fiber_solve(sys, map, x, kInf, opts));

  for (double r = 1.0; r <= r_cap; r *= 2.0) {
    bool ok = true;
    double margin = kInf;
    int common = -1;
    bool constant = true;
    for (const FiberSlice& s : slices) {
      if (total_multiplicity_within(s, r) != total_multiplicity_within(s, 2.0 * r)) ok = false;
      for (const FiberRoot& root : s.roots) {
        double gap = std::abs(root.z.norm() - r);
        margin = std::min(margin, gap);
        if (gap <= 0.1 * r) ok = false;
      }
      if (s.degenerate_equations.empty()) {
        int c = total_multiplicity_within(s, r);
        if (common < 0) common = c;
        if (c != common) constant = false;
      }
    }
    if (ok && constant) return {r, margin, common < 0 ? 0 : common};
  }
  throw NumericError(
      "find_r0: no stabilization up to the search cap (properness violated or cap too small)");
}

PropernessReport check_proper(const SystemFamily& sys, const HoloMap& map,
                              const std::vector<CVec>& grid, double r, const FiberOpts& opts,
                              int boundary_samples, double margin_frac) {
  std::vector<CVec> points = grid;
  for (const CVec& b : sample_boundary(sys.base_region, boundary_samples)) points.push_back(b);

  PropernessReport rep;
  rep.required_gap = margin_frac * r;
  rep.min_sphere_gap = kInf;
  rep.multiplicity_constant = true;

  int common = -1;
  for (const CVec& x : points) {
    FiberSlice s = fiber_solve(sys, map, x, kInf, opts);
    for (const FiberRoot& root : s.roots) {
      double gap = std::abs(root.z.norm() - r);
      if (gap < rep.min_sphere_gap) rep.min_sphere_gap = gap;
      if (gap <= rep.required_gap) {
        rep.witnesses.push_back("root near sphere at base re=" + fmt12(x[0].real()) +
                                " im=" + fmt12(x[0].imag()) + " gap=" + fmt12(gap));
      }
    }
    if (s.degenerate_equations.empty()) {
      int c = total_multiplicity_within(s, r);
      if (common < 0) common = c;
      if (c != common) {
        rep.multiplicity_constant = false;
        rep.witnesses.push_back("fiber multiplicity " + std::to_string(c) + " at base re=" +
                                fmt12(x[0].real()) + " im=" + fmt12(x[0].imag()) +
                                " differs from " + std::to_string(common));
      }
    }
  }
  rep.total_multiplicity = rep.multiplicity_constant ? common : -1;
  rep.pass = rep.multiplicity_constant && rep.min_sphere_gap > rep.required_gap;
  return rep;
}

FiberSlice persistent_roots(const SystemFamily& sys, const HoloMap& map, const FiberSlice& slice,
                            const PersistenceOpts& opts, const FiberOpts& fiber_opts,
                            PersistenceInfo* info) {
  FiberSlice out = slice;
  if (info) *info = PersistenceInfo{};
  if (slice.roots.empty()) return out;

  const int n = sys.n();
  // Probes stay inside the base region; for points on its closure fall back
  // to the map domain (the base region is relatively compact in it).
  double gap = sys.base_region.boundary_gap(slice.base_point);
  bool shrunk = false;
  if (!(gap > 0.0)) {
    gap = map.domain.boundary_gap(slice.base_point);
    shrunk = true;
    if (!(gap > 0.0)) {
      throw NumericError("persistent_roots: base point outside the map domain");
    }
  }
  double probe_r = opts.probe_radius_frac * sys.base_region.max_radius();
  if (probe_r >= gap) {
    probe_r = 0.5 * gap;
    shrunk = true;
  }
  double track = opts.track_bound_frac * sys.base_region.max_radius();
  if (info) *info = PersistenceInfo{probe_r, shrunk};

  std::vector<FiberSlice> probes;
  int per_axis = std::max(1, opts.k_probes / n);
  for (int j = 0; j < opts.k_probes; ++j) {
    int axis = j % n;
    double phase = 2.0 * M_PI * (j / n) / per_axis;
    CVec px = slice.base_point;
    px[axis] += probe_r * Cx(std::cos(phase), std::sin(phase));
    probes.push_back(fiber_solve(sys, map, px, kInf, fiber_opts));
  }

  out.roots.clear();
  for (const FiberRoot& root : slice.roots) {
    bool persists = true;
    for (const FiberSlice& probe : probes) {
      bool tracked = false;
      for (const FiberRoot& pr : probe.roots) {
        if ((pr.z - root.z).norm() <= track) {
          tracked = true;
          break;
        }
      }
      if (!tracked) {
        persists = false;
        break;
      }
    }
    if (persists) out.roots.push_back(root);
  }
  return out;
}

SheetCount sheet_count(const std::vector<FiberSlice>& slices) {
  SheetCount sc;
  std::map<int, int> freq;
  for (const FiberSlice& s : slices) {
    int c = static_cast<int>(s.roots.size());
    sc.max_cardinality = std::max(sc.max_cardinality, c);
    ++freq[c];
  }
  int best = -1;
  for (const auto& [count, occurrences] : freq) {
    if (occurrences > best) {
      best = occurrences;
      sc.generic_cardinality = count;
    }
  }
  return sc;
}

SheetCount sheet_count(const SystemFamily& sys, const HoloMap& map, const std::vector<CVec>& grid,
                       double r, const FiberOpts& opts) {
  std::vector<FiberSlice> slices;
  slices.reserve(grid.size());
  for (const CVec& x : grid) slices.push_back(fiber_solve(sys, map, x, r, opts));
  return sheet_count(slices);
}

}  // namespace nashlab
