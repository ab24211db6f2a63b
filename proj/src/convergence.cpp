#include "nashlab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nashlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_matched_grids(const std::vector<FiberSlice>& a, const std::vector<FiberSlice>& b) {
  if (a.size() != b.size()) throw NumericError("mismatched grids: different sizes");
  for (size_t i = 0; i < a.size(); ++i) {
    if ((a[i].base_point - b[i].base_point).norm() > 1e-12) {
      throw NumericError("mismatched grids: base points differ");
    }
  }
}

}  // namespace

Check1lResult check_1l(const std::vector<FiberSlice>& reference,
                       const std::vector<FiberSlice>& candidate, double tol) {
  require_matched_grids(reference, candidate);
  Check1lResult out;
  for (size_t i = 0; i < reference.size(); ++i) {
    for (const FiberRoot& a : reference[i].roots) {
      double best = kInf;
      for (const FiberRoot& b : candidate[i].roots) {
        best = std::min(best, (a.z - b.z).norm());
      }
      out.sup = std::max(out.sup, best);
    }
  }
  out.pass = out.sup <= tol;
  return out;
}

Check2lResult check_2l(const std::vector<FiberSlice>& reference,
                       const std::vector<FiberSlice>& candidate, double delta) {
  require_matched_grids(reference, candidate);
  Check2lResult out;
  for (size_t i = 0; i < reference.size(); ++i) {
    for (const FiberRoot& b : candidate[i].roots) {
      double dist = kInf;
      for (const FiberRoot& a : reference[i].roots) {
        dist = std::min(dist, (a.z - b.z).norm());
      }
      if (dist >= delta) {
        out.spurious.push_back({candidate[i].base_point, b.z, dist});
      }
    }
  }
  out.pass = out.spurious.empty();
  return out;
}

int chain_degree_at(const FiberSlice& slice, const VerticalSlice& t, double center_tol,
                    bool enforce_transversal) {
  int degree = 0;
  int clusters_in_ball = 0;
  const FiberRoot* center_root = nullptr;
  for (const FiberRoot& root : slice.roots) {
    double dist = (root.z - t.center).norm();
    if (dist <= t.epsilon) {
      degree += root.multiplicity;
      ++clusters_in_ball;
      if (dist <= center_tol * (1.0 + t.center.norm())) center_root = &root;
    }
  }
  if (enforce_transversal) {
    if (center_root == nullptr) {
      throw NumericError("chain_degree_at: no fiber root at the slice center");
    }
    if (clusters_in_ball != 1 || center_root->multiplicity != 1) {
      throw NumericError(
          "chain_degree_at: non-transversal slice (center root not simple and isolated)");
    }
  }
  return degree;
}

int chain_degree_at(const SystemFamily& sys, const HoloMap& map, const VerticalSlice& t,
                    const FiberOpts& opts, double center_tol, bool enforce_transversal) {
  FiberSlice slice = fiber_solve(sys, map, t.base_point, kInf, opts);
  return chain_degree_at(slice, t, center_tol, enforce_transversal);
}

namespace {

// Vertical slices at every root of the reference fiber over one sample
// point. Every root must be simple (Lemma 2.2 samples regular points).
std::vector<VerticalSlice> slices_at_sample(const FiberSlice& fiber, double eps_cap) {
  for (const FiberRoot& root : fiber.roots) {
    if (root.multiplicity != 1) {
      throw NumericError("lemma22_check: sample point fails regularity (multiple fiber root)");
    }
  }
  if (fiber.roots.empty()) {
    throw NumericError("lemma22_check: sample point fails regularity (empty fiber)");
  }
  std::vector<VerticalSlice> out;
  for (size_t i = 0; i < fiber.roots.size(); ++i) {
    double sep = kInf;
    for (size_t j = 0; j < fiber.roots.size(); ++j) {
      if (j != i) sep = std::min(sep, (fiber.roots[i].z - fiber.roots[j].z).norm());
    }
    double eps = std::min(eps_cap, 0.5 * sep);
    out.push_back({fiber.base_point, fiber.roots[i].z, eps});
  }
  return out;
}

int threshold(const std::vector<int>& nus, const std::vector<bool>& pass) {
  int star = -1;
  for (int i = static_cast<int>(nus.size()) - 1; i >= 0; --i) {
    if (!pass[static_cast<size_t>(i)]) break;
    star = nus[static_cast<size_t>(i)];
  }
  return star;
}

}  // namespace

ConvergenceReport lemma22_check(const SystemFamily& sys, const HoloMap& h,
                                const std::vector<std::pair<int, HoloMap>>& family,
                                const std::vector<CVec>& grid,
                                const std::vector<CVec>& sample_points, const HarnessOpts& opts) {
  if (family.empty()) throw NumericError("lemma22_check: empty nu family");
  if (sample_points.empty()) throw NumericError("lemma22_check: no sample points");
  for (size_t i = 1; i < family.size(); ++i) {
    if (family[i].first <= family[i - 1].first) {
      throw NumericError("lemma22_check: nu list must be strictly increasing");
    }
  }
  ConvergenceReport rep;
  rep.r = opts.r;
  rep.tol_1l = opts.conv_tol;
  rep.delta = opts.delta > 0.0 ? opts.delta : 0.05 * opts.r;
  const double eps_cap = opts.eps_cap > 0.0 ? opts.eps_cap : 0.2 * opts.r;

  std::vector<FiberSlice> ref;
  ref.reserve(grid.size());
  for (const CVec& x : grid) ref.push_back(fiber_solve(sys, h, x, opts.r, opts.fiber));
  rep.sheets_reference = sheet_count(ref);

  // Vertical slices and reference degrees at the sample points.
  std::vector<VerticalSlice> slices;
  std::vector<int> ref_degree;
  for (const CVec& sp : sample_points) {
    FiberSlice fiber = fiber_solve(sys, h, sp, opts.r, opts.fiber);
    for (const VerticalSlice& t : slices_at_sample(fiber, eps_cap)) {
      ref_degree.push_back(chain_degree_at(fiber, t, 1e-6, true));
      slices.push_back(t);
    }
  }

  for (const auto& [nu, map] : family) {
    NuRecord rec;
    rec.nu = nu;
    rep.nu_list.push_back(nu);

    std::vector<FiberSlice> full, pure;
    full.reserve(grid.size());
    pure.reserve(grid.size());
    for (const CVec& x : grid) {
      FiberSlice s = fiber_solve(sys, map, x, opts.r, opts.fiber);
      pure.push_back(persistent_roots(sys, map, s, opts.persist, opts.fiber));
      full.push_back(std::move(s));
    }
    Check1lResult c1f = check_1l(ref, full, opts.conv_tol);
    Check1lResult c1p = check_1l(ref, pure, opts.conv_tol);
    rec.sup_1l_full = c1f.sup;
    rec.sup_1l_pure = c1p.sup;
    rec.pass_1l = c1f.pass && c1p.pass;

    Check2lResult c2f = check_2l(ref, full, rep.delta);
    Check2lResult c2p = check_2l(ref, pure, rep.delta);
    rec.spurious_full = c2f.spurious;
    rec.spurious_pure = c2p.spurious;
    rec.pass_2l = c2f.pass && c2p.pass;

    rec.sheets_pure = sheet_count(pure);
    rec.pass_sheets = rec.sheets_pure.max_cardinality == rep.sheets_reference.max_cardinality &&
                      rec.sheets_pure.generic_cardinality == rep.sheets_reference.generic_cardinality;

    // Degree tests only make sense once supports converge (Lemma 2.2
    // hypothesis); a nu that fails support cannot pass the chain test.
    if (rec.pass_1l && rec.pass_2l) {
      rec.pass_chain = true;
      for (size_t k = 0; k < slices.size(); ++k) {
        FiberSlice s = fiber_solve(sys, map, slices[k].base_point, opts.r, opts.fiber);
        FiberSlice sp = persistent_roots(sys, map, s, opts.persist, opts.fiber);
        DegreeTest dt;
        dt.base_point = slices[k].base_point;
        dt.center = slices[k].center;
        dt.epsilon = slices[k].epsilon;
        dt.deg_reference = ref_degree[k];
        dt.deg_candidate = chain_degree_at(sp, slices[k], 1e-6, false);
        dt.pass = dt.deg_candidate == dt.deg_reference;
        rec.pass_chain = rec.pass_chain && dt.pass;
        rec.degree_tests.push_back(std::move(dt));
      }
    }
    rep.records.push_back(std::move(rec));
  }

  std::vector<bool> p1, p2, pc, ps;
  for (const NuRecord& rec : rep.records) {
    p1.push_back(rec.pass_1l);
    p2.push_back(rec.pass_2l);
    pc.push_back(rec.pass_chain);
    ps.push_back(rec.pass_sheets);
  }
  rep.nu_star_1l = threshold(rep.nu_list, p1);
  rep.nu_star_2l = threshold(rep.nu_list, p2);
  rep.nu_star_chain = threshold(rep.nu_list, pc);
  rep.nu_star_sheets = threshold(rep.nu_list, ps);
  rep.pass = rep.nu_star_1l >= 0 && rep.nu_star_2l >= 0 && rep.nu_star_chain >= 0 &&
             rep.nu_star_sheets >= 0;
  return rep;
}

}  // namespace nashlab
