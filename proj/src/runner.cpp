#include "nashlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace nashlab {

namespace {

using nlohmann::ordered_json;

// Report numbers go through the fixed 12-digit formatting; non-finite values
// become strings (JSON has no inf).
ordered_json jnum(double x) {
  if (!std::isfinite(x)) return fmt12(x);
  return round12(x);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

ordered_json cvec_json(const CVec& v) {
  ordered_json out = ordered_json::array();
  for (int a = 0; a < v.size(); ++a) out.push_back({jnum(v[a].real()), jnum(v[a].imag())});
  return out;
}

}  // namespace

ordered_json basis_to_json(const VarietyBasis& basis) {
  ordered_json j;
  j["vars"] = basis.vars;
  j["degree_bound"] = basis.degree_bound;
  j["svd_tol"] = jnum(basis.svd_tol);
  j["sample_count"] = basis.sample_count;
  j["nullity"] = static_cast<int>(basis.relations.size());
  j["nullity_by_degree"] = basis.nullity_by_degree;
  j["minimal_degree"] = basis.minimal_degree;
  j["max_holdout_residual"] = jnum(basis.max_holdout_residual);
  ordered_json sv = ordered_json::array();
  for (double s : basis.singular_values) sv.push_back(jnum(s));
  j["singular_values"] = sv;
  auto relations_json = [](const std::vector<MultiPoly>& rels) {
    ordered_json arr = ordered_json::array();
    for (const MultiPoly& r : rels) {
      ordered_json rel;
      for (const auto& [e, c] : r.terms()) {
        std::string key;
        for (size_t i = 0; i < e.size(); ++i) {
          if (i) key += ",";
          key += std::to_string(e[i]);
        }
        rel[key] = {jnum(c.real()), jnum(c.imag())};
      }
      arr.push_back(rel);
    }
    return arr;
  };
  j["relations"] = relations_json(basis.relations);
  j["minimal_relations"] = relations_json(basis.minimal_relations);
  return j;
}

ordered_json slice_to_json(const FiberSlice& slice, const std::vector<bool>* persistent) {
  ordered_json j;
  j["base_point"] = cvec_json(slice.base_point);
  j["radius"] = jnum(slice.radius);
  j["residual_max"] = jnum(slice.residual_max);
  ordered_json degen = ordered_json::array();
  for (int i : slice.degenerate_equations) degen.push_back("q" + std::to_string(i + 1));
  j["degenerate_equations"] = degen;
  j["discarded_outside"] = slice.discarded_outside;
  ordered_json roots = ordered_json::array();
  for (size_t k = 0; k < slice.roots.size(); ++k) {
    ordered_json r;
    r["z"] = cvec_json(slice.roots[k].z);
    r["multiplicity"] = slice.roots[k].multiplicity;
    if (persistent) r["persistent"] = (*persistent)[k];
    roots.push_back(r);
  }
  j["roots"] = roots;
  return j;
}

std::vector<CVec> draw_sample_points(const SystemFamily& sys, const HoloMap& h,
                                     const std::vector<CVec>& grid, int count,
                                     std::uint64_t seed, const FiberOpts& opts) {
  std::vector<size_t> candidates;
  for (size_t i = 0; i < grid.size(); ++i) {
    FiberSlice s = fiber_solve(sys, h, grid[i], std::numeric_limits<double>::infinity(), opts);
    if (s.roots.empty() || !s.degenerate_equations.empty()) continue;
    bool simple = true;
    for (const FiberRoot& r : s.roots) {
      if (r.multiplicity != 1) simple = false;
    }
    if (simple) candidates.push_back(i);
  }
  if (candidates.empty()) {
    throw NumericError("draw_sample_points: no regular grid points available");
  }
  std::uint64_t state = seed;
  for (size_t i = 0; i + 1 < candidates.size() && i < static_cast<size_t>(count); ++i) {
    size_t j = i + static_cast<size_t>(splitmix64(state) % (candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }
  size_t take = std::min(candidates.size(), static_cast<size_t>(count));
  std::vector<size_t> chosen(candidates.begin(), candidates.begin() + static_cast<long>(take));
  std::sort(chosen.begin(), chosen.end());
  std::vector<CVec> out;
  for (size_t i : chosen) out.push_back(grid[i]);
  return out;
}

namespace {

ordered_json convergence_json(const ConvergenceReport& rep,
                              const std::map<int, std::pair<double, double>>& scheme_stats) {
  ordered_json j;
  j["r"] = jnum(rep.r);
  j["delta"] = jnum(rep.delta);
  j["conv_tol"] = jnum(rep.tol_1l);
  j["sheets_X"] = {{"max", rep.sheets_reference.max_cardinality},
                   {"generic", rep.sheets_reference.generic_cardinality}};
  ordered_json per_nu = ordered_json::array();
  for (const NuRecord& rec : rep.records) {
    ordered_json r;
    r["nu"] = rec.nu;
    auto it = scheme_stats.find(rec.nu);
    if (it != scheme_stats.end()) {
      r["map_sup_distance"] = jnum(it->second.first);
      r["map_membership"] = jnum(it->second.second);
    }
    r["sup_1l_full"] = jnum(rec.sup_1l_full);
    r["sup_1l_pure"] = jnum(rec.sup_1l_pure);
    auto spurious_json = [](const std::vector<SpuriousRoot>& list) {
      ordered_json arr = ordered_json::array();
      for (const SpuriousRoot& s : list) {
        arr.push_back({{"x", cvec_json(s.base_point)},
                       {"z", cvec_json(s.z)},
                       {"dist", jnum(s.dist_to_reference)}});
      }
      return arr;
    };
    r["spurious_full"] = spurious_json(rec.spurious_full);
    r["spurious_pure"] = spurious_json(rec.spurious_pure);
    int chain_passed = 0;
    for (const DegreeTest& dt : rec.degree_tests) chain_passed += dt.pass ? 1 : 0;
    r["chain_tests_passed"] = chain_passed;
    r["chain_tests_total"] = static_cast<int>(rec.degree_tests.size());
    r["sheets_pure"] = {{"max", rec.sheets_pure.max_cardinality},
                        {"generic", rec.sheets_pure.generic_cardinality}};
    r["pass_1l"] = rec.pass_1l;
    r["pass_2l"] = rec.pass_2l;
    r["pass_chain"] = rec.pass_chain;
    r["pass_sheets"] = rec.pass_sheets;
    per_nu.push_back(r);
  }
  j["per_nu"] = per_nu;
  j["thresholds"] = {{"nu_star_1l", rep.nu_star_1l},
                     {"nu_star_2l", rep.nu_star_2l},
                     {"nu_star_chain", rep.nu_star_chain},
                     {"nu_star_sheets", rep.nu_star_sheets}};
  j["verdict"] = rep.pass ? "pass" : "fail";
  return j;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult result;
  result.cfg = cfg;
  result.report["config"] = config_to_json(cfg);
  std::string stage = "setup";
  try {
    HoloMap h = build_holomap(cfg);

    stage = "sample";
    std::vector<CVec> samples = sample_mixed(cfg.domain, cfg.grid.implicitization_samples);
    std::vector<CVec> images = map_images(h, samples);
    result.report["stages"]["sample"] = {{"count", static_cast<int>(images.size())}};

    stage = "vanishing_ideal";
    VarietyBasis basis = vanishing_ideal(images, cfg.coeff_vars, cfg.degree_bound, cfg.tol.svd_tol);
    result.basis = basis;
    result.report["stages"]["implicitization"] = basis_to_json(basis);

    if (cfg.mode == "implicitize") {
      result.verdict = "pass";
      result.exit_code = kExitPass;
      result.report["verdict"] = result.verdict;
      result.report["exit_code"] = result.exit_code;
      return result;
    }

    stage = "scheme";
    SystemFamily sys = build_system(cfg);
    std::vector<CVec> validation = sample_interior(cfg.base_region, cfg.grid.validation_per_axis);
    std::vector<std::pair<int, HoloMap>> family;
    std::map<int, std::pair<double, double>> scheme_stats;
    double prev_sup = std::numeric_limits<double>::infinity();
    const bool truncation = cfg.scheme.kind != ApproxScheme::Kind::Parametric;
    ordered_json scheme_json = ordered_json::array();
    for (int nu : cfg.nu_list) {
      ApproximantResult a = make_approximant(cfg.scheme, h, basis, nu, validation);
      if (truncation && a.sup_distance > prev_sup + 1e-12) {
        throw NumericError("truncation sup distance increased at nu = " + std::to_string(nu) +
                           " (" + fmt12(a.sup_distance) + " > " + fmt12(prev_sup) + ")");
      }
      prev_sup = a.sup_distance;
      scheme_stats[nu] = {a.sup_distance, a.max_membership};
      scheme_json.push_back({{"nu", nu},
                             {"sup_distance", jnum(a.sup_distance)},
                             {"max_membership", jnum(a.max_membership)}});
      family.emplace_back(nu, std::move(a.map));
    }
    result.report["stages"]["scheme"] = scheme_json;

    std::vector<CVec> interior = sample_interior(cfg.base_region, cfg.grid.interior_per_axis);
    std::vector<CVec> r0_grid = interior;
    for (const CVec& b : sample_boundary(cfg.base_region, cfg.grid.boundary_samples)) {
      r0_grid.push_back(b);
    }
    FiberOpts fopts;
    fopts.tol_res = cfg.tol.tol_res;
    fopts.cluster_radius = cfg.tol.cluster_radius;

    stage = "find_r0";
    double r = cfg.r;
    if (!(r > 0.0)) {
      R0Result r0 = find_r0(sys, h, r0_grid, fopts);
      r = r0.r0;
      result.report["stages"]["r0"] = {{"r", jnum(r0.r0)},
                                       {"margin", jnum(r0.margin)},
                                       {"total_multiplicity", r0.total_multiplicity}};
    } else {
      result.report["stages"]["r0"] = {{"r", jnum(r)}, {"fixed", true}};
    }
    result.r = r;

    stage = "check_proper";
    PropernessReport prop = check_proper(sys, h, interior, r, fopts, cfg.grid.boundary_samples);
    result.report["stages"]["properness"] = {
        {"pass", prop.pass},
        {"min_sphere_gap", jnum(prop.min_sphere_gap)},
        {"required_gap", jnum(prop.required_gap)},
        {"multiplicity_constant", prop.multiplicity_constant},
        {"total_multiplicity", prop.total_multiplicity},
        {"witnesses", prop.witnesses}};
    if (!prop.pass) {
      throw NumericError("properness check failed" +
                         (prop.witnesses.empty() ? std::string()
                                                 : std::string(": ") + prop.witnesses.front()));
    }

    stage = "convergence";
    std::vector<CVec> sample_points =
        draw_sample_points(sys, h, interior, cfg.sample_points, cfg.seed, fopts);
    HarnessOpts hopts;
    hopts.r = r;
    hopts.conv_tol = cfg.tol.conv_tol;
    hopts.delta = cfg.tol.delta;
    hopts.fiber = fopts;
    ConvergenceReport conv = lemma22_check(sys, h, family, interior, sample_points, hopts);
    result.convergence = conv;
    result.report["stages"]["convergence"] = convergence_json(conv, scheme_stats);

    result.verdict = conv.pass ? "pass" : "fail";
    result.exit_code = conv.pass ? kExitPass : kExitFail;
  } catch (const std::exception& e) {
    result.verdict = "error";
    result.exit_code = kExitNumeric;
    result.error = StageError{stage, e.what()};
    result.report["error"] = {{"stage", stage}, {"message", e.what()}};
  }
  result.report["verdict"] = result.verdict;
  result.report["exit_code"] = result.exit_code;
  return result;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericError("cannot write " + path);
  out << content;
}

std::string csv_report(const RunResult& result) {
  std::ostringstream csv;
  csv << "nu,test,value,pass\n";
  if (result.basis) {
    csv << "-1,nullity," << result.basis->relations.size() << ",true\n";
    csv << "-1,max_holdout_residual," << fmt12(result.basis->max_holdout_residual) << ",true\n";
  }
  if (result.convergence) {
    const ConvergenceReport& rep = *result.convergence;
    for (const NuRecord& rec : rep.records) {
      auto row = [&](const char* test, const std::string& value, bool pass) {
        csv << rec.nu << "," << test << "," << value << "," << (pass ? "true" : "false") << "\n";
      };
      row("sup_1l_full", fmt12(rec.sup_1l_full), rec.sup_1l_full <= rep.tol_1l);
      row("sup_1l_pure", fmt12(rec.sup_1l_pure), rec.sup_1l_pure <= rep.tol_1l);
      row("spurious_full_count", std::to_string(rec.spurious_full.size()), rec.spurious_full.empty());
      row("spurious_pure_count", std::to_string(rec.spurious_pure.size()), rec.spurious_pure.empty());
      int chain_passed = 0;
      for (const DegreeTest& dt : rec.degree_tests) chain_passed += dt.pass ? 1 : 0;
      row("chain_tests_passed",
          std::to_string(chain_passed) + "/" + std::to_string(rec.degree_tests.size()),
          rec.pass_chain);
      row("sheets_pure_max", std::to_string(rec.sheets_pure.max_cardinality), rec.pass_sheets);
      row("sheets_pure_generic", std::to_string(rec.sheets_pure.generic_cardinality), rec.pass_sheets);
    }
    auto threshold_row = [&](const char* test, int val) {
      csv << "-1," << test << "," << val << "," << (val >= 0 ? "true" : "false") << "\n";
    };
    threshold_row("nu_star_1l", rep.nu_star_1l);
    threshold_row("nu_star_2l", rep.nu_star_2l);
    threshold_row("nu_star_chain", rep.nu_star_chain);
    threshold_row("nu_star_sheets", rep.nu_star_sheets);
  }
  csv << "-1,verdict," << result.verdict << "," << (result.verdict == "pass" ? "true" : "false")
      << "\n";
  return csv.str();
}

std::string text_summary(const RunResult& result) {
  std::ostringstream out;
  out << "nashlab experiment: " << result.cfg.name << "\n";
  out << "== configuration ==\n" << result.report["config"].dump(2) << "\n";
  out << "== result ==\n";
  if (result.error) {
    out << "error at stage " << result.error->stage << ": " << result.error->message << "\n";
  }
  if (result.basis) {
    out << "implicitization: " << result.basis->relations.size() << " relations at degree <= "
        << result.basis->degree_bound << " (minimal degree " << result.basis->minimal_degree
        << ", holdout residual " << fmt12(result.basis->max_holdout_residual) << ")\n";
    for (const MultiPoly& rel : result.basis->relations) {
      out << "  relation: " << rel.to_string() << "\n";
    }
  }
  if (result.convergence) {
    const ConvergenceReport& rep = *result.convergence;
    out << "r = " << fmt12(rep.r) << ", delta = " << fmt12(rep.delta) << ", conv_tol = "
        << fmt12(rep.tol_1l) << "\n";
    for (const NuRecord& rec : rep.records) {
      out << "nu = " << rec.nu << ": sup_1l = " << fmt12(rec.sup_1l_full) << " (pure "
          << fmt12(rec.sup_1l_pure) << "), spurious = " << rec.spurious_full.size() << "/"
          << rec.spurious_pure.size() << ", 1l " << (rec.pass_1l ? "pass" : "FAIL") << ", 2l "
          << (rec.pass_2l ? "pass" : "FAIL") << ", chain "
          << (rec.pass_chain ? "pass" : "FAIL") << ", sheets "
          << (rec.pass_sheets ? "pass" : "FAIL") << "\n";
    }
    out << "nu* (1l/2l/chain/sheets) = " << rep.nu_star_1l << "/" << rep.nu_star_2l << "/"
        << rep.nu_star_chain << "/" << rep.nu_star_sheets << "\n";
  }
  out << "verdict: " << result.verdict << "\n";
  return out.str();
}

}  // namespace

std::vector<std::string> emit_report(const RunResult& result, const std::string& out_dir,
                                     const std::vector<std::string>& formats) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  for (const std::string& format : formats) {
    std::string path;
    if (format == "json") {
      path = out_dir + "/" + result.cfg.name + ".report.json";
      write_file(path, result.report.dump(2) + "\n");
    } else if (format == "csv") {
      path = out_dir + "/" + result.cfg.name + ".report.csv";
      write_file(path, csv_report(result));
    } else if (format == "text") {
      path = out_dir + "/" + result.cfg.name + ".summary.txt";
      write_file(path, text_summary(result));
    } else {
      throw ConfigError("emit_report: unknown format " + format);
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace nashlab
