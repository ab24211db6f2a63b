#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nashlab/runner.hpp"

namespace {

using namespace nashlab;

struct CommonFlags {
  std::string out_dir;
  std::string format;
  std::string nu_list;
  std::int64_t seed = -1;
};

void apply_flags(ExperimentConfig& cfg, const CommonFlags& flags) {
  if (!flags.out_dir.empty()) cfg.report.dir = flags.out_dir;
  if (!flags.format.empty()) {
    if (flags.format != "json" && flags.format != "csv" && flags.format != "text") {
      throw ConfigError("--format must be json, csv or text");
    }
    cfg.report.formats = {flags.format};
  }
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (!flags.nu_list.empty()) {
    cfg.nu_list.clear();
    std::stringstream ss(flags.nu_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      int nu = std::atoi(item.c_str());
      if (nu < 1) throw ConfigError("--nu-list entries must be positive integers");
      cfg.nu_list.push_back(nu);
    }
    for (size_t i = 1; i < cfg.nu_list.size(); ++i) {
      if (cfg.nu_list[i] <= cfg.nu_list[i - 1]) throw ConfigError("--nu-list must be strictly increasing");
    }
  }
}

int finish_run(const ExperimentConfig& cfg, const RunResult& result) {
  auto written = emit_report(result, cfg.report.dir, cfg.report.formats);
  for (const std::string& path : written) std::cout << "wrote " << path << "\n";
  if (result.error) {
    std::cerr << "error at stage " << result.error->stage << ": " << result.error->message << "\n";
  }
  std::cout << "verdict: " << result.verdict << "\n";
  return result.exit_code;
}

int run_fibers(ExperimentConfig cfg, int nu) {
  if (cfg.mode != "converge") throw ConfigError("fibers: config has no polynomial system");
  HoloMap h = build_holomap(cfg);
  auto samples = sample_mixed(cfg.domain, cfg.grid.implicitization_samples);
  VarietyBasis basis =
      vanishing_ideal(map_images(h, samples), cfg.coeff_vars, cfg.degree_bound, cfg.tol.svd_tol);
  SystemFamily sys = build_system(cfg);

  HoloMap map = h;
  if (nu > 0) {
    auto validation = sample_interior(cfg.base_region, cfg.grid.validation_per_axis);
    map = make_approximant(cfg.scheme, h, basis, nu, validation).map;
  }

  FiberOpts fopts;
  fopts.tol_res = cfg.tol.tol_res;
  fopts.cluster_radius = cfg.tol.cluster_radius;
  auto interior = sample_interior(cfg.base_region, cfg.grid.interior_per_axis);
  double r = cfg.r;
  if (!(r > 0.0)) {
    auto grid = interior;
    for (const CVec& b : sample_boundary(cfg.base_region, cfg.grid.boundary_samples)) grid.push_back(b);
    r = find_r0(sys, h, grid, fopts).r0;
  }

  nlohmann::ordered_json out;
  out["config"] = config_to_json(cfg);
  out["nu"] = nu;
  out["r"] = r;
  std::ostringstream csv;
  csv << "x1_re,x1_im";
  for (int a = 0; a < sys.m(); ++a) {
    csv << ",z" << (a + 1) << "_re,z" << (a + 1) << "_im";
  }
  csv << ",multiplicity,residual,persistent\n";
  nlohmann::ordered_json slices = nlohmann::ordered_json::array();
  for (const CVec& x : interior) {
    FiberSlice s = fiber_solve(sys, map, x, r, fopts);
    FiberSlice pure = persistent_roots(sys, map, s, PersistenceOpts{}, fopts);
    std::vector<bool> persistent;
    for (const FiberRoot& root : s.roots) {
      bool kept = false;
      for (const FiberRoot& pr : pure.roots) {
        if ((pr.z - root.z).norm() < 1e-12) kept = true;
      }
      persistent.push_back(kept);
      csv << fmt12(x[0].real()) << "," << fmt12(x[0].imag());
      for (int a = 0; a < sys.m(); ++a) {
        csv << "," << fmt12(root.z[a].real()) << "," << fmt12(root.z[a].imag());
      }
      csv << "," << root.multiplicity << "," << fmt12(s.residual_max) << ","
          << (kept ? "true" : "false") << "\n";
    }
    slices.push_back(slice_to_json(s, &persistent));
  }
  out["slices"] = slices;

  std::filesystem::create_directories(cfg.report.dir);
  std::string stem = cfg.report.dir + "/" + cfg.name + ".fibers_nu" + std::to_string(nu);
  bool any = false;
  for (const std::string& f : cfg.report.formats) {
    if (f == "json") {
      std::ofstream(stem + ".json", std::ios::binary) << out.dump(2) << "\n";
      std::cout << "wrote " << stem << ".json\n";
      any = true;
    } else if (f == "csv") {
      std::ofstream(stem + ".csv", std::ios::binary) << csv.str();
      std::cout << "wrote " << stem << ".csv\n";
      any = true;
    }
  }
  if (!any) {
    std::ofstream(stem + ".json", std::ios::binary) << out.dump(2) << "\n";
    std::cout << "wrote " << stem << ".json\n";
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nashlab: approximation of polynomial systems with holomorphic coefficients"};
  app.require_subcommand(1);

  CommonFlags flags;
  app.add_option("--out", flags.out_dir, "Report output directory");
  app.add_option("--format", flags.format, "Report format: json|csv|text (default: all)");
  app.add_option("--seed", flags.seed, "Seed for the convergence sample points");
  app.add_option("--nu-list", flags.nu_list, "Comma-separated nu values, strictly increasing");

  std::string cfg_path, demo_name;
  int fiber_nu = 0;

  auto* implicitize = app.add_subcommand("implicitize", "Run the implicitization stage only");
  implicitize->add_option("config", cfg_path, "Experiment config (JSON)")->required();

  auto* fibers = app.add_subcommand("fibers", "Solve the fibers of X (or X_nu) over the grid");
  fibers->add_option("config", cfg_path, "Experiment config (JSON)")->required();
  fibers->add_option("--nu", fiber_nu, "Family index (0 = the reference set X)");

  auto* converge = app.add_subcommand("converge", "Run the full convergence pipeline");
  converge->add_option("config", cfg_path, "Experiment config (JSON)")->required();

  auto* demo = app.add_subcommand("demo", "Run a built-in demo experiment by name");
  demo->add_option("name", demo_name, "Demo name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (app.got_subcommand(demo)) {
      cfg = builtin_demo(demo_name);
    } else {
      cfg = load_config_file(cfg_path);
    }
    apply_flags(cfg, flags);

    if (app.got_subcommand(implicitize)) {
      cfg.mode = "implicitize";
      return finish_run(cfg, run_experiment(cfg));
    }
    if (app.got_subcommand(fibers)) {
      return run_fibers(cfg, fiber_nu);
    }
    // converge / demo: run the config's own mode.
    return finish_run(cfg, run_experiment(cfg));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << " at column " << e.position << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
