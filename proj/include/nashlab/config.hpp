#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nashlab/fibers.hpp"
#include "nashlab/variety.hpp"

namespace nashlab {

struct GridSpec {
  int interior_per_axis = 21;
  int boundary_samples = 64;
  int implicitization_samples = 200;
  int validation_per_axis = 9;
};

struct ToleranceSpec {
  double svd_tol = 1e-8;
  double tol_res = 1e-7;
  double cluster_radius = 0.0;  // 0 = automatic
  double conv_tol = 0.05;
  double delta = 0.0;           // 0 = 0.05 * r
};

struct ReportSpec {
  std::string dir = "reports";
  std::vector<std::string> formats = {"json", "csv", "text"};
};

/// One experiment: the polynomial system and coefficient map, the regions,
/// the approximation scheme, and every tolerance the run uses. Loaded from a
/// single JSON document; defaults are filled in and echoed back in reports.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string mode = "converge";  // or "implicitize"
  int n = 1, m = 1, p = 1, s = 1;
  std::vector<std::string> base_vars, coeff_vars, fiber_vars;
  std::vector<std::string> h_exprs;
  std::vector<std::string> q_exprs;
  Polydisc domain;       // map domain U
  Polydisc base_region;  // relatively compact region the harness runs over
  GridSpec grid;
  ApproxScheme scheme;
  std::vector<int> nu_list = {1, 2, 4, 8, 16, 32, 64, 128};
  int degree_bound = 3;
  ToleranceSpec tol;
  PersistenceOpts persistence;
  double r = 0.0;  // 0 = find automatically
  std::uint64_t seed = 12345;
  int sample_points = 25;
  ReportSpec report;
};

/// Parses and fully validates a config document. Throws ConfigError with the
/// offending field path (and the column for expression errors).
ExperimentConfig load_config(const nlohmann::json& doc);
ExperimentConfig load_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// The canonical echo: every field, defaults filled, deterministic order.
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

/// Built-in, file-free demo experiments:
///   example12, twisted-cubic-implicitize,
///   linear-sections-negative, linear-sections-constrained
ExperimentConfig builtin_demo(const std::string& name);
std::vector<std::string> builtin_demo_names();

HoloMap build_holomap(const ExperimentConfig& cfg);
SystemFamily build_system(const ExperimentConfig& cfg);

}  // namespace nashlab
