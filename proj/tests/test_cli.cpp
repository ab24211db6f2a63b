#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nashlab/runner.hpp"

using namespace nashlab;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A small, fast variant of the example12 demo for pipeline tests.
ExperimentConfig small_example12() {
  ExperimentConfig cfg = builtin_demo("example12");
  cfg.grid.interior_per_axis = 9;
  cfg.grid.boundary_samples = 16;
  cfg.grid.implicitization_samples = 120;
  cfg.nu_list = {1, 2, 4};
  cfg.sample_points = 8;
  return cfg;
}

}  // namespace

TEST_CASE("builtin example12 config loads verbatim") {
  ExperimentConfig cfg = builtin_demo("example12");
  CHECK(cfg.name == "example12");
  CHECK(cfg.mode == "converge");
  CHECK(cfg.n == 1);
  CHECK(cfg.m == 1);
  CHECK(cfg.p == 3);
  CHECK(cfg.s == 2);
  REQUIRE(cfg.h_exprs.size() == 3);
  CHECK(cfg.h_exprs[1] == "x1*exp(x1)");
  REQUIRE(cfg.q_exprs.size() == 2);
  CHECK(cfg.scheme.kind == ApproxScheme::Kind::Parametric);
  REQUIRE(cfg.scheme.components.size() == 3);
  CHECK(cfg.scheme.components[1] == "(x1 - 1/NU)*exp(x1)");
  CHECK(cfg.degree_bound == 2);
  CHECK(cfg.nu_list == std::vector<int>{1, 2, 4, 8, 16, 32, 64, 128});

  // The parametric template evaluates as stated once NU is substituted.
  HoloMap h = build_holomap(cfg);
  CHECK(h.target_dim() == 3);
  SystemFamily sys = build_system(cfg);
  CHECK(sys.s() == 2);
}

TEST_CASE("config validation errors carry field paths") {
  json doc = json::parse(R"({
    "name": "x", "mode": "converge",
    "dims": {"n": 1, "m": 1, "p": 1, "s": 1},
    "H": ["x1"],
    "domain": {"center": [[0, 0]], "radii": [1.0]}
  })");
  try {
    load_config(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("missing field q") != std::string::npos);
  }

  json bad_expr = doc;
  bad_expr["q"] = json::array({"z1**"});
  bad_expr["scheme"] = {{"kind", "parametric"}, {"components", {"x1"}}};
  try {
    load_config(bad_expr);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("q[0]") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }

  json bad_dims = bad_expr;
  bad_dims["q"] = json::array({"z1 - v1"});
  bad_dims["dims"]["p"] = 2;  // H has one component
  CHECK_THROWS_AS(load_config(bad_dims), ConfigError);

  json bad_nu = doc;
  bad_nu["q"] = json::array({"z1 - v1"});
  bad_nu["scheme"] = {{"kind", "parametric"}, {"components", {"x1"}}};
  bad_nu["nu_list"] = {4, 2};
  CHECK_THROWS_AS(load_config(bad_nu), ConfigError);

  CHECK_THROWS_AS(load_config_text("{ not json"), ConfigError);
  CHECK_THROWS_AS(builtin_demo("nope"), ConfigError);
}

TEST_CASE("config echo round-trips") {
  for (const std::string& name : builtin_demo_names()) {
    ExperimentConfig cfg = builtin_demo(name);
    auto echo = config_to_json(cfg);
    ExperimentConfig back = load_config(echo);
    CHECK(config_to_json(back).dump() == echo.dump());
  }
}

TEST_CASE("implicitize-only run reports the twisted cubic relations") {
  ExperimentConfig cfg = builtin_demo("twisted-cubic-implicitize");
  RunResult result = run_experiment(cfg);
  CHECK(result.exit_code == kExitPass);
  REQUIRE(result.basis.has_value());
  CHECK(result.basis->relations.size() == 3);
  CHECK(result.report["stages"]["implicitization"]["nullity"] == 3);
}

TEST_CASE("full pipeline on the small example passes with exit code 0") {
  ExperimentConfig cfg = small_example12();
  RunResult result = run_experiment(cfg);
  REQUIRE(!result.error.has_value());
  CHECK(result.exit_code == kExitPass);
  CHECK(result.verdict == "pass");
  REQUIRE(result.convergence.has_value());
  CHECK(result.convergence->nu_star_chain >= 1);
  CHECK(result.report["stages"]["convergence"]["thresholds"]["nu_star_chain"].get<int>() >= 1);

  auto dir = std::filesystem::temp_directory_path() / "nashlab_test_reports";
  std::filesystem::remove_all(dir);
  auto written = emit_report(result, dir.string(), {"json", "csv", "text"});
  REQUIRE(written.size() == 3);

  std::string jtext = slurp(written[0]);
  CHECK(jtext.find("nu_star_chain") != std::string::npos);

  std::string csv = slurp(written[1]);
  CHECK(csv.rfind("nu,test,value,pass\n", 0) == 0);
  CHECK(csv.find("sup_1l_full") != std::string::npos);

  std::string summary = slurp(written[2]);
  CHECK(summary.find("== configuration ==") != std::string::npos);
  CHECK(summary.find("\"name\": \"example12\"") != std::string::npos);
  CHECK(summary.find("verdict: pass") != std::string::npos);
}

TEST_CASE("negative control exits with code 2 at stage check_1l") {
  ExperimentConfig cfg = builtin_demo("linear-sections-negative");
  cfg.grid.interior_per_axis = 7;
  cfg.grid.boundary_samples = 16;
  cfg.grid.implicitization_samples = 60;
  cfg.nu_list = {1, 2, 4};
  cfg.sample_points = 5;
  RunResult result = run_experiment(cfg);
  CHECK(result.exit_code == kExitFail);
  CHECK(result.verdict == "fail");
  REQUIRE(result.convergence.has_value());
  for (const NuRecord& rec : result.convergence->records) {
    CHECK(!rec.pass_1l);
    CHECK(std::isinf(rec.sup_1l_full));
  }
}

TEST_CASE("numerical stage failures exit with code 4 and a stage name") {
  // z v1 - 1 with 0 in the base region: properness fails, find_r0 cannot
  // stabilize.
  json doc = json::parse(R"({
    "name": "nonproper", "mode": "converge",
    "dims": {"n": 1, "m": 1, "p": 1, "s": 1},
    "H": ["x1"],
    "q": ["z1*v1 - 1"],
    "domain": {"center": [[0, 0]], "radii": [1.2]},
    "base_region": {"center": [[0, 0]], "radii": [1.0]},
    "scheme": {"kind": "parametric", "components": ["x1"]},
    "grid": {"interior_per_axis": 7, "boundary_samples": 8, "implicitization_samples": 30},
    "nu_list": [1, 2],
    "degree_bound": 1
  })");
  RunResult result = run_experiment(load_config(doc));
  CHECK(result.exit_code == kExitNumeric);
  REQUIRE(result.error.has_value());
  CHECK(result.error->stage == "find_r0");
  CHECK(result.report.contains("error"));
  // The partial report still carries the finished stages.
  CHECK(result.report["stages"].contains("implicitization"));
}

TEST_CASE("reports are byte-deterministic across runs") {
  ExperimentConfig cfg = small_example12();
  auto dir1 = std::filesystem::temp_directory_path() / "nashlab_det_a";
  auto dir2 = std::filesystem::temp_directory_path() / "nashlab_det_b";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  auto w1 = emit_report(run_experiment(cfg), dir1.string(), {"json", "csv"});
  auto w2 = emit_report(run_experiment(cfg), dir2.string(), {"json", "csv"});
  REQUIRE(w1.size() == w2.size());
  for (size_t i = 0; i < w1.size(); ++i) CHECK(slurp(w1[i]) == slurp(w2[i]));
}
