#include "nashlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace nashlab {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path.empty() ? what : path + ": " + what);
}

const json& need(const json& doc, const char* key) {
  if (!doc.contains(key)) fail("", std::string("missing field ") + key);
  return doc.at(key);
}

int get_int(const json& j, const std::string& path, int min_value) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  int v = j.get<int>();
  if (v < min_value) fail(path, "must be >= " + std::to_string(min_value));
  return v;
}

double get_num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::string get_str(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> get_str_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(get_str(e, path));
  return out;
}

Polydisc get_polydisc(const json& j, const std::string& path, int dim) {
  if (!j.is_object()) fail(path, "expected an object with center and radii");
  const json& c = j.contains("center") ? j.at("center") : json{};
  const json& r = j.contains("radii") ? j.at("radii") : json{};
  if (!c.is_array() || static_cast<int>(c.size()) != dim) {
    fail(path + ".center", "expected " + std::to_string(dim) + " [re, im] pairs");
  }
  if (!r.is_array() || static_cast<int>(r.size()) != dim) {
    fail(path + ".radii", "expected " + std::to_string(dim) + " radii");
  }
  Polydisc d;
  d.center = CVec(dim);
  for (int a = 0; a < dim; ++a) {
    const json& pair = c.at(static_cast<size_t>(a));
    if (!pair.is_array() || pair.size() != 2) fail(path + ".center", "entries are [re, im] pairs");
    d.center[a] = Cx(get_num(pair.at(0), path), get_num(pair.at(1), path));
    double ra = get_num(r.at(static_cast<size_t>(a)), path + ".radii");
    if (!(ra > 0.0)) fail(path + ".radii", "radii must be positive");
    d.radii.push_back(ra);
  }
  return d;
}

void check_expr(const std::string& text, const std::set<std::string>& allowed,
                const std::string& path) {
  try {
    parse_expr(text, allowed);
  } catch (const ParseError& e) {
    fail(path, std::string(e.what()) + " at column " + std::to_string(e.position));
  }
}

std::vector<std::string> default_names(const char* stem, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

}  // namespace

ExperimentConfig load_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;

  if (doc.contains("name")) cfg.name = get_str(doc.at("name"), "name");
  if (doc.contains("mode")) cfg.mode = get_str(doc.at("mode"), "mode");
  if (cfg.mode != "converge" && cfg.mode != "implicitize") {
    fail("mode", "must be \"converge\" or \"implicitize\"");
  }
  const bool full = cfg.mode == "converge";

  const json& dims = need(doc, "dims");
  cfg.n = get_int(need(dims, "n"), "dims.n", 1);
  cfg.m = get_int(need(dims, "m"), "dims.m", 0);
  cfg.p = get_int(need(dims, "p"), "dims.p", 1);
  cfg.s = get_int(need(dims, "s"), "dims.s", 0);
  if (full && (cfg.m < 1 || cfg.m > 2)) fail("dims.m", "fiber dimension must be 1 or 2");
  if (full && cfg.s < 1) fail("dims.s", "need at least one polynomial");

  cfg.base_vars = default_names("x", cfg.n);
  cfg.coeff_vars = default_names("v", cfg.p);
  cfg.fiber_vars = default_names("z", cfg.m);
  if (doc.contains("variables")) {
    const json& v = doc.at("variables");
    if (v.contains("base")) cfg.base_vars = get_str_list(v.at("base"), "variables.base");
    if (v.contains("coeff")) cfg.coeff_vars = get_str_list(v.at("coeff"), "variables.coeff");
    if (v.contains("fiber")) cfg.fiber_vars = get_str_list(v.at("fiber"), "variables.fiber");
  }
  if (static_cast<int>(cfg.base_vars.size()) != cfg.n) fail("variables.base", "dimension mismatch with dims.n");
  if (static_cast<int>(cfg.coeff_vars.size()) != cfg.p) fail("variables.coeff", "dimension mismatch with dims.p");
  if (static_cast<int>(cfg.fiber_vars.size()) != cfg.m) fail("variables.fiber", "dimension mismatch with dims.m");

  std::set<std::string> base_set(cfg.base_vars.begin(), cfg.base_vars.end());
  cfg.h_exprs = get_str_list(need(doc, "H"), "H");
  if (static_cast<int>(cfg.h_exprs.size()) != cfg.p) fail("H", "expected p = " + std::to_string(cfg.p) + " components");
  for (size_t i = 0; i < cfg.h_exprs.size(); ++i) {
    check_expr(cfg.h_exprs[i], base_set, "H[" + std::to_string(i) + "]");
  }

  if (full) {
    cfg.q_exprs = get_str_list(need(doc, "q"), "q");
    if (static_cast<int>(cfg.q_exprs.size()) != cfg.s) fail("q", "expected s = " + std::to_string(cfg.s) + " polynomials");
    std::set<std::string> vz(cfg.coeff_vars.begin(), cfg.coeff_vars.end());
    vz.insert(cfg.fiber_vars.begin(), cfg.fiber_vars.end());
    std::vector<std::string> all_vars = cfg.coeff_vars;
    all_vars.insert(all_vars.end(), cfg.fiber_vars.begin(), cfg.fiber_vars.end());
    for (size_t i = 0; i < cfg.q_exprs.size(); ++i) {
      std::string path = "q[" + std::to_string(i) + "]";
      check_expr(cfg.q_exprs[i], vz, path);
      if (!expr_to_poly(parse_expr(cfg.q_exprs[i], vz), all_vars)) {
        fail(path, "must be polynomial in the coefficient and fiber variables");
      }
    }
  }

  cfg.domain = get_polydisc(need(doc, "domain"), "domain", cfg.n);
  if (doc.contains("base_region")) {
    cfg.base_region = get_polydisc(doc.at("base_region"), "base_region", cfg.n);
  } else {
    cfg.base_region = cfg.domain;
    for (double& r : cfg.base_region.radii) r *= 0.9;
  }
  for (int a = 0; a < cfg.n; ++a) {
    double reach = std::abs(cfg.base_region.center[a] - cfg.domain.center[a]) +
                   cfg.base_region.radii[static_cast<size_t>(a)];
    if (!(reach < cfg.domain.radii[static_cast<size_t>(a)])) {
      fail("base_region", "must be relatively compact in domain");
    }
  }

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    if (g.contains("interior_per_axis")) cfg.grid.interior_per_axis = get_int(g.at("interior_per_axis"), "grid.interior_per_axis", 2);
    if (g.contains("boundary_samples")) cfg.grid.boundary_samples = get_int(g.at("boundary_samples"), "grid.boundary_samples", 1);
    if (g.contains("implicitization_samples")) cfg.grid.implicitization_samples = get_int(g.at("implicitization_samples"), "grid.implicitization_samples", 5);
    if (g.contains("validation_per_axis")) cfg.grid.validation_per_axis = get_int(g.at("validation_per_axis"), "grid.validation_per_axis", 2);
  }

  if (full) {
    const json& sch = need(doc, "scheme");
    std::string kind = get_str(need(sch, "kind"), "scheme.kind");
    if (kind == "parametric") {
      cfg.scheme.kind = ApproxScheme::Kind::Parametric;
      cfg.scheme.components = get_str_list(need(sch, "components"), "scheme.components");
      if (static_cast<int>(cfg.scheme.components.size()) != cfg.p) {
        fail("scheme.components", "expected p = " + std::to_string(cfg.p) + " templates");
      }
      for (size_t i = 0; i < cfg.scheme.components.size(); ++i) {
        check_expr(substitute_nu(cfg.scheme.components[i], 1), base_set,
                   "scheme.components[" + std::to_string(i) + "]");
      }
    } else if (kind == "constrained_truncation" || kind == "unconstrained_truncation") {
      cfg.scheme.kind = kind == "constrained_truncation"
                            ? ApproxScheme::Kind::ConstrainedTruncation
                            : ApproxScheme::Kind::UnconstrainedTruncation;
      if (cfg.scheme.kind == ApproxScheme::Kind::ConstrainedTruncation) {
        const json& fr = need(sch, "free");
        if (!fr.is_array()) fail("scheme.free", "expected an array of component indices");
        for (const auto& e : fr) {
          int j = get_int(e, "scheme.free", 0);
          if (j >= cfg.p) fail("scheme.free", "component index out of range");
          cfg.scheme.free_components.push_back(j);
        }
        const json& solved = need(sch, "solved");
        if (!solved.is_object()) fail("scheme.solved", "expected an object index -> expression");
        std::set<std::string> free_vars;
        for (int j : cfg.scheme.free_components) free_vars.insert(cfg.coeff_vars[static_cast<size_t>(j)]);
        for (auto it = solved.begin(); it != solved.end(); ++it) {
          int j = std::atoi(it.key().c_str());
          if (j < 0 || j >= cfg.p) fail("scheme.solved", "component index out of range: " + it.key());
          std::string text = get_str(it.value(), "scheme.solved." + it.key());
          check_expr(text, free_vars, "scheme.solved." + it.key());
          cfg.scheme.solved_components[j] = text;
        }
        std::set<int> covered(cfg.scheme.free_components.begin(), cfg.scheme.free_components.end());
        for (const auto& [j, e] : cfg.scheme.solved_components) covered.insert(j);
        if (static_cast<int>(covered.size()) != cfg.p) {
          fail("scheme", "every component must be free or in solved form");
        }
      } else if (sch.contains("shifts")) {
        const json& shifts = sch.at("shifts");
        if (!shifts.is_object()) fail("scheme.shifts", "expected an object index -> expression");
        for (auto it = shifts.begin(); it != shifts.end(); ++it) {
          int j = std::atoi(it.key().c_str());
          if (j < 0 || j >= cfg.p) fail("scheme.shifts", "component index out of range: " + it.key());
          std::string text = get_str(it.value(), "scheme.shifts." + it.key());
          check_expr(substitute_nu(text, 1), base_set, "scheme.shifts." + it.key());
          cfg.scheme.shifts[j] = text;
        }
      }
    } else {
      fail("scheme.kind", "unknown kind " + kind);
    }
  }

  if (doc.contains("nu_list")) {
    cfg.nu_list.clear();
    if (!doc.at("nu_list").is_array() || doc.at("nu_list").empty()) fail("nu_list", "expected a non-empty array");
    for (const auto& e : doc.at("nu_list")) cfg.nu_list.push_back(get_int(e, "nu_list", 1));
    for (size_t i = 1; i < cfg.nu_list.size(); ++i) {
      if (cfg.nu_list[i] <= cfg.nu_list[i - 1]) fail("nu_list", "must be strictly increasing");
    }
  }

  if (doc.contains("degree_bound")) cfg.degree_bound = get_int(doc.at("degree_bound"), "degree_bound", 1);

  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    auto pos = [&](const char* key, double& slot, bool strict) {
      if (!t.contains(key)) return;
      double v = get_num(t.at(key), std::string("tolerances.") + key);
      if (strict ? !(v > 0.0) : v < 0.0) fail(std::string("tolerances.") + key, "out of range");
      slot = v;
    };
    pos("svd_tol", cfg.tol.svd_tol, true);
    pos("tol_res", cfg.tol.tol_res, true);
    pos("cluster_radius", cfg.tol.cluster_radius, false);
    pos("conv_tol", cfg.tol.conv_tol, true);
    pos("delta", cfg.tol.delta, false);
  }

  if (doc.contains("persistence")) {
    const json& pp = doc.at("persistence");
    if (pp.contains("k_probes")) cfg.persistence.k_probes = get_int(pp.at("k_probes"), "persistence.k_probes", 1);
    if (pp.contains("probe_radius_frac")) {
      cfg.persistence.probe_radius_frac = get_num(pp.at("probe_radius_frac"), "persistence.probe_radius_frac");
      if (!(cfg.persistence.probe_radius_frac > 0.0)) fail("persistence.probe_radius_frac", "must be positive");
    }
    if (pp.contains("track_bound_frac")) {
      cfg.persistence.track_bound_frac = get_num(pp.at("track_bound_frac"), "persistence.track_bound_frac");
      if (!(cfg.persistence.track_bound_frac > 0.0)) fail("persistence.track_bound_frac", "must be positive");
    }
  }

  if (doc.contains("r")) {
    cfg.r = get_num(doc.at("r"), "r");
    if (cfg.r < 0.0) fail("r", "must be >= 0 (0 = automatic)");
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer()) fail("seed", "expected an integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("sample_points")) cfg.sample_points = get_int(doc.at("sample_points"), "sample_points", 1);

  if (doc.contains("report")) {
    const json& r = doc.at("report");
    if (r.contains("dir")) cfg.report.dir = get_str(r.at("dir"), "report.dir");
    if (r.contains("formats")) {
      cfg.report.formats = get_str_list(r.at("formats"), "report.formats");
      for (const std::string& f : cfg.report.formats) {
        if (f != "json" && f != "csv" && f != "text") fail("report.formats", "unknown format " + f);
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  return load_config(doc);
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["name"] = cfg.name;
  j["mode"] = cfg.mode;
  j["dims"] = {{"n", cfg.n}, {"m", cfg.m}, {"p", cfg.p}, {"s", cfg.s}};
  j["variables"] = {{"base", cfg.base_vars}, {"coeff", cfg.coeff_vars}, {"fiber", cfg.fiber_vars}};
  j["H"] = cfg.h_exprs;
  if (cfg.mode == "converge") j["q"] = cfg.q_exprs;
  auto disc_json = [](const Polydisc& d) {
    ordered_json out;
    out["center"] = ordered_json::array();
    for (int a = 0; a < d.dim(); ++a) {
      out["center"].push_back({d.center[a].real(), d.center[a].imag()});
    }
    out["radii"] = d.radii;
    return out;
  };
  j["domain"] = disc_json(cfg.domain);
  j["base_region"] = disc_json(cfg.base_region);
  j["grid"] = {{"interior_per_axis", cfg.grid.interior_per_axis},
               {"boundary_samples", cfg.grid.boundary_samples},
               {"implicitization_samples", cfg.grid.implicitization_samples},
               {"validation_per_axis", cfg.grid.validation_per_axis}};
  if (cfg.mode == "converge") {
    ordered_json sch;
    switch (cfg.scheme.kind) {
      case ApproxScheme::Kind::Parametric:
        sch["kind"] = "parametric";
        sch["components"] = cfg.scheme.components;
        break;
      case ApproxScheme::Kind::ConstrainedTruncation: {
        sch["kind"] = "constrained_truncation";
        sch["free"] = cfg.scheme.free_components;
        ordered_json solved;
        for (const auto& [k, v] : cfg.scheme.solved_components) solved[std::to_string(k)] = v;
        sch["solved"] = solved;
        break;
      }
      case ApproxScheme::Kind::UnconstrainedTruncation: {
        sch["kind"] = "unconstrained_truncation";
        ordered_json shifts;
        for (const auto& [k, v] : cfg.scheme.shifts) shifts[std::to_string(k)] = v;
        sch["shifts"] = shifts;
        break;
      }
    }
    j["scheme"] = sch;
    j["nu_list"] = cfg.nu_list;
  }
  j["degree_bound"] = cfg.degree_bound;
  j["tolerances"] = {{"svd_tol", cfg.tol.svd_tol},
                     {"tol_res", cfg.tol.tol_res},
                     {"cluster_radius", cfg.tol.cluster_radius},
                     {"conv_tol", cfg.tol.conv_tol},
                     {"delta", cfg.tol.delta}};
  j["persistence"] = {{"k_probes", cfg.persistence.k_probes},
                      {"probe_radius_frac", cfg.persistence.probe_radius_frac},
                      {"track_bound_frac", cfg.persistence.track_bound_frac}};
  j["r"] = cfg.r;
  j["seed"] = cfg.seed;
  j["sample_points"] = cfg.sample_points;
  j["report"] = {{"dir", cfg.report.dir}, {"formats", cfg.report.formats}};
  return j;
}

namespace {

const char* kExample12 = R"json({
  "name": "example12",
  "mode": "converge",
  "dims": {"n": 1, "m": 1, "p": 3, "s": 2},
  "H": ["-x1", "x1*exp(x1)", "1"],
  "q": ["z1*v2", "z1^2 + v1*z1"],
  "domain": {"center": [[0, 0]], "radii": [1.0]},
  "base_region": {"center": [[0, 0]], "radii": [0.9]},
  "scheme": {"kind": "parametric", "components": ["-x1", "(x1 - 1/NU)*exp(x1)", "1"]},
  "degree_bound": 2
})json";

const char* kTwistedCubic = R"json({
  "name": "twisted-cubic-implicitize",
  "mode": "implicitize",
  "dims": {"n": 1, "m": 0, "p": 3, "s": 0},
  "H": ["x1", "x1^2", "x1^3"],
  "domain": {"center": [[0, 0]], "radii": [1.0]},
  "degree_bound": 2
})json";

const char* kLinearNegative = R"json({
  "name": "linear-sections-negative",
  "mode": "converge",
  "dims": {"n": 1, "m": 2, "p": 3, "s": 3},
  "H": ["x1", "exp(x1) - 1", "x1 + exp(x1) - 1"],
  "q": ["z1 - v1", "z2 - v2", "z1 + z2 - v3"],
  "domain": {"center": [[0, 0]], "radii": [1.0]},
  "base_region": {"center": [[0, 0]], "radii": [0.9]},
  "scheme": {"kind": "unconstrained_truncation", "shifts": {"2": "1/NU"}},
  "degree_bound": 1
})json";

const char* kLinearConstrained = R"json({
  "name": "linear-sections-constrained",
  "mode": "converge",
  "dims": {"n": 1, "m": 2, "p": 3, "s": 3},
  "H": ["x1", "exp(x1) - 1", "x1 + exp(x1) - 1"],
  "q": ["z1 - v1", "z2 - v2", "z1 + z2 - v3"],
  "domain": {"center": [[0, 0]], "radii": [1.0]},
  "base_region": {"center": [[0, 0]], "radii": [0.9]},
  "scheme": {"kind": "constrained_truncation", "free": [0, 1], "solved": {"2": "v1 + v2"}},
  "degree_bound": 1
})json";

}  // namespace

std::vector<std::string> builtin_demo_names() {
  return {"example12", "twisted-cubic-implicitize", "linear-sections-negative",
          "linear-sections-constrained"};
}

ExperimentConfig builtin_demo(const std::string& name) {
  if (name == "example12") return load_config_text(kExample12);
  if (name == "twisted-cubic-implicitize") return load_config_text(kTwistedCubic);
  if (name == "linear-sections-negative") return load_config_text(kLinearNegative);
  if (name == "linear-sections-constrained") return load_config_text(kLinearConstrained);
  throw ConfigError("unknown demo " + name);
}

HoloMap build_holomap(const ExperimentConfig& cfg) {
  std::set<std::string> base_set(cfg.base_vars.begin(), cfg.base_vars.end());
  std::vector<Expr> comps;
  for (const std::string& text : cfg.h_exprs) comps.push_back(parse_expr(text, base_set));
  return make_holomap(cfg.base_vars, std::move(comps), cfg.domain);
}

SystemFamily build_system(const ExperimentConfig& cfg) {
  if (cfg.mode != "converge") throw ConfigError("build_system: config has no polynomial system");
  std::set<std::string> vz(cfg.coeff_vars.begin(), cfg.coeff_vars.end());
  vz.insert(cfg.fiber_vars.begin(), cfg.fiber_vars.end());
  std::vector<std::string> all_vars = cfg.coeff_vars;
  all_vars.insert(all_vars.end(), cfg.fiber_vars.begin(), cfg.fiber_vars.end());
  std::vector<MultiPoly> q;
  for (const std::string& text : cfg.q_exprs) {
    auto poly = expr_to_poly(parse_expr(text, vz), all_vars);
    if (!poly) throw ConfigError("build_system: q expression is not polynomial: " + text);
    q.push_back(std::move(*poly));
  }
  return make_system(std::move(q), cfg.coeff_vars, cfg.fiber_vars, build_holomap(cfg),
                     cfg.base_region);
}

}  // namespace nashlab
