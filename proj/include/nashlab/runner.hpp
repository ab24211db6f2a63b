#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nashlab/config.hpp"
#include "nashlab/convergence.hpp"

namespace nashlab {

// Exit code contract: 0 all verdicts pass, 2 convergence verdict fail,
// 3 config error, 4 numerical-stage error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitNumeric = 4;

struct StageError {
  std::string stage;
  std::string message;
};

struct RunResult {
  ExperimentConfig cfg;
  nlohmann::ordered_json report;  // complete on success, partial after a stage error
  std::string verdict = "pass";   // pass | fail | error
  int exit_code = kExitPass;
  std::optional<StageError> error;
  std::optional<VarietyBasis> basis;
  std::optional<ConvergenceReport> convergence;
  double r = 0.0;
};

/// Runs the pipeline sample -> implicitize -> scheme -> r0/properness ->
/// per-nu fibers + persistence -> convergence checks. Stage failures are
/// captured in the result (with the stage name); the report written so far
/// is kept.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Writes <name>.report.json / <name>.report.csv / <name>.summary.txt into
/// out_dir for the requested formats; byte-deterministic for a fixed config.
std::vector<std::string> emit_report(const RunResult& result, const std::string& out_dir,
                                     const std::vector<std::string>& formats);

nlohmann::ordered_json basis_to_json(const VarietyBasis& basis);
nlohmann::ordered_json slice_to_json(const FiberSlice& slice,
                                     const std::vector<bool>* persistent = nullptr);

/// Deterministic draw of regular sample points: grid points whose reference
/// fiber is clean (nonempty, all roots simple, no degenerate equation),
/// shuffled by the seed, first `count` in grid order.
std::vector<CVec> draw_sample_points(const SystemFamily& sys, const HoloMap& h,
                                     const std::vector<CVec>& grid, int count,
                                     std::uint64_t seed, const FiberOpts& opts);

}  // namespace nashlab
