#pragma once

#include <string>
#include <vector>

#include "cylflow/io.hpp"
#include "cylflow/translator.hpp"

namespace cylflow {

// Options shared by the CLI subcommands.
struct HarnessOptions {
  std::string output_dir;  // overrides config output.directory when nonempty
  int workers = 0;         // 0: CYLFLOW_WORKERS, else 1
  bool timings = false;    // OR'd with CYLFLOW_TIMINGS=1; timings are opt-in
                           // because they break byte-for-byte reproducibility
  bool quiet = false;      // suppress the stdout report
};

int resolve_workers(const HarnessOptions& opts);
bool timings_enabled(const HarnessOptions& opts);

struct FlowOutcome {
  Json summary;
  Classification cls;
  SpeedEstimate speed;
  StopReason stop = StopReason::Horizon;
  Trajectory traj;
  int exit_code = 0;
};
FlowOutcome run_flow_scenario(const ScenarioConfig& cfg, const HarnessOptions& opts,
                              bool write_files = true);

struct ComparisonOutcome {
  Json summary;
  Real worst_violation = 0.0;
  int exit_code = 0;
};
ComparisonOutcome run_comparison_scenario(const ScenarioConfig& cfg,
                                          const HarnessOptions& opts,
                                          bool write_files = true);

struct TranslatorOutcome {
  Json summary;
  TranslatorSolution sol;
  FluxIdentityReport flux;
  int exit_code = 0;
};
TranslatorOutcome run_translator_scenario(const ScenarioConfig& cfg,
                                          const HarnessOptions& opts,
                                          bool write_files = true);

struct SweepOutcome {
  Json summary;
  int exit_code = 0;
};
/// parameter: "A" or "theta_offset"; one flow run per value, merged verdict table.
SweepOutcome run_sweep(const ScenarioConfig& cfg, const std::string& parameter,
                       const std::vector<Real>& values, const HarnessOptions& opts);

struct RefineOutcome {
  Json summary;
  int exit_code = 0;
};
// Translator solves on `levels` meshes (each halving the mesh width), with
// observed convergence orders for the speed, flux mismatch and profile error.
RefineOutcome run_refinement_study(const ScenarioConfig& cfg, int levels,
                                   const HarnessOptions& opts);

struct ConditionsOutcome {
  Json summary;
  std::vector<ConditionReport> reports;
  int exit_code = 0;
};
ConditionsOutcome run_check_conditions(const ScenarioConfig& cfg,
                                       const HarnessOptions& opts,
                                       bool write_files = true);

// Full command-line entry point (the `cylflow` binary is a thin wrapper).
// Exit codes: 0 ok, 1 solver failure, 2 falsified invariant or failed accuracy
// gate, 64 configuration/usage error.
int cli_main(int argc, const char* const* argv);

}  // namespace cylflow
