#pragma once

#include <filesystem>
#include <ostream>

#include "terracelab/config.hpp"
#include "terracelab/io.hpp"
#include "terracelab/manifest.hpp"
#include "terracelab/scenarios.hpp"
#include "terracelab/supersub.hpp"

namespace terracelab {

struct OdeAnalysis {
  std::vector<PeriodicSolution> ladder;   // sorted increasing at t=0
  std::vector<StabilityRecord> records;   // one per ladder entry
  int top_index() const { return static_cast<int>(ladder.size()) - 1; }
  double p0() const { return ladder.back().value_at0(); }
};

OdePeriodicParams ode_params_from(const Tolerances& t);
TerraceParams terrace_params_from(const Tolerances& t);
SupersubParams supersub_params_from(const Tolerances& t, double run_dt);

/// Periodic-solution ladder on [0, 1.2*p] plus stability records.
OdeAnalysis analyze_ode(const ScenarioConfig& cfg);

/// The scenario's main PDE run.
Trajectory run_base_simulation(const ScenarioConfig& cfg);

struct TerracePipelineResult {
  Terrace terrace;
  std::vector<ShiftTrack> shifts;
  std::vector<std::pair<double, double>> residual_series;  // (t, residual)
};

TerracePipelineResult terrace_pipeline(const ScenarioConfig& cfg,
                                       const OdeAnalysis& ode,
                                       const Trajectory& traj);

struct VerifyOutcome {
  std::vector<CheckResult> checks;
  // (relative file name, content) pairs written next to verify.json.
  std::vector<std::pair<std::string, std::string>> artifacts;
  bool any_failed() const {
    for (const auto& c : checks)
      if (c.failed()) return true;
    return false;
  }
};

/// Stability records for the terrace platforms, matched from the ladder.
std::vector<StabilityRecord> platform_records(const Terrace& terrace,
                                              const OdeAnalysis& ode);

/// Shifted and artificially flattened copies of each wave, used to exercise
/// the minimality checks.
std::vector<std::pair<int, WaveProfile>> make_minimality_candidates(
    const Terrace& terrace);

/// Runs every check requested by cfg.analysis; one CheckResult per invariant.
VerifyOutcome run_verify_checks(const ScenarioConfig& cfg, std::ostream& log);

// CLI subcommand entry points.  Each writes outputs plus manifest.json under
// out_dir and returns a process exit code.
int cmd_ode(const ScenarioConfig& cfg, const std::string& cfg_text,
            const std::filesystem::path& out_dir, std::ostream& log);
int cmd_simulate(const ScenarioConfig& cfg, const std::string& cfg_text,
                 const std::filesystem::path& out_dir, std::ostream& log,
                 bool columnar = false);
int cmd_terrace(const ScenarioConfig& cfg, const std::string& cfg_text,
                const std::filesystem::path& out_dir, std::ostream& log);
int cmd_verify(const ScenarioConfig& cfg, const std::string& cfg_text,
               const std::filesystem::path& out_dir, std::ostream& log);
int cmd_report(const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace terracelab
