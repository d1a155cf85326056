#pragma once

#include <optional>
#include <string>
#include <vector>

#include "terracelab/front_analysis.hpp"
#include "terracelab/ode_periodic.hpp"
#include "terracelab/spline.hpp"

namespace terracelab {

// A periodic traveling wave U(t,x) = Utilde(t mod T, x - c t) connecting two
// periodic ODE solutions, stored as profile rows on a uniform xi-grid over
// one period and extended by the platform tails beyond the window.
struct WaveProfile {
  double c = 0.0;
  double stderr_c = 0.0;
  double period_T = 1.0;
  double anchor_level = 0.0;  // Utilde(0,0)
  bool autonomous = true;
  double xi0 = 0.0;
  double dxi = 1.0;
  int n_xi = 0;
  std::vector<double> taus;               // row times in [0,T), uniform
  std::vector<std::vector<double>> rows;  // rows[r][j] = Utilde(taus[r], xi_j)
  PeriodicSolution upper;  // platform approached as xi -> -inf
  PeriodicSolution lower;  // platform approached as xi -> +inf

  /// Utilde(tau, xi); cubic in xi, Catmull-Rom in tau, platform tails.
  double eval_profile(double tau, double xi) const;
  /// U(t, x) = Utilde(t mod T, x - c t).
  double eval(double t, double x) const { return eval_profile(t, x - c * t); }
  Field row_as_field(int r) const;
  void build_splines() const;

 private:
  mutable std::vector<UniformSpline> splines_;
  mutable double built_xi0_ = std::numeric_limits<double>::quiet_NaN();
};

struct Terrace {
  // platforms[0] = p (top) > platforms[1] > ... > platforms[N] = 0.
  std::vector<PeriodicSolution> platforms;
  std::vector<WaveProfile> waves;  // waves[i-1] connects platforms[i] to [i-1]
  std::vector<std::string> log;

  int n_waves() const { return static_cast<int>(waves.size()); }
};

struct ShiftTrack {
  int wave_index = 0;
  std::vector<double> t;
  std::vector<double> eta;
  std::optional<double> eta_bar;  // set when the tail settles
  bool truncated = false;
};

// Frame speeds separating the per-wave regions when the wave speeds are
// mutually distinct: cbar[0] = c_1 - 1, cbar[i] = (c_i + c_{i+1})/2,
// cbar[N] = c_N + 1, together with a margin 0 < varrho <=
// (1/4) min{c_i - cbar[i-1], cbar[i] - c_i}.
struct RegionPartition {
  std::vector<double> cbar;  // size N+1
  double varrho = 0.0;

  RegionPartition(const std::vector<double>& speeds, double varrho_);
};

struct TerraceParams {
  double speed_zero_tol = 5e-3;
  double residual_pass_rel = 5e-3;     // * p(0)
  double shift_conv_tol_rel = 1e-3;    // * T, total variation of the tail
  double tail_tol_rel = 1e-3;          // platform snap tolerance, * p(0)
  double anchor_tol = 1e-8;
  double window = 40.0;
  double boundary_margin = 10.0;       // excluded in residual sup-norms
  int run_budget = 16;                 // alpha attempts in the construction
  double merge_tol = 1e-6;
  FrontAnalysisParams fa{};
};

struct PartialTerraceError : std::runtime_error {
  PartialTerraceError(std::string msg, Terrace progress_)
      : std::runtime_error(std::move(msg)), progress(std::move(progress_)) {}
  Terrace progress;
};

struct SpeedOrderingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iterative construction from a single Heaviside run: pick the level halfway
/// between the current top platform and the next ladder entry, classify the
/// limit profile around it, accept waves, descend until the bottom platform
/// is 0.  `ladder` is the sorted output of find_periodic_solutions on [0, p].
Terrace extract_terrace(const Trajectory& traj,
                        const std::vector<PeriodicSolution>& ladder,
                        const TerraceParams& params = {});

/// Per-wave drift eta_i(kT) = a_{i,k} - c_i kT, anchored at the wave's
/// normalization level.
std::vector<ShiftTrack> fit_shift_functions(const Trajectory& traj,
                                            const Terrace& terrace,
                                            const TerraceParams& params = {});

/// sup_x |u - (sum_i U_i(t, x - shift_i) - sum_i p_i(t))| over the grid
/// interior.
double terrace_residual(const Field& field, const Terrace& terrace,
                        const std::vector<double>& shifts,
                        const TerraceParams& params = {});

struct RateFit {
  double nu = 0.0;
  double r2 = 0.0;
  bool floored = false;          // window was truncated at the noise floor
  bool non_exponential = false;  // poor fit quality (r2 < 0.9) or nu <= 0
  double window_t0 = 0.0, window_t1 = 0.0;
  int points_used = 0;
};

/// Least-squares slope of log(residual) against t over the tail window.
RateFit exponential_rate(const std::vector<std::pair<double, double>>& series,
                         double burn_in_frac = 0.3);

struct StructureClause {
  int wave_index = 0;
  std::string clause;  // "c>0", "c<0", "c=0"
  bool pass = false;
  std::string detail;
};

struct StructureReport {
  std::vector<StructureClause> clauses;
  bool multistable_checked = false;
  bool multistable_pass = false;
  bool all_pass() const {
    for (const auto& c : clauses)
      if (!c.pass) return false;
    return !multistable_checked || multistable_pass;
  }
};

/// Speed-sign vs platform-stability consistency: c_i > 0 needs the upper
/// platform stable and isolated from below, c_i < 0 the lower platform stable
/// and isolated from above, c_i = 0 both stability clauses.
StructureReport check_terrace_structure(
    const Terrace& terrace, const std::vector<StabilityRecord>& platform_records,
    bool check_multistable = false, const TerraceParams& params = {});

struct MinimalityEntry {
  int wave_index = 0;
  int candidate_index = 0;
  int row = 0;
  Steepness verdict = Steepness::incomparable;
  bool pass = false;
};

struct MinimalityReport {
  std::vector<MinimalityEntry> entries;
  bool all_pass = true;
};

/// Checks that each terrace wave is steeper-or-mutually against candidate
/// profiles connecting the same platform pair.
MinimalityReport check_minimality(
    const Terrace& terrace,
    const std::vector<std::pair<int, WaveProfile>>& candidates, double tol);

/// Builds a WaveProfile from the last stored period of a trajectory around a
/// level track; used by extract_terrace and by candidate generation.
WaveProfile build_wave_profile(const Trajectory& traj, double alpha, double c,
                               double stderr_c, double window);

}  // namespace terracelab
