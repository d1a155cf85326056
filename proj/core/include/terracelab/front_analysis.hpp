#pragma once

#include <optional>
#include <vector>

#include "terracelab/pde.hpp"

namespace terracelab {

enum class Crossing { rightmost, leftmost, unique };

struct FrontAnalysisParams {
  double level_tol = 1e-8;
  double eps_z_rel = 1e-9;      // zero-number deadband, relative to ||u||_inf
  double profile_tol = 1e-4;    // Cauchy defect threshold for a wave verdict
  double flat_tol_rel = 1e-3;   // platform flatness, relative to p(0)
  double window = 40.0;         // half-width for limit profiles
  double burn_in_frac = 0.3;    // speed fits use k >= ceil(frac * k_max)
};

/// Abscissa where the field attains `alpha`, by linear interpolation between
/// the bracketing grid points.  Throws std::range_error when the level is not
/// attained and std::runtime_error for `unique` with several crossings.
double level_crossing(const Field& field, double alpha, Crossing which);

/// Rightmost crossing refined with a local cubic spline; sub-cell accurate
/// and consistent with spline-based profile evaluation.
double refined_crossing(const Field& field, double alpha);

struct LevelTrack {
  double alpha = 0.0;
  std::vector<int> k;          // period indices
  std::vector<double> a_k;     // positions, same length
  bool truncated = false;      // level left the attained range mid-run
};

/// Per-alpha tracks over all period snapshots (rightmost crossing).
std::vector<LevelTrack> track_levels(const Trajectory& traj,
                                     const std::vector<double>& alphas,
                                     const FrontAnalysisParams& params = {});

struct SpeedEstimate {
  double c = 0.0;
  double stderr_c = 0.0;
  double increment_c = 0.0;    // mean(a_k - a_{k-1}) / T over the same window
  bool increment_disagrees = false;  // |increment_c - c| > 3*stderr
  int points_used = 0;
};

/// Least-squares slope of a_k against kT for k >= burn_in.
SpeedEstimate estimate_speed(const LevelTrack& track, double T, int burn_in);

/// Sign changes after deadband thresholding; -1 when the whole sample is
/// within eps of zero.
int sign_changes(const std::vector<double>& samples, double eps);

struct ZeroNumberSeries {
  std::vector<double> t;
  std::vector<int> z;
};

/// Z(u1(t,.) - u2(t + lag*T, . + shift)) over the common snapshots, counted
/// on the overlapping grid window with deadband eps_z.
ZeroNumberSeries zero_number_series(const Trajectory& traj1,
                                    const Trajectory& traj2, double shift,
                                    int lag_periods,
                                    const FrontAnalysisParams& params = {});

enum class Steepness { steeper, less_steep, mutually, incomparable };

const char* to_string(Steepness s);

/// Translation-invariant single-crossing order on monotone non-increasing
/// profiles: v1 is steeper than v2 when, matching any shared level, v1 lies
/// above v2 to the left of the matched crossing and below it to the right.
/// Equivalently the level-to-level widths of v1 never exceed those of v2.
Steepness is_steeper(const Field& v1, const Field& v2, double tol);

enum class ProfileVerdict { wave, platform, undecided };

struct LimitProfile {
  Field profile;                // last shifted snapshot on [-window, window]
  double anchor_alpha = 0.0;
  double convergence_defect = 0.0;  // sup distance of last two shifted rows
  double variation = 0.0;           // max - min over the window
  ProfileVerdict verdict = ProfileVerdict::undecided;
};

/// Shifts each period snapshot so its alpha-crossing sits at x = 0 and
/// classifies the limit: a traveling profile, a flat platform, or undecided.
LimitProfile limit_profile(const Trajectory& traj, double alpha, double window,
                           const FrontAnalysisParams& params = {});

struct SpreadingBracket {
  double c_lower = 0.0;
  double c_upper = 0.0;
  double stderr_lower = 0.0;
  double stderr_upper = 0.0;
};

/// Slope fits of the rightmost eps-level and the leftmost (p-eps)-level.
SpreadingBracket spreading_bracket(const Trajectory& traj, double eps,
                                   const FrontAnalysisParams& params = {});

}  // namespace terracelab
