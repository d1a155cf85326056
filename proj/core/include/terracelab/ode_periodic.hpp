#pragma once

#include <optional>
#include <vector>

#include "terracelab/nonlinearity.hpp"
#include "terracelab/ode_solve.hpp"

namespace terracelab {

enum class SolutionKind { point, interval_of_equilibria };

// A T-periodic solution of dq/dt = f(t,q), sampled on a uniform t-grid over
// one period (n_t+1 samples, endpoints included).
struct PeriodicSolution {
  double period_T = 1.0;
  std::vector<double> t;  // size n_t+1, t.front()=0, t.back()=T
  std::vector<double> q;  // same size
  SolutionKind kind = SolutionKind::point;
  double band_lo = 0.0;  // for interval_of_equilibria: [band_lo, band_hi]
  double band_hi = 0.0;

  double value_at0() const { return q.front(); }
  /// Linear interpolation of q at time tau (wrapped into [0,T]).
  double value(double tau) const;
  /// dq/dt at tau from the ODE itself.
  bool contains(double v, double tol) const {
    if (kind == SolutionKind::interval_of_equilibria)
      return v >= band_lo - tol && v <= band_hi + tol;
    return std::abs(v - q.front()) <= tol;
  }

  std::string to_json() const;
  std::string to_csv() const;
};

struct StabilityRecord {
  double mu = 0.0;       // -(1/T) int_0^T df/du(t,q(t)) dt
  double floquet = 1.0;  // exp(-mu*T)
  Tristate stable_above = Tristate::undetermined;
  Tristate stable_below = Tristate::undetermined;
  Tristate isolated_above = Tristate::undetermined;
  Tristate isolated_below = Tristate::undetermined;

  bool linearly_stable(double degenerate_tol = 1e-4) const {
    return mu > degenerate_tol;
  }
};

struct OdePeriodicParams {
  double ode_tol = 1e-10;
  double fp_tol = 1e-9;
  double merge_tol = 1e-6;
  double delta_probe = 1e-3;
  int n_probe = 50;       // periods for stability probes
  int n_basin = 50;       // periods for basin probes
  double basin_tol = 1e-4;
  double degenerate_tol = 1e-4;
  int n_t = 256;          // samples per period (n_t+1 points stored)
};

/// h(T) for dh/dt = f(t,h), h(0)=h0.  Throws OdeDivergence on blow-up.
double poincare_map(const NonlinearitySpec& spec, double h0,
                    const OdePeriodicParams& params = {});

/// Central-difference derivative of the Poincare map at h0.
double poincare_map_derivative(const NonlinearitySpec& spec, double h0,
                               double delta = 1e-4,
                               const OdePeriodicParams& params = {});

/// All fixed points of the Poincare map in [lo,hi], sorted increasing at t=0.
/// Plateaus of equilibria (|Phi - id| < fp_tol on a whole subinterval) come
/// back as a single interval_of_equilibria entry.
std::vector<PeriodicSolution> find_periodic_solutions(
    const NonlinearitySpec& spec, double lo, double hi, int n_seed = 64,
    const OdePeriodicParams& params = {});

/// mu / Floquet multiplier plus empirical one-sided stability probes.
/// `neighbors`, when given, is the full sorted output of
/// find_periodic_solutions; it feeds the isolated_* flags.
StabilityRecord classify_stability(
    const NonlinearitySpec& spec, const PeriodicSolution& q,
    const std::vector<PeriodicSolution>* neighbors = nullptr,
    const OdePeriodicParams& params = {});

/// Basin of attraction of a linearly stable q: the largest open interval of
/// initial values around q(0) whose probes converge to q.  Endpoints are
/// bisected against the search window [window_lo, window_hi].
/// `side` tags the role of the interval (I_plus for the top platform,
/// I_minus for 0); the computation is symmetric.
enum class BasinSide { plus, minus };

struct AttractionInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_is_window_edge = false;  // true: extends to the window boundary
  bool hi_is_window_edge = false;
  bool contains(double v) const { return v > lo && v < hi; }
};

AttractionInterval attraction_interval(const NonlinearitySpec& spec,
                                       const PeriodicSolution& q,
                                       BasinSide side,
                                       double window_lo, double window_hi,
                                       const OdePeriodicParams& params = {});

/// Integrates one period from q(0) and samples the trajectory; used both by
/// the solution finder and for re-verification in tests.
PeriodicSolution sample_periodic_solution(const NonlinearitySpec& spec,
                                          double q0,
                                          const OdePeriodicParams& params = {});

}  // namespace terracelab
