#pragma once

#include <functional>
#include <memory>

#include "terracelab/ode_periodic.hpp"
#include "terracelab/terrace.hpp"

namespace terracelab {

/// Exponentially decaying corrector amplitude attached to a linearly stable
/// platform: b(t) = exp(mu*t/2 + int_0^t df/du(s, q(s)) ds), so that
/// 0 <= b(t) <= M*exp(-mu*t/2).
class PlatformDecay {
 public:
  PlatformDecay(const NonlinearitySpec& spec, const PeriodicSolution& platform,
                double ode_tol = 1e-10);

  double mu() const { return mu_; }
  double b(double t) const;
  /// M = sup_{[0,T]} exp(mu*t + int_0^t df/du), the prefactor of the decay
  /// bound.
  double bound_M() const { return big_m_; }
  double platform_value(double t) const { return q_(wrap(t)); }

 private:
  double wrap(double t) const;
  double period_;
  double mu_ = 0.0;
  double g_period_ = 0.0;  // int_0^T df/du
  double big_m_ = 1.0;
  UniformSpline g_;  // cumulative int_0^t df/du over one period
  UniformSpline q_;  // the platform trajectory over one period
};

/// C2 bridge: 1 on (-inf,0], 0 on [3,inf), quintic smoothstep in between,
/// with |zeta'| <= 1 and |zeta''| <= 1.
double zeta(double x);
double zeta_d1(double x);
double zeta_d2(double x);

/// A(t,x) = zeta(x)*b_upper(t) + (1-zeta(x))*b_lower(t).
double a_coeff(const PlatformDecay& upper, const PlatformDecay& lower, double t,
               double x);

enum class ComparisonKind {
  fife_mcleod_upper,
  fife_mcleod_lower,
  flattening_upper,
  flattening_lower,
};

const char* to_string(ComparisonKind k);

struct ComparisonFunction {
  ComparisonKind kind = ComparisonKind::fife_mcleod_upper;
  double frame_speed = 0.0;  // c
  double offset_K = 0.0;     // wave translate (fife-mcleod kinds)
  double eps = 0.0;          // corrector amplitude
  double c1 = 0.0, c2 = 0.0; // flattening cutoff position / speed
  double value_hi = 1.0;     // scale used for certification tolerances
  std::function<double(double, double)> eval;  // (t, x)

  bool upper() const {
    return kind == ComparisonKind::fife_mcleod_upper ||
           kind == ComparisonKind::flattening_upper;
  }
};

struct SupersubParams {
  double cert_tol_rel = 1e-6;  // * max(1, sup|f|)
  int stencil_refine = 4;      // stencil steps are run dx/refine, dt/refine
  double stencil_dt = 5e-3;    // run dt the stencil refines against
  int eps_iters = 20;          // bisection steps for the eps search
  double ode_tol = 1e-10;
  double lipschitz_safety = 1.5;
  int lipschitz_n = 200;
};

/// Translated wave plus corrector: U(t, x + (c_i - c) t + K) +/- eps*A(t, x-ct).
/// Upper kind requires c > wave speed, lower kind c < wave speed.
ComparisonFunction fife_mcleod(ComparisonKind kind, const WaveProfile& wave,
                               const NonlinearitySpec& spec, double c, double K,
                               double eps, const SupersubParams& params = {});

struct CertificationReport {
  ComparisonKind kind;
  double worst_residual = 0.0;  // min of L[cf] for upper kinds, max for lower
  double worst_t = 0.0, worst_x = 0.0;
  double cert_tol = 0.0;
  bool certified = false;
  double params_c = 0.0, params_K = 0.0, params_eps = 0.0;
  double params_c1 = 0.0, params_c2 = 0.0;
  std::string to_json() const;
};

/// Discrete operator residual L[cf] = cf_t - cf_xx - f(t, cf) on the scan
/// region, with 4th-order x and 2nd-order t differences on a refined stencil.
CertificationReport check_comparison(const ComparisonFunction& cf,
                                     const NonlinearitySpec& spec,
                                     const Grid& grid,
                                     const std::vector<double>& times,
                                     const SupersubParams& params = {});

struct EpsSearch {
  double eps_hat = 0.0;
  bool any_certified = false;
  CertificationReport report{};  // at eps_hat when certified
};

/// Largest certified corrector amplitude, bisected on
/// [1e-6, 0.5 * platform gap].
EpsSearch find_certified_eps(ComparisonKind kind, const WaveProfile& wave,
                             const NonlinearitySpec& spec, double c, double K,
                             const Grid& grid, const std::vector<double>& times,
                             const SupersubParams& params = {});

/// Flattening super-solution for front-like data:
/// W(t,x) = H_plus(t)(1-gamma(x-C1-C2 t)) + H_minus(t) gamma(x-C1-C2 t)
/// with gamma(x) = (1+tanh(x/2))/2 and W(0,.) >= u0 by construction.
/// The evaluator samples the H ODE trajectories on [0, horizon]; keep scan
/// times a stencil step inside that window.
ComparisonFunction flattening_super(const Field& u0,
                                    const NonlinearitySpec& spec,
                                    const AttractionInterval& basin_top,
                                    const AttractionInterval& basin_zero,
                                    double horizon,
                                    const SupersubParams& params = {});

/// Mirror construction from below: W(0,.) <= u0.
ComparisonFunction flattening_sub(const Field& u0, const NonlinearitySpec& spec,
                                  const AttractionInterval& basin_top,
                                  const AttractionInterval& basin_zero,
                                  double horizon,
                                  const SupersubParams& params = {});

struct SandwichFit {
  double K0_hat = 0.0;
  double beta0_hat = 0.0;
  double valid_from = 0.0;
  bool trapped_exactly = false;  // violations identically zero
  bool fit_failed = false;       // violations do not decay
};

/// Smallest empirical envelope K0*exp(-beta0*t) bounding the two-sided
/// ordering violations of u against the bracketing Heaviside runs.
SandwichFit sandwich_fit(const Trajectory& traj_u,
                         const Trajectory& traj_hat_plus,
                         const Trajectory& traj_hat_minus);

}  // namespace terracelab
