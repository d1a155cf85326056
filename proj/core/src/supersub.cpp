#include "terracelab/supersub.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace terracelab {

PlatformDecay::PlatformDecay(const NonlinearitySpec& spec,
                             const PeriodicSolution& platform, double ode_tol)
    : period_(platform.period_T) {
  // Integrate (q, G) with G(t) = int_0^t df/du(s, q(s)) ds and sample both on
  // a uniform grid over one period.
  const int n = 256;
  OdeOptions opts;
  opts.abs_tol = opts.rel_tol = ode_tol;
  DormandPrince<2> solver(
      [&](double t, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        dy[0] = spec.eval(t, y[0]);
        dy[1] = spec.eval_du(t, y[0]);
      },
      opts);
  std::vector<double> qs(n + 1), gs(n + 1);
  std::array<double, 2> y = {platform.value_at0(), 0.0};
  qs[0] = y[0];
  gs[0] = 0.0;
  for (int i = 1; i <= n; ++i) {
    y = solver.solve(period_ * (i - 1) / n, period_ * i / n, y);
    qs[i] = y[0];
    gs[i] = y[1];
  }
  g_period_ = gs[n];
  mu_ = -g_period_ / period_;
  if (!(mu_ > 0))
    throw std::invalid_argument(
        "PlatformDecay requires a linearly stable platform (mu > 0), got mu=" +
        std::to_string(mu_));
  const double h = period_ / n;
  q_ = UniformSpline(0.0, h, qs);
  g_ = UniformSpline(0.0, h, gs);
  big_m_ = 1.0;
  for (int i = 0; i <= n; ++i)
    big_m_ = std::max(big_m_, std::exp(mu_ * (h * i) + gs[i]));
}

double PlatformDecay::wrap(double t) const {
  double tau = std::fmod(t, period_);
  if (tau < 0) tau += period_;
  return tau;
}

double PlatformDecay::b(double t) const {
  const double k = std::floor(t / period_);
  const double tau = t - k * period_;
  const double g = g_(tau) + k * g_period_;
  return std::exp(mu_ * t / 2.0 + g);
}

double zeta(double x) {
  if (x <= 0.0) return 1.0;
  if (x >= 3.0) return 0.0;
  const double y = x / 3.0;
  return 1.0 - y * y * y * (10.0 + y * (-15.0 + 6.0 * y));
}

double zeta_d1(double x) {
  if (x <= 0.0 || x >= 3.0) return 0.0;
  const double y = x / 3.0;
  return -(30.0 * y * y * (y - 1.0) * (y - 1.0)) / 3.0;
}

double zeta_d2(double x) {
  if (x <= 0.0 || x >= 3.0) return 0.0;
  const double y = x / 3.0;
  return -(60.0 * y * (2.0 * y - 1.0) * (y - 1.0)) / 9.0;
}

double a_coeff(const PlatformDecay& upper, const PlatformDecay& lower, double t,
               double x) {
  const double z = zeta(x);
  return z * upper.b(t) + (1.0 - z) * lower.b(t);
}

const char* to_string(ComparisonKind k) {
  switch (k) {
    case ComparisonKind::fife_mcleod_upper: return "fife-mcleod-upper";
    case ComparisonKind::fife_mcleod_lower: return "fife-mcleod-lower";
    case ComparisonKind::flattening_upper: return "flattening-upper";
    case ComparisonKind::flattening_lower: return "flattening-lower";
  }
  return "?";
}

ComparisonFunction fife_mcleod(ComparisonKind kind, const WaveProfile& wave,
                               const NonlinearitySpec& spec, double c, double K,
                               double eps, const SupersubParams& params) {
  require(kind == ComparisonKind::fife_mcleod_upper ||
              kind == ComparisonKind::fife_mcleod_lower,
          "fife_mcleod: kind must be one of the fife-mcleod kinds");
  if (kind == ComparisonKind::fife_mcleod_upper)
    require(c > wave.c, "fife_mcleod upper requires c > wave speed");
  else
    require(c < wave.c, "fife_mcleod lower requires c < wave speed");
  require(eps >= 0, "fife_mcleod: eps must be nonnegative");

  auto wave_ptr = std::make_shared<WaveProfile>(wave);
  auto upper = std::make_shared<PlatformDecay>(spec, wave.upper, params.ode_tol);
  auto lower = std::make_shared<PlatformDecay>(spec, wave.lower, params.ode_tol);
  const double sign = kind == ComparisonKind::fife_mcleod_upper ? 1.0 : -1.0;

  ComparisonFunction cf;
  cf.kind = kind;
  cf.frame_speed = c;
  cf.offset_K = K;
  cf.eps = eps;
  cf.value_hi = wave.upper.value_at0();
  cf.eval = [wave_ptr, upper, lower, c, K, eps, sign](double t, double x) {
    const double xi = x - c * t;
    // U(t, x + c_i t - c t + K) = Utilde(t mod T, xi + K).
    double tau = std::fmod(t, wave_ptr->period_T);
    if (tau < 0) tau += wave_ptr->period_T;
    return wave_ptr->eval_profile(tau, xi + K) +
           sign * eps * a_coeff(*upper, *lower, t, xi);
  };
  return cf;
}

std::string CertificationReport::to_json() const {
  nlohmann::json j;
  j["kind"] = terracelab::to_string(kind);
  j["params"] = {{"c", params_c},
                 {"K", params_K},
                 {"eps", params_eps},
                 {"C1", params_c1},
                 {"C2", params_c2}};
  j["min_residual"] = worst_residual;
  j["argmin"] = {worst_t, worst_x};
  j["cert_tol"] = cert_tol;
  j["certified"] = certified;
  return j.dump();
}

CertificationReport check_comparison(const ComparisonFunction& cf,
                                     const NonlinearitySpec& spec,
                                     const Grid& grid,
                                     const std::vector<double>& times,
                                     const SupersubParams& params) {
  CertificationReport rep;
  rep.kind = cf.kind;
  rep.params_c = cf.frame_speed;
  rep.params_K = cf.offset_K;
  rep.params_eps = cf.eps;
  rep.params_c1 = cf.c1;
  rep.params_c2 = cf.c2;
  const double fscale =
      std::max(1.0, spec.sup_abs(-0.1, 1.1 * std::max(cf.value_hi, 1e-12)));
  rep.cert_tol = params.cert_tol_rel * fscale;

  const double hx = grid.dx() / params.stencil_refine;
  const double ht = params.stencil_dt / params.stencil_refine;
  const bool upper = cf.upper();
  double worst = upper ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();

  for (double t : times) {
    for (int j = 0; j < grid.n_x; ++j) {
      const double x = grid.x(j);
      const double w0 = cf.eval(t, x);
      const double wt =
          (cf.eval(t + ht, x) - cf.eval(t - ht, x)) / (2.0 * ht);
      const double wxx =
          (-cf.eval(t, x - 2 * hx) + 16.0 * cf.eval(t, x - hx) - 30.0 * w0 +
           16.0 * cf.eval(t, x + hx) - cf.eval(t, x + 2 * hx)) /
          (12.0 * hx * hx);
      const double res = wt - wxx - spec.eval(t, w0);
      if (upper ? res < worst : res > worst) {
        worst = res;
        rep.worst_t = t;
        rep.worst_x = x;
      }
    }
  }
  rep.worst_residual = worst;
  rep.certified = upper ? worst >= -rep.cert_tol : worst <= rep.cert_tol;
  return rep;
}

EpsSearch find_certified_eps(ComparisonKind kind, const WaveProfile& wave,
                             const NonlinearitySpec& spec, double c, double K,
                             const Grid& grid, const std::vector<double>& times,
                             const SupersubParams& params) {
  EpsSearch out;
  const double gap =
      std::abs(wave.upper.value_at0() - wave.lower.value_at0());
  double lo = 1e-6;
  double hi = 0.5 * gap;
  auto certified = [&](double eps) {
    const ComparisonFunction cf = fife_mcleod(kind, wave, spec, c, K, eps, params);
    return check_comparison(cf, spec, grid, times, params);
  };
  CertificationReport rep_lo = certified(lo);
  if (!rep_lo.certified) return out;  // nothing certifies
  out.any_certified = true;
  CertificationReport rep_hi = certified(hi);
  if (rep_hi.certified) {
    out.eps_hat = hi;
    out.report = rep_hi;
    return out;
  }
  for (int it = 0; it < params.eps_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    const CertificationReport rep = certified(mid);
    if (rep.certified) {
      lo = mid;
      rep_lo = rep;
    } else {
      hi = mid;
    }
  }
  out.eps_hat = lo;
  out.report = rep_lo;
  return out;
}

namespace {

double gamma_bridge(double x) { return 0.5 * (1.0 + std::tanh(x / 2.0)); }
double gamma_inv(double y) { return std::log(y / (1.0 - y)); }

struct TailStats {
  double sup, inf, left_liminf, right_limsup;
};

TailStats tail_stats(const Field& u0) {
  TailStats s{};
  s.sup = u0.max();
  s.inf = u0.min();
  const int n = u0.grid.n_x;
  const int tail = std::max(2, n / 20);
  double lmin = u0.values[0];
  for (int i = 0; i < tail; ++i) lmin = std::min(lmin, u0.values[i]);
  double rmax = u0.values[n - 1];
  for (int i = n - tail; i < n; ++i) rmax = std::max(rmax, u0.values[i]);
  s.left_liminf = lmin;
  s.right_limsup = rmax;
  return s;
}

void check_h3(const TailStats& s, const AttractionInterval& basin_top,
              const AttractionInterval& basin_zero) {
  auto fail = [](const std::string& which) {
    throw std::invalid_argument("front-like data check failed: " + which);
  };
  if (!basin_top.contains(s.left_liminf))
    fail("liminf at -inf (" + std::to_string(s.left_liminf) +
         ") outside the basin of the top platform");
  if (!basin_top.contains(s.sup))
    fail("sup (" + std::to_string(s.sup) +
         ") outside the basin of the top platform");
  if (!basin_zero.contains(s.right_limsup))
    fail("limsup at +inf (" + std::to_string(s.right_limsup) +
         ") outside the basin of 0");
  if (!basin_zero.contains(s.inf))
    fail("inf (" + std::to_string(s.inf) + ") outside the basin of 0");
}

UniformSpline integrate_ode_sampled(const NonlinearitySpec& spec, double h0,
                                    double horizon, double ode_tol) {
  const int n = std::max(128, static_cast<int>(horizon / spec.period() * 64));
  OdeOptions opts;
  opts.abs_tol = opts.rel_tol = ode_tol;
  std::vector<double> ys(n + 1);
  ys[0] = h0;
  double y = h0;
  for (int i = 1; i <= n; ++i) {
    y = ode_solve_scalar([&](double t, double v) { return spec.eval(t, v); },
                         horizon * (i - 1) / n, horizon * i / n, y, opts);
    ys[i] = y;
  }
  return UniformSpline(0.0, horizon / n, ys);
}

ComparisonFunction flattening_impl(const Field& u0,
                                   const NonlinearitySpec& spec,
                                   const AttractionInterval& basin_top,
                                   const AttractionInterval& basin_zero,
                                   double horizon, bool upper,
                                   const SupersubParams& params) {
  const TailStats s = tail_stats(u0);
  check_h3(s, basin_top, basin_zero);

  const double p_scale = std::max(s.sup, 1e-12);
  auto pick_above = [&](double floor_v, const AttractionInterval& basin) {
    const double room = basin.hi - floor_v;
    require(room > 0, "no room above the data inside the basin");
    return floor_v + std::min(0.25 * room, 0.05 * p_scale);
  };
  auto pick_below = [&](double ceil_v, const AttractionInterval& basin) {
    const double room = ceil_v - basin.lo;
    require(room > 0, "no room below the data inside the basin");
    return ceil_v - std::min(0.25 * room, 0.05 * p_scale);
  };

  const double h_plus = upper ? pick_above(s.sup, basin_top)
                              : pick_below(s.left_liminf, basin_top);
  const double h_minus = upper ? pick_above(s.right_limsup, basin_zero)
                               : pick_below(s.inf, basin_zero);

  // Cutoff C1: for the upper kind, the smallest shift keeping W(0,.) >= u0;
  // mirrored for the lower kind.
  double c1 = upper ? -std::numeric_limits<double>::infinity()
                    : std::numeric_limits<double>::infinity();
  for (int i = 0; i < u0.grid.n_x; ++i) {
    const double x = u0.grid.x(i);
    const double g = (h_plus - u0.values[i]) / (h_plus - h_minus);
    if (upper) {
      if (g <= 0)
        throw std::logic_error("flattening: data above h_plus after checks");
      if (g >= 1) continue;  // no constraint from this point
      c1 = std::max(c1, x - gamma_inv(g));
    } else {
      if (g >= 1)
        throw std::logic_error("flattening: data below h_minus after checks");
      if (g <= 0) continue;
      c1 = std::min(c1, x - gamma_inv(g));
    }
  }
  if (!std::isfinite(c1)) c1 = upper ? u0.grid.xmin : u0.grid.xmax;
  c1 += upper ? 1.0 : -1.0;

  const double lip = spec.lipschitz_du(-0.1, 1.1 * std::max(p_scale, 1.0),
                                       params.lipschitz_n,
                                       params.lipschitz_safety);
  auto hp = std::make_shared<UniformSpline>(
      integrate_ode_sampled(spec, h_plus, horizon, params.ode_tol));
  auto hm = std::make_shared<UniformSpline>(
      integrate_ode_sampled(spec, h_minus, horizon, params.ode_tol));
  double sup_gap = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double t = horizon * i / 400.0;
    sup_gap = std::max(sup_gap, std::abs((*hp)(t) - (*hm)(t)));
  }
  const double c2 = 1.0 + lip * sup_gap;

  ComparisonFunction cf;
  cf.kind = upper ? ComparisonKind::flattening_upper
                  : ComparisonKind::flattening_lower;
  cf.c1 = c1;
  cf.c2 = c2;
  cf.value_hi = std::max(h_plus, p_scale);
  cf.frame_speed = upper ? c2 : -c2;
  const double dir = upper ? 1.0 : -1.0;
  cf.eval = [hp, hm, c1, c2, dir](double t, double x) {
    const double g = gamma_bridge(x - c1 - dir * c2 * t);
    return (*hp)(t) * (1.0 - g) + (*hm)(t)*g;
  };
  return cf;
}

}  // namespace

ComparisonFunction flattening_super(const Field& u0,
                                    const NonlinearitySpec& spec,
                                    const AttractionInterval& basin_top,
                                    const AttractionInterval& basin_zero,
                                    double horizon,
                                    const SupersubParams& params) {
  return flattening_impl(u0, spec, basin_top, basin_zero, horizon, true, params);
}

ComparisonFunction flattening_sub(const Field& u0, const NonlinearitySpec& spec,
                                  const AttractionInterval& basin_top,
                                  const AttractionInterval& basin_zero,
                                  double horizon,
                                  const SupersubParams& params) {
  return flattening_impl(u0, spec, basin_top, basin_zero, horizon, false,
                         params);
}

SandwichFit sandwich_fit(const Trajectory& traj_u,
                         const Trajectory& traj_hat_plus,
                         const Trajectory& traj_hat_minus) {
  SandwichFit fit;
  const Grid& g = traj_u.snapshots.front().grid;
  require(g == traj_hat_plus.snapshots.front().grid &&
              g == traj_hat_minus.snapshots.front().grid,
          "sandwich_fit: runs must share the grid");

  double scale = 0.0;
  std::vector<double> vt, vv;
  for (const Field& fu : traj_u.snapshots) {
    const auto ip = traj_hat_plus.snapshot_at_time(fu.t);
    const auto im = traj_hat_minus.snapshot_at_time(fu.t);
    if (!ip || !im) continue;
    const Field& fp = traj_hat_plus.snapshots[*ip];
    const Field& fm = traj_hat_minus.snapshots[*im];
    double v = 0.0;
    for (int j = 0; j < g.n_x; ++j) {
      v = std::max(v, fu.values[j] - fp.values[j]);
      v = std::max(v, fm.values[j] - fu.values[j]);
      scale = std::max(scale, std::abs(fu.values[j]));
    }
    vt.push_back(fu.t);
    vv.push_back(std::max(v, 0.0));
  }
  require(vt.size() >= 4, "sandwich_fit: too few common snapshots");

  const double tiny = 1e-13 * std::max(scale, 1.0);
  if (*std::max_element(vv.begin(), vv.end()) <= tiny) {
    fit.trapped_exactly = true;
    fit.K0_hat = 0.0;
    fit.beta0_hat = std::numeric_limits<double>::infinity();
    return fit;
  }

  // Log-linear fit of the positive violations past the first period.
  const double T = traj_u.spec.period();
  std::vector<double> x, y;
  for (size_t i = 0; i < vt.size(); ++i) {
    if (vt[i] < T || vv[i] <= tiny) continue;
    x.push_back(vt[i]);
    y.push_back(std::log(vv[i]));
  }
  if (x.size() < 4) {
    // Violations die below the floor within the first periods; report the
    // measured decay from the first positive sample down to the floor.
    size_t first = 0;
    while (first < vv.size() && vv[first] <= tiny) ++first;
    size_t zero = vv.size() - 1;
    for (size_t i = vv.size(); i-- > first;) {
      if (vv[i] > tiny) break;
      zero = i;
    }
    const double t_first = vt[first];
    const double t_zero = vt[zero];
    fit.valid_from = t_first;
    fit.beta0_hat =
        std::log(vv[first] / tiny) / std::max(t_zero - t_first, T);
    fit.K0_hat = vv[first] * std::exp(fit.beta0_hat * t_first);
    return fit;
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= x.size();
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  fit.beta0_hat = -slope;
  fit.valid_from = x.front();
  if (!(fit.beta0_hat > 0)) {
    fit.fit_failed = true;
    return fit;
  }
  // Envelope constant: the bound must hold at every fitted snapshot.
  double k0 = 0.0;
  for (size_t i = 0; i < x.size(); ++i)
    k0 = std::max(k0, std::exp(y[i] + fit.beta0_hat * x[i]));
  fit.K0_hat = k0;
  return fit;
}

}  // namespace terracelab
