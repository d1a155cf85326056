#include "terracelab/pde.hpp"

#include <cmath>
#include <random>

namespace terracelab {

Field heaviside_ic(const Grid& grid, double a, double p0, bool strict,
                   std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& msg) {
    if (strict) throw std::invalid_argument("strict mode: " + msg);
    if (warnings) warnings->push_back(msg);
  };
  if (a < grid.xmin || a > grid.xmax)
    warn("heaviside jump at " + std::to_string(a) + " lies outside the domain");
  else if (a - grid.xmin < 10 * grid.dx() || grid.xmax - a < 10 * grid.dx())
    warn("heaviside jump within 10*dx of a boundary");

  Field f(grid, 0.0);
  const int jump = grid.nearest_index(a);
  const bool outside_left = a < grid.xmin;
  for (int i = 0; i < grid.n_x; ++i)
    f.values[i] = (!outside_left && i <= jump) ? p0 : 0.0;
  if (a > grid.xmax) std::fill(f.values.begin(), f.values.end(), p0);
  return f;
}

Field sandwich_ic(const Grid& grid, double a_minus, double a_plus, double p0,
                  const SandwichParams& params) {
  require(a_minus < a_plus, "sandwich_ic needs a_minus < a_plus");
  const double left =
      params.left_level >= 0.0 && params.shape == SandwichShape::general_h3
          ? params.left_level
          : p0;
  const double right =
      params.shape == SandwichShape::general_h3 ? params.right_level : 0.0;

  Field f(grid, 0.0);
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double bump_center = 0.5 * (a_minus + a_plus);
  if (params.seed != 0)
    bump_center = a_minus + (a_plus - a_minus) * (0.25 + 0.5 * unif(rng));

  for (int i = 0; i < grid.n_x; ++i) {
    const double x = grid.x(i);
    double v;
    if (x <= a_minus) {
      v = left;
    } else if (x >= a_plus) {
      v = right;
    } else {
      const double s = (x - a_minus) / (a_plus - a_minus);
      v = left + (right - left) * s;
      if (params.shape != SandwichShape::ramp && params.bump_amplitude != 0.0) {
        const double arg = (x - bump_center) / params.bump_width;
        v += params.bump_amplitude * p0 * std::exp(-arg * arg);
      }
    }
    f.values[i] = std::clamp(v, 0.0, p0);
  }
  // Tail levels of general_h3 data may legitimately sit above 0; reapply them
  // after clipping.
  if (params.shape == SandwichShape::general_h3) {
    for (int i = 0; i < grid.n_x; ++i) {
      const double x = grid.x(i);
      if (x <= a_minus) f.values[i] = left;
      if (x >= a_plus) f.values[i] = right;
    }
  }
  return f;
}

namespace {

class Stepper {
 public:
  Stepper(const NonlinearitySpec& spec, const Grid& grid, double dt,
          BcPolicy bc, double umin, double umax)
      : spec_(spec), bc_(bc), dt_(dt), n_(grid.n_x) {
    const double pad = 0.1 + 0.25 * (umax - umin);
    const double lf = spec.sup_abs_du(umin - pad, umax + pad);
    const double dt_monotone = lf > 0 ? std::min(dt, 0.5 / lf) : dt;
    reaction_substeps_ =
        std::max(1, static_cast<int>(std::ceil(dt / dt_monotone)));
    // Crank-Nicolson diffusion substeps keep r = dt_sub/dx^2 <= 1/2, which
    // makes the explicit half totally nonnegative (order preserving and
    // variation diminishing) while staying second order in time.
    const double r_full = dt / (grid.dx() * grid.dx());
    diffusion_substeps_ =
        std::max(1, static_cast<int>(std::ceil(2.0 * r_full)));
    resize(grid);
  }

  void resize(const Grid& grid) {
    n_ = grid.n_x;
    const double r = dt_ / (grid.dx() * grid.dx()) / diffusion_substeps_;
    half_r_ = 0.5 * r;
    // Implicit side (I - (dt_sub/2) L): interior diagonal 1 + r, off -r/2.
    cprime_.assign(n_, 0.0);
    cprime_[0] = 0.0;  // Dirichlet identity row
    for (int i = 1; i < n_ - 1; ++i)
      cprime_[i] = -half_r_ / ((1.0 + 2.0 * half_r_) + half_r_ * cprime_[i - 1]);
    rhs_.assign(n_, 0.0);
    dprime_.assign(n_, 0.0);
  }

  int reaction_substeps() const { return reaction_substeps_; }

  // Advances u (and the boundary states) from time t to t + dt_ in place.
  void advance(std::vector<double>& u, double t, double& bl, double& br) {
    reaction_half(u, t, bl, br);
    for (int s = 0; s < diffusion_substeps_; ++s) diffuse(u, bl, br);
    reaction_half(u, t + dt_ / 2, bl, br);
  }

 private:
  void reaction_half(std::vector<double>& u, double t0, double& bl,
                     double& br) {
    const double h = dt_ / (2.0 * reaction_substeps_);
    double t = t0;
    for (int s = 0; s < reaction_substeps_; ++s) {
      for (double& v : u) v = midpoint(t, v, h);
      if (bc_ == BcPolicy::track_reaction) {
        bl = u.front();
        br = u.back();
      } else {
        u.front() = bl;
        u.back() = br;
      }
      t += h;
    }
  }

  double midpoint(double t, double v, double h) const {
    if (!std::isfinite(v)) return v;  // blow-up reported after the step
    const double k1 = spec_.eval(t, v);
    const double mid = v + (h / 2) * k1;
    if (!std::isfinite(mid)) return mid;
    return v + h * spec_.eval(t + h / 2, mid);
  }

  // One Crank-Nicolson substep with Dirichlet values bl/br on both sides.
  void diffuse(std::vector<double>& u, double bl, double br) {
    rhs_[0] = bl;
    for (int i = 1; i < n_ - 1; ++i)
      rhs_[i] = u[i] + half_r_ * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
    rhs_[n_ - 1] = br;
    dprime_[0] = rhs_[0];
    const double diag = 1.0 + 2.0 * half_r_;
    for (int i = 1; i < n_ - 1; ++i)
      dprime_[i] =
          (rhs_[i] + half_r_ * dprime_[i - 1]) / (diag + half_r_ * cprime_[i - 1]);
    dprime_[n_ - 1] = rhs_[n_ - 1];
    u[n_ - 1] = dprime_[n_ - 1];
    for (int i = n_ - 2; i >= 0; --i) u[i] = dprime_[i] - cprime_[i] * u[i + 1];
    u[0] = bl;
  }

  const NonlinearitySpec& spec_;
  BcPolicy bc_;
  double dt_;
  int n_;
  int reaction_substeps_ = 1;
  int diffusion_substeps_ = 1;
  double half_r_ = 0.0;
  std::vector<double> cprime_, dprime_, rhs_;
};

void check_finite(const std::vector<double>& u, double t) {
  for (size_t i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i])) throw BlowUpError(t, static_cast<int>(i));
}

}  // namespace

Field step(const Field& field, const NonlinearitySpec& spec, double dt,
           BcPolicy bc) {
  require(dt > 0, "step: dt must be positive");
  Field out = field;
  Stepper stepper(spec, field.grid, dt, bc, field.min(), field.max());
  double bl = out.values.front();
  double br = out.values.back();
  stepper.advance(out.values, field.t, bl, br);
  out.t = field.t + dt;
  check_finite(out.values, out.t);
  return out;
}

Trajectory simulate(const NonlinearitySpec& spec, const Grid& grid,
                    const Field& ic, BcPolicy bc, double dt, double t_end,
                    const SimulateOptions& opts) {
  require(t_end > 0, "simulate: t_end must be positive");
  require(dt > 0, "simulate: dt must be positive");
  require(ic.grid == grid, "simulate: initial condition grid mismatch");
  const double T = spec.period();
  const long spp = std::lround(T / dt);
  require(spp >= 1 && std::abs(spp * dt - T) <= 1e-9 * std::max(1.0, T),
          "simulate: dt must divide the period T");
  const long n_steps = std::lround(t_end / dt);

  Trajectory traj;
  traj.spec = spec;
  traj.bc = bc;
  traj.dt = dt;

  Grid g = grid;
  std::vector<double> u = ic.values;
  check_finite(u, 0.0);
  Stepper stepper(spec, g, dt, bc, ic.min(), ic.max());
  double bl = u.front();
  double br = u.back();
  const double level_scale = std::max(std::abs(ic.max()), 1e-12);

  auto push_snapshot = [&](long step_idx) {
    Field f(g, step_idx * dt);
    f.values = u;
    if (step_idx % spp == 0)
      traj.period_snapshot_indices.push_back(
          static_cast<int>(traj.snapshots.size()));
    traj.snapshots.push_back(std::move(f));
  };

  push_snapshot(0);
  for (long s = 1; s <= n_steps; ++s) {
    stepper.advance(u, (s - 1) * dt, bl, br);
    check_finite(u, s * dt);

    const bool period_boundary = (s % spp == 0);
    if (period_boundary && opts.moving_window) {
      // Shift the window right when the leading front nears the boundary.
      const double level = opts.window_level * level_scale;
      int cross = -1;
      for (int i = g.n_x - 1; i >= 0; --i)
        if (u[i] >= level) { cross = i; break; }
      if (cross >= 0) {
        const double gap = g.xmax - g.x(cross);
        if (gap < opts.window_margin) {
          const int shift = static_cast<int>(
              std::ceil((opts.window_margin - gap) / g.dx())) +
              g.n_x / 10;
          const int m = std::min(shift, g.n_x - 16);
          const double shift_x = m * g.dx();
          u.erase(u.begin(), u.begin() + m);
          u.insert(u.end(), m, br);
          g.xmin += shift_x;
          g.xmax += shift_x;
          bl = u.front();
        }
      }
    }

    if (period_boundary || s == n_steps ||
        (opts.snapshot_stride > 0 && s % opts.snapshot_stride == 0))
      push_snapshot(s);
  }
  return traj;
}

}  // namespace terracelab
