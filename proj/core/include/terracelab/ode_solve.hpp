#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "terracelab/common.hpp"

namespace terracelab {

/// Thrown when a trajectory escapes the admissible range before the target
/// time; carries the escape time.
struct OdeDivergence : std::runtime_error {
  OdeDivergence(double t, double value)
      : std::runtime_error("ODE trajectory diverged at t=" + std::to_string(t) +
                           " (value " + std::to_string(value) + ")"),
        escape_time(t),
        escape_value(value) {}
  double escape_time;
  double escape_value;
};

struct OdeOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double initial_step = 1e-3;
  double escape_bound = 1e8;  // |y| above this counts as blow-up
  long max_steps = 50'000'000;
};

// Adaptive Dormand-Prince 5(4) for small fixed-size systems.
template <int N>
class DormandPrince {
 public:
  using State = std::array<double, N>;
  using Rhs = std::function<void(double, const State&, State&)>;

  explicit DormandPrince(Rhs rhs, OdeOptions opts = {})
      : rhs_(std::move(rhs)), opts_(opts) {}

  /// Integrates y from t0 to t1 (t1 >= t0) and returns y(t1).
  State solve(double t0, double t1, State y) const {
    if (t1 <= t0) return y;
    double t = t0;
    double h = std::min(opts_.initial_step, t1 - t0);
    State k1;
    rhs_(t, y, k1);
    long steps = 0;
    while (t < t1) {
      if (++steps > opts_.max_steps)
        throw std::runtime_error("ODE solver exceeded max step count");
      h = std::min(h, t1 - t);
      State y5, y4;
      State k2, k3, k4, k5, k6, k7;
      stage(y, k1, t, h, y5, y4, k2, k3, k4, k5, k6, k7);
      double err = 0.0;
      for (int i = 0; i < N; ++i) {
        const double sc =
            opts_.abs_tol +
            opts_.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(y5[i] - y4[i]) / sc);
      }
      if (err <= 1.0) {
        t += h;
        y = y5;
        k1 = k7;  // FSAL
        for (int i = 0; i < N; ++i) {
          if (!std::isfinite(y[i]) || std::abs(y[i]) > opts_.escape_bound)
            throw OdeDivergence(t, y[i]);
        }
      }
      const double fac =
          std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
      h *= fac;
      if (h < 1e-14 * std::max(1.0, std::abs(t)))
        throw std::runtime_error("ODE step size underflow");
    }
    return y;
  }

 private:
  void stage(const State& y, const State& k1, double t, double h, State& y5,
             State& y4, State& k2, State& k3, State& k4, State& k5, State& k6,
             State& k7) const {
    auto axpy = [&](const std::array<double, 6>& a, int stages, State& out) {
      const State* ks[6] = {&k1, &k2, &k3, &k4, &k5, &k6};
      for (int i = 0; i < N; ++i) {
        double acc = y[i];
        for (int s = 0; s < stages; ++s) acc += h * a[s] * (*ks[s])[i];
        out[i] = acc;
      }
    };
    State tmp;
    axpy({1.0 / 5}, 1, tmp);
    rhs_(t + h / 5, tmp, k2);
    axpy({3.0 / 40, 9.0 / 40}, 2, tmp);
    rhs_(t + 3 * h / 10, tmp, k3);
    axpy({44.0 / 45, -56.0 / 15, 32.0 / 9}, 3, tmp);
    rhs_(t + 4 * h / 5, tmp, k4);
    axpy({19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729}, 4,
         tmp);
    rhs_(t + 8 * h / 9, tmp, k5);
    axpy({9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
          -5103.0 / 18656},
         5, tmp);
    rhs_(t + h, tmp, k6);
    axpy({35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
          11.0 / 84},
         6, y5);
    rhs_(t + h, y5, k7);
    // 4th-order comparison solution.
    static constexpr std::array<double, 7> b4 = {
        5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
        -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
    const State* ks[7] = {&k1, &k2, &k3, &k4, &k5, &k6, &k7};
    for (int i = 0; i < N; ++i) {
      double acc = y[i];
      for (int s = 0; s < 7; ++s) acc += h * b4[s] * (*ks[s])[i];
      y4[i] = acc;
    }
  }

  Rhs rhs_;
  OdeOptions opts_;
};

/// Scalar convenience wrapper: integrates dy/dt = f(t,y).
inline double ode_solve_scalar(const std::function<double(double, double)>& f,
                               double t0, double t1, double y0,
                               OdeOptions opts = {}) {
  DormandPrince<1> solver(
      [&](double t, const std::array<double, 1>& y, std::array<double, 1>& dy) {
        dy[0] = f(t, y[0]);
      },
      opts);
  return solver.solve(t0, t1, {y0})[0];
}

}  // namespace terracelab
