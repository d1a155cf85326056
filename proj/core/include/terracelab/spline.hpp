#pragma once

#include <vector>

#include "terracelab/common.hpp"

namespace terracelab {

// Natural cubic spline on a uniform grid; clamps to the end values outside
// the knot range so profile tails extend by constants.
class UniformSpline {
 public:
  UniformSpline() = default;
  UniformSpline(double x0, double dx, std::vector<double> y)
      : x0_(x0), dx_(dx), y_(std::move(y)) {
    require(y_.size() >= 3, "spline needs at least 3 knots");
    require(dx_ > 0, "spline needs dx > 0");
    build();
  }

  double operator()(double x) const {
    const int n = static_cast<int>(y_.size());
    double pos = (x - x0_) / dx_;
    if (pos <= 0.0) return y_.front();
    if (pos >= n - 1) return y_.back();
    const int i = static_cast<int>(pos);
    const double s = (pos - i) * dx_;
    return y_[i] + b_[i] * s + c_[i] * s * s + d_[i] * s * s * s;
  }

  double x0() const { return x0_; }
  double x1() const { return x0_ + dx_ * (y_.size() - 1); }

 private:
  void build() {
    const int n = static_cast<int>(y_.size());
    b_.assign(n, 0.0);
    c_.assign(n, 0.0);
    d_.assign(n, 0.0);
    // Solve the natural-spline tridiagonal system for the c coefficients.
    std::vector<double> rhs(n, 0.0), cp(n, 0.0);
    for (int i = 1; i < n - 1; ++i)
      rhs[i] = 3.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (dx_ * dx_);
    std::vector<double> diag(n, 4.0);
    diag[0] = diag[n - 1] = 1.0;
    cp[0] = 0.0;
    std::vector<double> dp(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
      const double m = diag[i] - cp[i - 1];
      cp[i] = 1.0 / m;
      dp[i] = (rhs[i] - dp[i - 1]) / m;
    }
    c_[n - 1] = 0.0;
    for (int i = n - 2; i >= 1; --i) c_[i] = dp[i] - cp[i] * c_[i + 1];
    c_[0] = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      b_[i] = (y_[i + 1] - y_[i]) / dx_ - dx_ * (2.0 * c_[i] + c_[i + 1]) / 3.0;
      d_[i] = (c_[i + 1] - c_[i]) / (3.0 * dx_);
    }
  }

  double x0_ = 0.0;
  double dx_ = 1.0;
  std::vector<double> y_, b_, c_, d_;
};

}  // namespace terracelab
