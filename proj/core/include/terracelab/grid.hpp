#pragma once

#include <vector>

#include "terracelab/common.hpp"

namespace terracelab {

struct Grid {
  double xmin = 0.0;
  double xmax = 1.0;
  int n_x = 16;

  Grid() = default;
  Grid(double xmin_, double xmax_, int n_x_) : xmin(xmin_), xmax(xmax_), n_x(n_x_) {
    require(n_x >= 16, "grid needs at least 16 points");
    require(xmax > xmin, "grid needs xmax > xmin");
  }

  double dx() const { return (xmax - xmin) / (n_x - 1); }
  double x(int i) const { return xmin + dx() * i; }
  int nearest_index(double xq) const {
    const int i = static_cast<int>(std::lround((xq - xmin) / dx()));
    return std::clamp(i, 0, n_x - 1);
  }
  bool operator==(const Grid& o) const {
    return xmin == o.xmin && xmax == o.xmax && n_x == o.n_x;
  }
};

// One spatial snapshot u(t, .) on a grid.
struct Field {
  Grid grid;
  double t = 0.0;
  std::vector<double> values;

  Field() = default;
  Field(const Grid& g, double t_, double fill = 0.0)
      : grid(g), t(t_), values(g.n_x, fill) {}

  double min() const { return *std::min_element(values.begin(), values.end()); }
  double max() const { return *std::max_element(values.begin(), values.end()); }

  /// Linear interpolation at xq (clamped to the grid range).
  double interp(double xq) const {
    const double pos = (xq - grid.xmin) / grid.dx();
    if (pos <= 0) return values.front();
    if (pos >= grid.n_x - 1) return values.back();
    const int i = static_cast<int>(pos);
    const double w = pos - i;
    return values[i] * (1.0 - w) + values[i + 1] * w;
  }

  bool monotone_nonincreasing(double tol = 0.0) const {
    for (int i = 0; i + 1 < grid.n_x; ++i)
      if (values[i + 1] > values[i] + tol) return false;
    return true;
  }
};

}  // namespace terracelab
