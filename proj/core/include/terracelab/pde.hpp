#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "terracelab/grid.hpp"
#include "terracelab/nonlinearity.hpp"

namespace terracelab {

/// Boundary handling on the truncated line.  `track_reaction` advances each
/// boundary value with the spatially homogeneous reaction map, so a Heaviside
/// run keeps u = p(t) on the left and u = 0 on the right; `frozen` pins both
/// boundary values at their initial data.
enum class BcPolicy { track_reaction, frozen };

struct BlowUpError : std::runtime_error {
  BlowUpError(double t, int index)
      : std::runtime_error("PDE blow-up at t=" + std::to_string(t) +
                           ", first bad index " + std::to_string(index)),
        time(t),
        first_bad_index(index) {}
  double time;
  int first_bad_index;
};

struct SimulateOptions {
  int snapshot_stride = 0;     // 0: only forced period snapshots
  bool moving_window = false;  // shift the grid to chase the fastest front
  double window_margin = 50.0; // min distance from front to the right edge
  double window_level = 1e-2;  // front locator level for the moving window
};

struct Trajectory {
  NonlinearitySpec spec;
  BcPolicy bc = BcPolicy::track_reaction;
  double dt = 0.0;
  std::vector<Field> snapshots;
  std::vector<int> period_snapshot_indices;  // snapshots with t = k*T

  const Field& at_period(int k) const {
    return snapshots[period_snapshot_indices.at(k)];
  }
  int periods() const { return static_cast<int>(period_snapshot_indices.size()); }
  const Field& final_field() const { return snapshots.back(); }
  std::optional<int> snapshot_at_time(double t, double tol = 1e-9) const {
    for (size_t i = 0; i < snapshots.size(); ++i)
      if (std::abs(snapshots[i].t - t) <= tol) return static_cast<int>(i);
    return std::nullopt;
  }
};

/// u0(x) = p0 * H(a - x) with the jump snapped to the nearest grid point.
/// A jump within 10*dx of either boundary produces a warning; under strict
/// mode a jump outside the domain is an error.
Field heaviside_ic(const Grid& grid, double a, double p0, bool strict = false,
                   std::vector<std::string>* warnings = nullptr);

enum class SandwichShape { ramp, ramp_bump, general_h3 };

struct SandwichParams {
  SandwichShape shape = SandwichShape::ramp;
  double bump_amplitude = 0.0;  // relative to p0, for ramp_bump / general_h3
  double bump_width = 2.0;
  unsigned seed = 0;            // randomized bump placement when nonzero
  // general_h3 tail levels (liminf at -inf, limsup at +inf):
  double left_level = -1.0;     // < 0: default p0
  double right_level = 0.0;
};

/// (H2)/(H3) style initial data: p0 left of a_minus, 0 (or the requested tail
/// level) right of a_plus, a caller-chosen shape in between, clipped into
/// [0, p0].
Field sandwich_ic(const Grid& grid, double a_minus, double a_plus, double p0,
                  const SandwichParams& params);

/// One Strang step: explicit midpoint reaction over dt/2, implicit diffusion
/// over dt (tridiagonal solve), reaction over the second half.  The reaction
/// halves substep as needed to stay monotone (dt_monotone = 0.5/||df/du||).
Field step(const Field& field, const NonlinearitySpec& spec, double dt,
           BcPolicy bc = BcPolicy::track_reaction);

/// Runs the scheme to t_end, storing snapshots every `snapshot_stride` steps
/// plus forced snapshots at every t = k*T.  Requires dt to divide T.
Trajectory simulate(const NonlinearitySpec& spec, const Grid& grid,
                    const Field& ic, BcPolicy bc, double dt, double t_end,
                    const SimulateOptions& opts = {});

}  // namespace terracelab
