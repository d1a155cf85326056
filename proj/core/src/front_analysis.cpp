#include "terracelab/front_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "terracelab/spline.hpp"

namespace terracelab {

const char* to_string(Steepness s) {
  switch (s) {
    case Steepness::steeper: return "steeper";
    case Steepness::less_steep: return "less_steep";
    case Steepness::mutually: return "mutually";
    case Steepness::incomparable: return "incomparable";
  }
  return "?";
}

namespace {

// All interpolated crossings of `alpha`, scanning left to right.
std::vector<double> all_crossings(const Field& f, double alpha) {
  std::vector<double> out;
  const auto& v = f.values;
  for (int i = 0; i + 1 < f.grid.n_x; ++i) {
    const double a = v[i] - alpha;
    const double b = v[i + 1] - alpha;
    if (a == 0.0) out.push_back(f.grid.x(i));
    if ((a > 0 && b < 0) || (a < 0 && b > 0)) {
      const double w = a / (a - b);
      out.push_back(f.grid.x(i) + w * f.grid.dx());
    }
  }
  if (!v.empty() && v.back() == alpha) out.push_back(f.grid.xmax);
  return out;
}

double regression_slope(const std::vector<double>& x,
                        const std::vector<double>& y, double* stderr_out) {
  const size_t n = x.size();
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  if (stderr_out) {
    double ss = 0;
    const double intercept = my - slope * mx;
    for (size_t i = 0; i < n; ++i) {
      const double r = y[i] - (intercept + slope * x[i]);
      ss += r * r;
    }
    *stderr_out = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
  }
  return slope;
}

}  // namespace

double level_crossing(const Field& field, double alpha, Crossing which) {
  if (!(alpha > field.min() && alpha < field.max())) {
    if (alpha == field.min() || alpha == field.max()) {
      // Attained exactly at an extremum; fall through to the scan.
    } else {
      throw std::range_error("level_crossing: level " + std::to_string(alpha) +
                             " not attained");
    }
  }
  const std::vector<double> xs = all_crossings(field, alpha);
  if (xs.empty())
    throw std::range_error("level_crossing: level not attained");
  switch (which) {
    case Crossing::rightmost: return xs.back();
    case Crossing::leftmost: return xs.front();
    case Crossing::unique:
      if (xs.size() > 1 && xs.back() - xs.front() > field.grid.dx())
        throw std::runtime_error("level_crossing: crossing not unique");
      return xs.front();
  }
  return xs.front();
}

double refined_crossing(const Field& field, double alpha) {
  const double x_lin = level_crossing(field, alpha, Crossing::rightmost);
  const Grid& g = field.grid;
  const int i = std::clamp(static_cast<int>((x_lin - g.xmin) / g.dx()), 0,
                           g.n_x - 2);
  const int lo = std::max(0, i - 3);
  const int hi = std::min(g.n_x - 1, i + 4);
  if (hi - lo < 3) return x_lin;
  std::vector<double> y(field.values.begin() + lo,
                        field.values.begin() + hi + 1);
  const UniformSpline sp(g.x(lo), g.dx(), y);
  double a = g.x(i), b = g.x(i + 1);
  const bool decreasing = sp(a) >= sp(b);
  for (int it = 0; it < 60 && b - a > 1e-13; ++it) {
    const double m = 0.5 * (a + b);
    const bool above = sp(m) >= alpha;
    if (above == decreasing) a = m; else b = m;
  }
  return 0.5 * (a + b);
}

std::vector<LevelTrack> track_levels(const Trajectory& traj,
                                     const std::vector<double>& alphas,
                                     const FrontAnalysisParams& params) {
  (void)params;
  std::vector<LevelTrack> tracks;
  tracks.reserve(alphas.size());
  for (double alpha : alphas) {
    LevelTrack tr;
    tr.alpha = alpha;
    for (int k = 0; k < traj.periods(); ++k) {
      const Field& f = traj.at_period(k);
      if (!(alpha > f.min() && alpha < f.max())) {
        if (!tr.k.empty()) tr.truncated = true;
        continue;
      }
      tr.k.push_back(k);
      tr.a_k.push_back(level_crossing(f, alpha, Crossing::rightmost));
    }
    tracks.push_back(std::move(tr));
  }
  return tracks;
}

SpeedEstimate estimate_speed(const LevelTrack& track, double T, int burn_in) {
  SpeedEstimate est;
  std::vector<double> x, y;
  for (size_t i = 0; i < track.k.size(); ++i) {
    if (track.k[i] < burn_in) continue;
    x.push_back(track.k[i] * T);
    y.push_back(track.a_k[i]);
  }
  if (x.size() < 10)
    throw std::runtime_error(
        "estimate_speed: need at least burn_in + 10 track entries, have " +
        std::to_string(x.size()) + " after burn-in");
  est.points_used = static_cast<int>(x.size());
  est.c = regression_slope(x, y, &est.stderr_c);
  double inc = 0.0;
  for (size_t i = 1; i < x.size(); ++i) inc += (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
  est.increment_c = inc / (x.size() - 1);
  est.increment_disagrees =
      std::abs(est.increment_c - est.c) > 3.0 * std::max(est.stderr_c, 1e-15);
  return est;
}

int sign_changes(const std::vector<double>& samples, double eps) {
  int count = 0;
  int prev = 0;  // last non-deadband sign seen
  bool any = false;
  for (double v : samples) {
    if (std::abs(v) <= eps) continue;
    const int s = v > 0 ? 1 : -1;
    if (any && s != prev) ++count;
    prev = s;
    any = true;
  }
  return any ? count : -1;
}

ZeroNumberSeries zero_number_series(const Trajectory& traj1,
                                    const Trajectory& traj2, double shift,
                                    int lag_periods,
                                    const FrontAnalysisParams& params) {
  ZeroNumberSeries out;
  require(!traj1.snapshots.empty() && !traj2.snapshots.empty(),
          "zero_number_series: empty trajectory");
  const Grid& g1 = traj1.snapshots.front().grid;
  const Grid& g2 = traj2.snapshots.front().grid;
  require(g1 == g2, "zero_number_series: grid mismatch");
  const double dx = g1.dx();
  const long shift_cells = std::lround(shift / dx);
  require(std::abs(shift_cells * dx - shift) <= 1e-9 * std::max(1.0, dx),
          "zero_number_series: shift must be a multiple of dx");

  const double T = traj1.spec.period();
  double umax = 0.0;
  for (const Field& f : traj1.snapshots)
    umax = std::max(umax, std::max(std::abs(f.min()), std::abs(f.max())));
  const double eps = params.eps_z_rel * std::max(umax, 1e-300);

  for (const Field& f1 : traj1.snapshots) {
    const auto idx2 = traj2.snapshot_at_time(f1.t + lag_periods * T);
    if (!idx2) continue;
    const Field& f2 = traj2.snapshots[*idx2];
    // Overlap of the grids after shifting f2 by `shift`.
    const long lo = std::max<long>(0, -shift_cells);
    const long hi = std::min<long>(g1.n_x, g1.n_x - shift_cells);
    if (hi <= lo) continue;
    std::vector<double> diff;
    diff.reserve(hi - lo);
    for (long i = lo; i < hi; ++i)
      diff.push_back(f1.values[i] - f2.values[i + shift_cells]);
    out.t.push_back(f1.t);
    out.z.push_back(sign_changes(diff, eps));
  }
  return out;
}

namespace {

struct LevelWidths {
  std::vector<double> alphas;
  std::vector<double> x1, x2;  // crossing abscissae per level
};

// Crossing of a monotone non-increasing profile at level alpha, using the
// rightmost bracketing cell so that flat stretches resolve consistently.
std::optional<double> monotone_crossing(const Field& f, double alpha) {
  const auto& v = f.values;
  for (int i = f.grid.n_x - 2; i >= 0; --i) {
    if (v[i] >= alpha && v[i + 1] < alpha) {
      const double a = v[i] - alpha, b = v[i + 1] - alpha;
      const double w = a == b ? 0.0 : a / (a - b);
      return f.grid.x(i) + w * f.grid.dx();
    }
  }
  return std::nullopt;
}

}  // namespace

Steepness is_steeper(const Field& v1, const Field& v2, double tol) {
  if (!v1.monotone_nonincreasing(tol) || !v2.monotone_nonincreasing(tol))
    throw std::invalid_argument("is_steeper: inputs must be monotone");

  const double lo = std::max(v1.min(), v2.min());
  const double hi = std::min(v1.max(), v2.max());
  const double span = hi - lo;
  if (span <= 2 * tol) return Steepness::mutually;  // ranges (nearly) disjoint

  const int n_levels = 64;
  const double trim = std::max(tol, 1e-3 * span);
  std::vector<double> d;
  d.reserve(n_levels);
  double width1 = 0.0, width2 = 0.0;  // total abscissa span over shared levels
  std::optional<double> first1, last1, first2, last2;
  for (int m = 0; m < n_levels; ++m) {
    const double alpha = lo + trim + (span - 2 * trim) * m / (n_levels - 1.0);
    const auto x1 = monotone_crossing(v1, alpha);
    const auto x2 = monotone_crossing(v2, alpha);
    if (!x1 || !x2) continue;
    if (!first1) first1 = *x1;
    if (!first2) first2 = *x2;
    last1 = *x1;
    last2 = *x2;
    d.push_back(*x1 - *x2);
  }
  if (d.size() < 4) return Steepness::mutually;
  width1 = std::abs(*last1 - *first1);
  width2 = std::abs(*last2 - *first2);

  // Accumulated trend of d(alpha) = x1 - x2 over the shared range; steeper
  // <=> d non-decreasing in alpha.  Slack covers interpolation noise (one
  // cell per profile) plus the value tolerance mapped through mean slopes.
  double total_inc = 0.0, total_dec = 0.0;
  for (size_t m = 0; m + 1 < d.size(); ++m) {
    const double step = d[m + 1] - d[m];
    if (step > 0) total_inc += step; else total_dec -= step;
  }
  const double slack = 2.0 * (v1.grid.dx() + v2.grid.dx()) +
                       tol * (width1 + width2) / std::max(span - 2 * trim, tol);
  const double tv = total_inc + total_dec;
  if (tv <= slack) return Steepness::mutually;
  if (total_dec <= slack) return Steepness::steeper;
  if (total_inc <= slack) return Steepness::less_steep;
  return Steepness::incomparable;
}

LimitProfile limit_profile(const Trajectory& traj, double alpha, double window,
                           const FrontAnalysisParams& params) {
  LimitProfile lp;
  lp.anchor_alpha = alpha;
  require(traj.periods() >= 3, "limit_profile: need at least 3 period snapshots");
  {
    const Field& last = traj.at_period(traj.periods() - 1);
    if (!(alpha > last.min() && alpha < last.max()))
      throw std::range_error("limit_profile: alpha outside the attained range");
  }

  const double dx = traj.snapshots.front().grid.dx();
  const int nloc = 2 * static_cast<int>(std::round(window / dx)) + 1;
  Grid local(-window, -window + dx * (nloc - 1), nloc);

  auto shifted = [&](const Field& f) {
    const double a = level_crossing(f, alpha, Crossing::rightmost);
    Field out(local, f.t);
    for (int i = 0; i < nloc; ++i) out.values[i] = f.interp(local.x(i) + a);
    return out;
  };

  const Field prev = shifted(traj.at_period(traj.periods() - 2));
  Field last = shifted(traj.at_period(traj.periods() - 1));
  double defect = 0.0;
  for (int i = 0; i < nloc; ++i)
    defect = std::max(defect, std::abs(last.values[i] - prev.values[i]));
  lp.convergence_defect = defect;
  lp.variation = last.max() - last.min();

  const double p0_scale = traj.snapshots.front().max();
  const double flat_tol = params.flat_tol_rel * std::max(p0_scale, 1e-300);
  if (lp.variation <= flat_tol) {
    lp.verdict = ProfileVerdict::platform;
  } else if (defect < params.profile_tol &&
             last.monotone_nonincreasing(params.profile_tol)) {
    lp.verdict = ProfileVerdict::wave;
  } else {
    lp.verdict = ProfileVerdict::undecided;
  }
  lp.profile = std::move(last);
  return lp;
}

SpreadingBracket spreading_bracket(const Trajectory& traj, double eps,
                                   const FrontAnalysisParams& params) {
  SpreadingBracket br;
  require(traj.periods() >= 12, "spreading_bracket: horizon too short");
  const double T = traj.spec.period();
  const double p_at_0 = traj.at_period(0).max();

  LevelTrack upper, lower;
  upper.alpha = eps;
  lower.alpha = p_at_0 - eps;
  for (int k = 0; k < traj.periods(); ++k) {
    const Field& f = traj.at_period(k);
    if (eps > f.min() && eps < f.max()) {
      upper.k.push_back(k);
      upper.a_k.push_back(level_crossing(f, eps, Crossing::rightmost));
    }
    if (lower.alpha > f.min() && lower.alpha < f.max()) {
      lower.k.push_back(k);
      lower.a_k.push_back(level_crossing(f, lower.alpha, Crossing::leftmost));
    }
  }
  const int burn =
      static_cast<int>(std::ceil(params.burn_in_frac * traj.periods()));
  const SpeedEstimate up = estimate_speed(upper, T, burn);
  const SpeedEstimate low = estimate_speed(lower, T, burn);
  br.c_upper = up.c;
  br.stderr_upper = up.stderr_c;
  br.c_lower = low.c;
  br.stderr_lower = low.stderr_c;
  if (br.c_lower > br.c_upper) std::swap(br.c_lower, br.c_upper);
  return br;
}

}  // namespace terracelab
