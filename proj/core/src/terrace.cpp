#include "terracelab/terrace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace terracelab {

void WaveProfile::build_splines() const {
  // Rebuild when the profile origin moved (anchoring, shifted candidates).
  if (!splines_.empty() && built_xi0_ == xi0) return;
  splines_.clear();
  splines_.reserve(rows.size());
  for (const auto& row : rows) splines_.emplace_back(xi0, dxi, row);
  built_xi0_ = xi0;
}

double WaveProfile::eval_profile(double tau, double xi) const {
  build_splines();
  const double xi_lo = xi0;
  const double xi_hi = xi0 + dxi * (n_xi - 1);
  auto platform_tail = [&](double t_abs) {
    if (xi > xi_hi) return lower.q.empty() ? rows[0].back() : lower.value(t_abs);
    return upper.q.empty() ? rows[0].front() : upper.value(t_abs);
  };
  if (autonomous || rows.size() == 1) {
    if (xi < xi_lo || xi > xi_hi) return platform_tail(tau);
    return splines_[0](xi);
  }
  double t = std::fmod(tau, period_T);
  if (t < 0) t += period_T;
  if (xi < xi_lo || xi > xi_hi) return platform_tail(t);
  const int R = static_cast<int>(rows.size());
  const double dtau = period_T / R;
  const double pos = t / dtau;
  const int r = std::min(static_cast<int>(pos), R - 1);
  const double w = pos - r;
  auto at = [&](int k) { return splines_[((r + k) % R + R) % R](xi); };
  const double v0 = at(-1), v1 = at(0), v2 = at(1), v3 = at(2);
  // Catmull-Rom in tau (periodic).
  return 0.5 * (2.0 * v1 + (-v0 + v2) * w +
                (2.0 * v0 - 5.0 * v1 + 4.0 * v2 - v3) * w * w +
                (-v0 + 3.0 * v1 - 3.0 * v2 + v3) * w * w * w);
}

Field WaveProfile::row_as_field(int r) const {
  Grid g(xi0, xi0 + dxi * (n_xi - 1), n_xi);
  Field f(g, taus.at(r));
  f.values = rows.at(r);
  return f;
}

RegionPartition::RegionPartition(const std::vector<double>& speeds,
                                 double varrho_)
    : varrho(varrho_) {
  require(!speeds.empty(), "RegionPartition needs at least one speed");
  for (size_t i = 0; i + 1 < speeds.size(); ++i)
    require(speeds[i] < speeds[i + 1],
            "RegionPartition requires strictly increasing speeds");
  cbar.push_back(speeds.front() - 1.0);
  for (size_t i = 0; i + 1 < speeds.size(); ++i)
    cbar.push_back(0.5 * (speeds[i] + speeds[i + 1]));
  cbar.push_back(speeds.back() + 1.0);
  double cap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < speeds.size(); ++i)
    cap = std::min({cap, speeds[i] - cbar[i], cbar[i + 1] - speeds[i]});
  require(varrho > 0 && varrho <= 0.25 * cap,
          "RegionPartition margin must satisfy 0 < varrho <= min gap / 4");
}

WaveProfile build_wave_profile(const Trajectory& traj, double alpha, double c,
                               double stderr_c, double window) {
  WaveProfile wp;
  wp.c = c;
  wp.stderr_c = stderr_c;
  wp.period_T = traj.spec.period();
  wp.autonomous = traj.spec.autonomous();

  const int K = traj.periods() - 1;
  require(K >= 1, "build_wave_profile: need at least one full period");
  const Field& ref = traj.at_period(K);
  const double a_ref = refined_crossing(ref, alpha);
  const double t_ref = ref.t;

  const double dx = ref.grid.dx();
  wp.dxi = dx;
  wp.n_xi = 2 * static_cast<int>(std::round(window / dx)) + 1;
  wp.xi0 = -window;

  auto make_row = [&](const Field& f) {
    // Utilde(tau, xi) = u(t_ref - T + tau, xi + a_ref + c*(tau - T)).
    // Spline sampling keeps the off-grid frame shift at O(dx^4) accuracy.
    const double tau = f.t - (t_ref - wp.period_T);
    std::vector<double> row(wp.n_xi);
    const double frame = a_ref + c * (tau - wp.period_T);
    const UniformSpline sp(f.grid.xmin, f.grid.dx(), f.values);
    for (int j = 0; j < wp.n_xi; ++j)
      row[j] = sp(wp.xi0 + j * dx + frame);
    return row;
  };

  if (wp.autonomous) {
    wp.taus = {0.0};
    wp.rows.push_back(make_row(ref));
    return wp;
  }

  // All snapshots in the last stored period, [t_ref - T, t_ref).  The rows
  // must tile the period uniformly for the periodic tau interpolation; fall
  // back to the single reference row otherwise.
  std::vector<const Field*> in_period;
  for (const Field& f : traj.snapshots)
    if (f.t >= t_ref - wp.period_T - 1e-12 && f.t < t_ref - 1e-12)
      in_period.push_back(&f);
  bool uniform = !in_period.empty();
  if (in_period.size() > 1) {
    const double d0 = in_period[1]->t - in_period[0]->t;
    for (size_t i = 1; i + 1 < in_period.size(); ++i)
      if (std::abs((in_period[i + 1]->t - in_period[i]->t) - d0) > 1e-9)
        uniform = false;
    if (std::abs(in_period.size() * d0 - wp.period_T) > 1e-9) uniform = false;
  }
  if (!uniform) {
    wp.taus = {0.0};
    std::vector<double> row(wp.n_xi);
    const UniformSpline sp(ref.grid.xmin, ref.grid.dx(), ref.values);
    for (int j = 0; j < wp.n_xi; ++j)
      row[j] = sp(wp.xi0 + j * dx + a_ref);
    wp.rows.push_back(std::move(row));
    return wp;
  }
  for (const Field* f : in_period) {
    wp.taus.push_back(f->t - (t_ref - wp.period_T));
    wp.rows.push_back(make_row(*f));
  }
  return wp;
}

namespace {

double ladder_value(const PeriodicSolution& s) {
  // Representative value used for midpoint levels: the top of a plateau band.
  return s.kind == SolutionKind::interval_of_equilibria ? s.band_hi
                                                        : s.value_at0();
}

int snap_to_ladder(const std::vector<PeriodicSolution>& ladder, double v,
                   double tol) {
  int best = -1;
  double best_d = tol;
  for (size_t i = 0; i < ladder.size(); ++i) {
    double d;
    if (ladder[i].kind == SolutionKind::interval_of_equilibria) {
      d = v < ladder[i].band_lo   ? ladder[i].band_lo - v
          : v > ladder[i].band_hi ? v - ladder[i].band_hi
                                  : 0.0;
    } else {
      d = std::abs(v - ladder[i].value_at0());
    }
    if (d <= best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

// Re-anchors the profile so that Utilde(0, 0) equals `level` (bisection on
// the tau=0 spline, which is monotone through the front).
void anchor_profile(WaveProfile& wp, double level) {
  const Field row0 = wp.row_as_field(0);
  double lo = row0.grid.xmin, hi = row0.grid.xmax;
  // Bracket using grid values first.
  double xl = lo, xr = hi;
  for (int j = 0; j + 1 < wp.n_xi; ++j) {
    if (row0.values[j] >= level && row0.values[j + 1] < level) {
      xl = row0.grid.x(j);
      xr = row0.grid.x(j + 1);
    }
  }
  UniformSpline sp(wp.xi0, wp.dxi, wp.rows[0]);
  for (int it = 0; it < 100 && xr - xl > 1e-13; ++it) {
    const double m = 0.5 * (xl + xr);
    (sp(m) >= level ? xl : xr) = m;
  }
  const double xi_star = 0.5 * (xl + xr);
  wp.xi0 -= xi_star;
  wp.anchor_level = level;
}

}  // namespace

Terrace extract_terrace(const Trajectory& traj,
                        const std::vector<PeriodicSolution>& ladder,
                        const TerraceParams& params) {
  require(ladder.size() >= 2, "extract_terrace: ladder needs >= 2 solutions");
  Terrace terrace;
  auto log = [&](const std::string& line) { terrace.log.push_back(line); };

  const double p0 = ladder.back().value_at0();
  const double snap_tol = params.tail_tol_rel * std::max(p0, 1e-300);
  const int burn =
      static_cast<int>(std::ceil(params.fa.burn_in_frac * traj.periods()));

  int top = static_cast<int>(ladder.size()) - 1;
  terrace.platforms.push_back(ladder[top]);
  int budget = params.run_budget;

  // Descend until the reached platform is the zero state; for a plateau of
  // equilibria that is its lower edge, while midpoint levels are measured
  // from the upper edge.
  while (ladder[top].value_at0() > snap_tol) {
    require(top >= 1, "extract_terrace: ladder has no entry below the top");
    const double top_val = ladder[top].value_at0();
    const double below_val = ladder_value(ladder[top - 1]);
    double alpha = 0.5 * (below_val + top_val);

    int accepted_lower = -1;
    WaveProfile wave;
    while (true) {
      if (budget-- <= 0)
        throw PartialTerraceError("extract_terrace: run budget exhausted",
                                  std::move(terrace));
      const LimitProfile lp = limit_profile(traj, alpha, params.window, params.fa);
      std::ostringstream line;
      line << "alpha=" << alpha << " defect=" << lp.convergence_defect
           << " variation=" << lp.variation << " verdict="
           << (lp.verdict == ProfileVerdict::wave        ? "wave"
               : lp.verdict == ProfileVerdict::platform ? "platform"
                                                        : "undecided");
      log(line.str());
      if (lp.verdict == ProfileVerdict::wave) {
        // Identify the platform pair from the profile tails.
        const double tail_hi = lp.profile.values.front();
        const double tail_lo = lp.profile.values.back();
        const int i_hi = snap_to_ladder(ladder, tail_hi, 10 * snap_tol);
        const int i_lo = snap_to_ladder(ladder, tail_lo, 10 * snap_tol);
        if (i_hi == top && i_lo >= 0 && i_lo < top) {
          LevelTrack track = track_levels(traj, {alpha}, params.fa).front();
          const SpeedEstimate est = estimate_speed(track, traj.spec.period(), burn);
          wave = build_wave_profile(traj, alpha, est.c, est.stderr_c,
                                    params.window);
          accepted_lower = i_lo;
          break;
        }
        log("  wave tails did not match the expected platform pair, bisecting");
      }
      // Platform or unresolved: bisect the level downward and retry.
      alpha = 0.5 * (below_val + alpha);
      if (alpha - below_val < 1e-6 * std::max(p0, 1.0))
        throw PartialTerraceError(
            "extract_terrace: level descent collapsed onto a platform",
            std::move(terrace));
    }

    wave.upper = ladder[top];
    wave.lower = ladder[accepted_lower];
    anchor_profile(wave, 0.5 * (wave.upper.value_at0() + wave.lower.value_at0()));
    terrace.waves.push_back(std::move(wave));
    terrace.platforms.push_back(ladder[accepted_lower]);
    top = accepted_lower;
  }

  // Waves were found top-down; report them bottom-up would scramble the
  // platform list, so keep top-down: waves[i] connects platforms[i+1] to [i].
  // Speed ordering: c_1 <= c_2 <= ... within 3 joint standard errors.
  for (int i = 0; i + 1 < terrace.n_waves(); ++i) {
    const auto& w1 = terrace.waves[i];
    const auto& w2 = terrace.waves[i + 1];
    if (w1.c > w2.c + 3.0 * (w1.stderr_c + w2.stderr_c))
      throw SpeedOrderingError(
          "extract_terrace: extracted speeds violate ordering (c_" +
          std::to_string(i + 1) + "=" + std::to_string(w1.c) + " > c_" +
          std::to_string(i + 2) + "=" + std::to_string(w2.c) + ")");
  }
  return terrace;
}

std::vector<ShiftTrack> fit_shift_functions(const Trajectory& traj,
                                            const Terrace& terrace,
                                            const TerraceParams& params) {
  std::vector<ShiftTrack> out;
  const double T = traj.spec.period();
  for (int i = 0; i < terrace.n_waves(); ++i) {
    const WaveProfile& w = terrace.waves[i];
    ShiftTrack st;
    st.wave_index = i;
    for (int k = 0; k < traj.periods(); ++k) {
      const Field& f = traj.at_period(k);
      if (!(w.anchor_level > f.min() && w.anchor_level < f.max())) {
        if (!st.t.empty()) st.truncated = true;
        continue;
      }
      const double a_k = refined_crossing(f, w.anchor_level);
      st.t.push_back(f.t);
      st.eta.push_back(a_k - w.c * f.t);
    }
    // Tail total variation over the last quarter of the series.
    const size_t n = st.eta.size();
    if (n >= 8) {
      const size_t start = n - n / 4;
      double tv = 0.0;
      for (size_t j = start + 1; j < n; ++j)
        tv += std::abs(st.eta[j] - st.eta[j - 1]);
      if (tv < params.shift_conv_tol_rel * T * (n - start)) {
        double mean = 0.0;
        for (size_t j = start; j < n; ++j) mean += st.eta[j];
        st.eta_bar = mean / (n - start);
      }
    }
    out.push_back(std::move(st));
  }
  return out;
}

double terrace_residual(const Field& field, const Terrace& terrace,
                        const std::vector<double>& shifts,
                        const TerraceParams& params) {
  require(static_cast<int>(shifts.size()) == terrace.n_waves(),
          "terrace_residual: one shift per wave required");
  require(terrace.n_waves() >= 1, "terrace_residual: empty terrace");
  const double t = field.t;
  double worst = 0.0;
  const double margin = params.boundary_margin;
  for (int j = 0; j < field.grid.n_x; ++j) {
    const double x = field.grid.x(j);
    if (x < field.grid.xmin + margin || x > field.grid.xmax - margin) continue;
    double ansatz = 0.0;
    for (int i = 0; i < terrace.n_waves(); ++i)
      ansatz += terrace.waves[i].eval(t, x - shifts[i]);
    for (int i = 1; i <= terrace.n_waves(); ++i)
      ansatz -= terrace.platforms[i].value(t);
    worst = std::max(worst, std::abs(field.values[j] - ansatz));
  }
  return worst;
}

RateFit exponential_rate(const std::vector<std::pair<double, double>>& series,
                         double burn_in_frac) {
  RateFit fit;
  std::vector<double> t, logr;
  const double t_end = series.empty() ? 0.0 : series.back().first;
  const double t_burn = burn_in_frac * t_end;
  for (const auto& [ti, ri] : series) {
    if (ti < t_burn) continue;
    if (!(ri > 0))
      throw std::invalid_argument("exponential_rate: residuals must be positive");
    t.push_back(ti);
    logr.push_back(std::log(ri));
  }
  require(t.size() >= 6, "exponential_rate: too few points past burn-in");

  auto slope_r2 = [](const std::vector<double>& x, const std::vector<double>& y,
                     size_t hi, double* r2) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < hi; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= hi;
    my /= hi;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < hi; ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
      syy += (y[i] - my) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    if (r2) *r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return slope;
  };

  // Fit the full window, then retry with the scheme noise floor cut away
  // (everything below 3x the series minimum); keep the truncation when it
  // clearly improves the fit.
  double r2_full = 0.0;
  const double slope_full = slope_r2(t, logr, t.size(), &r2_full);
  const double log_floor =
      *std::min_element(logr.begin(), logr.end()) + std::log(3.0);
  size_t hi = t.size();
  while (hi > 0 && logr[hi - 1] < log_floor) --hi;
  double slope = slope_full;
  fit.r2 = r2_full;
  if (hi >= 6 && hi < t.size()) {
    double r2_cut = 0.0;
    const double slope_cut = slope_r2(t, logr, hi, &r2_cut);
    if (r2_cut > r2_full + 0.01) {
      slope = slope_cut;
      fit.r2 = r2_cut;
      fit.floored = true;
    }
  }
  if (!fit.floored) hi = t.size();
  fit.nu = -slope;
  fit.points_used = static_cast<int>(hi);
  fit.window_t0 = t.front();
  fit.window_t1 = t[hi - 1];
  fit.non_exponential = fit.r2 < 0.9 || fit.nu <= 0;
  return fit;
}

StructureReport check_terrace_structure(
    const Terrace& terrace, const std::vector<StabilityRecord>& platform_records,
    bool check_multistable, const TerraceParams& params) {
  require(platform_records.size() == terrace.platforms.size(),
          "check_terrace_structure: one stability record per platform");
  StructureReport rep;
  for (int i = 0; i < terrace.n_waves(); ++i) {
    const double c = terrace.waves[i].c;
    const StabilityRecord& up = platform_records[i];        // p_{i-1}
    const StabilityRecord& low = platform_records[i + 1];   // p_i
    StructureClause cl;
    cl.wave_index = i;
    if (c > params.speed_zero_tol) {
      cl.clause = "c>0";
      cl.pass = is_yes(up.stable_below) && is_yes(up.isolated_below);
      cl.detail = "upper platform stable_below=" +
                  std::string(to_string(up.stable_below)) +
                  " isolated_below=" + to_string(up.isolated_below);
    } else if (c < -params.speed_zero_tol) {
      cl.clause = "c<0";
      cl.pass = is_yes(low.stable_above) && is_yes(low.isolated_above);
      cl.detail = "lower platform stable_above=" +
                  std::string(to_string(low.stable_above)) +
                  " isolated_above=" + to_string(low.isolated_above);
    } else {
      cl.clause = "c=0";
      cl.pass = is_yes(up.stable_below) && is_yes(low.stable_above);
      cl.detail = "upper stable_below=" +
                  std::string(to_string(up.stable_below)) +
                  ", lower stable_above=" + to_string(low.stable_above);
    }
    rep.clauses.push_back(std::move(cl));
  }
  if (check_multistable) {
    rep.multistable_checked = true;
    rep.multistable_pass = platform_records.front().linearly_stable() &&
                           platform_records.back().linearly_stable();
  }
  return rep;
}

MinimalityReport check_minimality(
    const Terrace& terrace,
    const std::vector<std::pair<int, WaveProfile>>& candidates, double tol) {
  MinimalityReport rep;
  for (size_t ci = 0; ci < candidates.size(); ++ci) {
    const auto& [wi, cand] = candidates[ci];
    const WaveProfile& wave = terrace.waves.at(wi);
    const int rows = static_cast<int>(wave.rows.size());
    for (int r = 0; r < rows; ++r) {
      MinimalityEntry e;
      e.wave_index = wi;
      e.candidate_index = static_cast<int>(ci);
      e.row = r;
      // Compare at matching in-period times (candidate row 0 when the
      // candidate stores fewer rows).
      const int cr = r < static_cast<int>(cand.rows.size()) ? r : 0;
      e.verdict = is_steeper(wave.row_as_field(r), cand.row_as_field(cr), tol);
      e.pass = e.verdict == Steepness::steeper || e.verdict == Steepness::mutually;
      rep.all_pass = rep.all_pass && e.pass;
      rep.entries.push_back(e);
    }
  }
  return rep;
}

}  // namespace terracelab
