#include "terracelab/ode_periodic.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace terracelab {

using json = nlohmann::json;

double PeriodicSolution::value(double tau) const {
  tau = std::fmod(tau, period_T);
  if (tau < 0) tau += period_T;
  const double pos = tau / period_T * (t.size() - 1);
  const size_t i = std::min(static_cast<size_t>(pos), t.size() - 2);
  const double w = pos - i;
  return q[i] * (1.0 - w) + q[i + 1] * w;
}

std::string PeriodicSolution::to_json() const {
  json j;
  j["period_T"] = period_T;
  j["t"] = t;
  j["q"] = q;
  j["kind"] = kind == SolutionKind::point ? "point" : "interval-of-equilibria";
  if (kind == SolutionKind::interval_of_equilibria)
    j["band"] = {band_lo, band_hi};
  return j.dump();
}

std::string PeriodicSolution::to_csv() const {
  std::ostringstream out;
  out << "t,q\n";
  char buf[64];
  for (size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t[i], q[i]);
    out << buf;
  }
  return out.str();
}

namespace {

OdeOptions ode_opts(const OdePeriodicParams& p) {
  OdeOptions o;
  o.abs_tol = p.ode_tol;
  o.rel_tol = p.ode_tol;
  return o;
}

}  // namespace

double poincare_map(const NonlinearitySpec& spec, double h0,
                    const OdePeriodicParams& params) {
  require_finite(h0, "poincare_map initial value");
  return ode_solve_scalar(
      [&](double t, double h) { return spec.eval(t, h); }, 0.0, spec.period(),
      h0, ode_opts(params));
}

double poincare_map_derivative(const NonlinearitySpec& spec, double h0,
                               double delta, const OdePeriodicParams& params) {
  OdePeriodicParams tight = params;
  tight.ode_tol = std::min(params.ode_tol, 1e-12);
  return (poincare_map(spec, h0 + delta, tight) -
          poincare_map(spec, h0 - delta, tight)) /
         (2.0 * delta);
}

PeriodicSolution sample_periodic_solution(const NonlinearitySpec& spec,
                                          double q0,
                                          const OdePeriodicParams& params) {
  PeriodicSolution sol;
  sol.period_T = spec.period();
  const int n = params.n_t;
  sol.t.resize(n + 1);
  sol.q.resize(n + 1);
  double h = q0;
  sol.t[0] = 0.0;
  sol.q[0] = q0;
  const OdeOptions opts = ode_opts(params);
  for (int i = 1; i <= n; ++i) {
    const double t0 = sol.period_T * (i - 1) / n;
    const double t1 = sol.period_T * i / n;
    h = ode_solve_scalar([&](double t, double y) { return spec.eval(t, y); },
                         t0, t1, h, opts);
    sol.t[i] = t1;
    sol.q[i] = h;
  }
  return sol;
}

std::vector<PeriodicSolution> find_periodic_solutions(
    const NonlinearitySpec& spec, double lo, double hi, int n_seed,
    const OdePeriodicParams& params) {
  require(lo < hi, "find_periodic_solutions: empty interval");
  require(n_seed >= 8, "find_periodic_solutions: n_seed must be >= 8");

  auto g = [&](double h) { return poincare_map(spec, h, params) - h; };

  std::vector<double> seeds(n_seed);
  std::vector<double> gs(n_seed);
  for (int i = 0; i < n_seed; ++i) {
    seeds[i] = lo + (hi - lo) * i / (n_seed - 1.0);
    gs[i] = g(seeds[i]);
  }

  const double fp = params.fp_tol;
  auto bisect_root = [&](double a, double b, double ga) {
    for (int it = 0; it < 200 && b - a > fp; ++it) {
      const double m = 0.5 * (a + b);
      const double gm = g(m);
      if (std::abs(gm) < fp) return m;
      if ((ga < 0) != (gm < 0)) {
        b = m;
      } else {
        a = m;
        ga = gm;
      }
    }
    return 0.5 * (a + b);
  };

  std::vector<double> roots;
  std::vector<std::pair<double, double>> plateaus;

  // Plateau sweep: runs of >= 3 consecutive seeds with |g| < fp_tol.
  int run_start = -1;
  auto close_run = [&](int run_end) {
    const int len = run_end - run_start;
    if (run_start < 0 || len < 3) return;
    // Refine endpoints by bisection on the predicate |g| < fp_tol.
    double plo = seeds[run_start];
    if (run_start > 0) {
      double a = seeds[run_start - 1], b = seeds[run_start];
      for (int it = 0; it < 80 && b - a > fp; ++it) {
        const double m = 0.5 * (a + b);
        (std::abs(g(m)) < fp ? b : a) = m;
      }
      plo = b;
    }
    double phi = seeds[run_end - 1];
    if (run_end < n_seed) {
      double a = seeds[run_end - 1], b = seeds[run_end];
      for (int it = 0; it < 80 && b - a > fp; ++it) {
        const double m = 0.5 * (a + b);
        (std::abs(g(m)) < fp ? a : b) = m;
      }
      phi = a;
    }
    plateaus.emplace_back(plo, phi);
  };
  for (int i = 0; i < n_seed; ++i) {
    if (std::abs(gs[i]) < fp) {
      if (run_start < 0) run_start = i;
    } else {
      close_run(i);
      run_start = -1;
    }
  }
  close_run(n_seed);

  auto in_plateau = [&](double v) {
    for (const auto& [a, b] : plateaus)
      if (v >= a - params.merge_tol && v <= b + params.merge_tol) return true;
    return false;
  };

  // Isolated roots: seeds that sit on a root, plus sign brackets.
  for (int i = 0; i < n_seed; ++i) {
    if (std::abs(gs[i]) < fp && !in_plateau(seeds[i])) roots.push_back(seeds[i]);
  }
  for (int i = 0; i + 1 < n_seed; ++i) {
    if (std::abs(gs[i]) < fp || std::abs(gs[i + 1]) < fp) continue;
    if ((gs[i] < 0) != (gs[i + 1] < 0)) {
      const double r = bisect_root(seeds[i], seeds[i + 1], gs[i]);
      if (!in_plateau(r)) roots.push_back(r);
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> merged;
  for (double r : roots) {
    if (merged.empty() || r - merged.back() > params.merge_tol)
      merged.push_back(r);
  }

  std::vector<PeriodicSolution> out;
  for (const auto& [plo, phi] : plateaus) {
    PeriodicSolution sol = sample_periodic_solution(spec, plo, params);
    sol.kind = SolutionKind::interval_of_equilibria;
    sol.band_lo = plo;
    sol.band_hi = phi;
    out.push_back(std::move(sol));
  }
  for (double r : merged) out.push_back(sample_periodic_solution(spec, r, params));
  std::sort(out.begin(), out.end(),
            [](const PeriodicSolution& a, const PeriodicSolution& b) {
              return a.value_at0() < b.value_at0();
            });
  return out;
}

namespace {

// Probe from h0 over n periods; returns the final distance to the solution.
double probe_distance(const NonlinearitySpec& spec, const PeriodicSolution& q,
                      double h0, int periods, const OdePeriodicParams& params) {
  double h = h0;
  const OdeOptions opts = ode_opts(params);
  const double T = spec.period();
  for (int k = 0; k < periods; ++k) {
    try {
      h = ode_solve_scalar([&](double t, double y) { return spec.eval(t, y); },
                           0.0, T, h, opts);
    } catch (const OdeDivergence&) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return std::abs(h - q.value_at0());
}

Tristate probe_side(const NonlinearitySpec& spec, const PeriodicSolution& q,
                    double delta, const OdePeriodicParams& params) {
  const double d0 = std::abs(delta);
  const double dist =
      probe_distance(spec, q, q.value_at0() + delta, params.n_probe, params);
  if (dist <= 0.5 * d0) return Tristate::yes;
  if (dist >= 2.0 * d0) return Tristate::no;
  return Tristate::undetermined;
}

}  // namespace

StabilityRecord classify_stability(const NonlinearitySpec& spec,
                                   const PeriodicSolution& q,
                                   const std::vector<PeriodicSolution>* neighbors,
                                   const OdePeriodicParams& params) {
  StabilityRecord rec;

  // mu via an augmented integration: dI/dt = df/du(t, q(t)).
  DormandPrince<2> solver(
      [&](double t, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        dy[0] = spec.eval(t, y[0]);
        dy[1] = spec.eval_du(t, y[0]);
      },
      ode_opts(params));
  const auto end = solver.solve(0.0, spec.period(), {q.value_at0(), 0.0});
  rec.mu = -end[1] / spec.period();
  rec.floquet = std::exp(end[1]);

  // One-sided probe distances, shrunk if a neighbor sits within 2*delta.
  double dplus = params.delta_probe;
  double dminus = params.delta_probe;
  if (neighbors) {
    for (const auto& n : *neighbors) {
      const double gap = n.value_at0() - q.value_at0();
      if (gap > params.merge_tol) dplus = std::min(dplus, gap / 4.0);
      if (gap < -params.merge_tol) dminus = std::min(dminus, -gap / 4.0);
    }
  }
  rec.stable_above = probe_side(spec, q, dplus, params);
  rec.stable_below = probe_side(spec, q, -dminus, params);

  // Fall back on the linearization when probes are inconclusive but mu is
  // decisively signed.
  if (std::abs(rec.mu) >= params.degenerate_tol) {
    const Tristate lin = rec.mu > 0 ? Tristate::yes : Tristate::no;
    if (rec.stable_above == Tristate::undetermined) rec.stable_above = lin;
    if (rec.stable_below == Tristate::undetermined) rec.stable_below = lin;
    if (rec.mu > 0) {
      rec.stable_above = Tristate::yes;
      rec.stable_below = Tristate::yes;
    }
  }

  if (neighbors) {
    bool above = true, below = true;
    const bool in_band = q.kind == SolutionKind::interval_of_equilibria;
    for (const auto& n : *neighbors) {
      const double gap = n.value_at0() - q.value_at0();
      if (gap > params.merge_tol && gap < 10 * params.merge_tol) above = false;
      if (gap < -params.merge_tol && gap > -10 * params.merge_tol) below = false;
    }
    rec.isolated_above =
        (in_band && q.band_hi > q.value_at0() + params.merge_tol)
            ? Tristate::no
            : (above ? Tristate::yes : Tristate::no);
    rec.isolated_below =
        (in_band && q.band_lo < q.value_at0() - params.merge_tol)
            ? Tristate::no
            : (below ? Tristate::yes : Tristate::no);
  }
  return rec;
}

AttractionInterval attraction_interval(const NonlinearitySpec& spec,
                                       const PeriodicSolution& q,
                                       BasinSide side, double window_lo,
                                       double window_hi,
                                       const OdePeriodicParams& params) {
  (void)side;  // bookkeeping only: the basin search is symmetric
  StabilityRecord rec = classify_stability(spec, q, nullptr, params);
  if (!(rec.mu > 0))
    throw std::invalid_argument(
        "attraction_interval requires a linearly stable solution (mu > 0)");

  auto converges = [&](double h0) {
    return probe_distance(spec, q, h0, params.n_basin, params) <
           params.basin_tol;
  };

  const double q0 = q.value_at0();
  AttractionInterval out;

  // Upper endpoint.
  if (converges(window_hi)) {
    out.hi = window_hi;
    out.hi_is_window_edge = true;
  } else {
    double a = q0, b = window_hi;
    for (int it = 0; it < 60 && b - a > params.fp_tol; ++it) {
      const double m = 0.5 * (a + b);
      (converges(m) ? a : b) = m;
    }
    out.hi = a;
  }
  // Lower endpoint.
  if (converges(window_lo)) {
    out.lo = window_lo;
    out.lo_is_window_edge = true;
  } else {
    double a = window_lo, b = q0;
    for (int it = 0; it < 60 && b - a > params.fp_tol; ++it) {
      const double m = 0.5 * (a + b);
      (converges(m) ? b : a) = m;
    }
    out.lo = b;
  }
  return out;
}

}  // namespace terracelab
