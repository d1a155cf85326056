// Acceptance suite: drives the full experiments end to end and prints one
// PASS/FAIL line per criterion.

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>

#include "terracelab/pipeline.hpp"

using namespace terracelab;

namespace {

void report(int id, const std::string& label, bool pass,
            const std::string& detail) {
  std::printf("ACCEPTANCE %2d (%s): %s  %s\n", id, label.c_str(),
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

struct Run {
  ScenarioConfig cfg;
  Trajectory traj;
  OdeAnalysis ode;
  std::optional<TerracePipelineResult> terrace;
  double sim_seconds = 0.0;
};

const Run& get_run(const std::string& scenario, bool with_terrace) {
  static std::map<std::string, Run> cache;
  auto it = cache.find(scenario);
  if (it == cache.end()) {
    Run r;
    r.cfg = parse_config(scenario_toml(scenario));
    r.ode = analyze_ode(r.cfg);
    const auto t0 = std::chrono::steady_clock::now();
    r.traj = run_base_simulation(r.cfg);
    r.sim_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    it = cache.emplace(scenario, std::move(r)).first;
  }
  if (with_terrace && !it->second.terrace)
    it->second.terrace =
        terrace_pipeline(it->second.cfg, it->second.ode, it->second.traj);
  return it->second;
}

double speed_at_level(const Trajectory& traj, double level, double burn_frac) {
  const auto tracks = track_levels(traj, {level});
  const int burn = static_cast<int>(std::ceil(burn_frac * traj.periods()));
  return estimate_speed(tracks.front(), traj.spec.period(), burn).c;
}

constexpr double kBistableSpeed = 0.35355339059327373;  // (1-2a)/sqrt(2), a=1/4

}  // namespace

TEST_CASE("criterion 1: bistable front speed") {
  const Run& run = get_run("bistable-speed", false);
  const auto tracks = track_levels(run.traj, {0.5});
  const int burn = static_cast<int>(std::ceil(0.3 * run.traj.periods()));
  const SpeedEstimate est = estimate_speed(tracks.front(), 1.0, burn);
  const double rel_err = std::abs(est.c - kBistableSpeed) / kBistableSpeed;
  const bool in_budget = run.sim_seconds <= 120.0;
  const bool pass = rel_err < 0.01 && in_budget;
  char buf[160];
  std::snprintf(buf, sizeof buf, "c=%.6f vs %.6f (rel err %.2e), sim %.1fs",
                est.c, kBistableSpeed, rel_err, run.sim_seconds);
  report(1, "bistable speed", pass, buf);
  CHECK(rel_err < 0.01);
  CHECK(in_budget);
}

TEST_CASE("criterion 2: balanced bistable has a standing front") {
  const Run& run = get_run("balanced-bistable", true);
  const Terrace& terr = run.terrace->terrace;
  REQUIRE(terr.n_waves() == 1);
  const double c = terr.waves[0].c;

  std::vector<StabilityRecord> recs;
  for (const auto& p : terr.platforms) {
    for (size_t i = 0; i < run.ode.ladder.size(); ++i)
      if (std::abs(run.ode.ladder[i].value_at0() - p.value_at0()) < 1e-4)
        recs.push_back(run.ode.records[i]);
  }
  REQUIRE(recs.size() == terr.platforms.size());
  const StructureReport sr = check_terrace_structure(terr, recs);
  const bool zero_clause = sr.clauses.size() == 1 && sr.clauses[0].clause == "c=0";
  const bool pass = std::abs(c) < 5e-3 && zero_clause && sr.all_pass();
  char buf[120];
  std::snprintf(buf, sizeof buf, "|c|=%.2e, clause=%s, structure %s",
                std::abs(c), sr.clauses[0].clause.c_str(),
                sr.all_pass() ? "pass" : "fail");
  report(2, "balanced bistable", pass, buf);
  CHECK(std::abs(c) < 5e-3);
  CHECK(zero_clause);
  CHECK(sr.all_pass());
}

namespace {

// Half-problem oracle for the quintic: independent bistable runs on [0, q]
// and [q, 1] give the individual front speeds.
double half_problem_speed(const NonlinearitySpec& spec, double lo, double hi) {
  Grid g(-80.0, 120.0, 4001);
  Field ic(g, 0.0);
  for (int i = 0; i < g.n_x; ++i)
    ic.values[i] = g.x(i) <= 0.0 ? hi : lo;
  const Trajectory traj =
      simulate(spec, g, ic, BcPolicy::track_reaction, 0.005, 80.0, {});
  const double level = 0.5 * (lo + hi);
  return speed_at_level(traj, level, 0.3);
}

}  // namespace

TEST_CASE("criterion 3: quintic terrace matches the half-problem oracle") {
  const Run& run = get_run("quintic-terrace", true);
  const Terrace& terr = run.terrace->terrace;

  const double c_lower_half = half_problem_speed(run.cfg.spec, 0.0, 0.5);
  const double c_upper_half = half_problem_speed(run.cfg.spec, 0.5, 1.0);
  REQUIRE(c_upper_half < c_lower_half);  // ordered regime by construction

  bool pass = terr.n_waves() == 2;
  std::string detail = "N=" + std::to_string(terr.n_waves());
  if (pass) {
    const double p_expected[3] = {1.0, 0.5, 0.0};
    for (int i = 0; i < 3; ++i)
      pass = pass &&
             std::abs(terr.platforms[i].value_at0() - p_expected[i]) < 1e-4;
    const double e1 = std::abs(terr.waves[0].c - c_upper_half) /
                      std::abs(c_upper_half);
    const double e2 = std::abs(terr.waves[1].c - c_lower_half) /
                      std::abs(c_lower_half);
    pass = pass && e1 < 0.02 && e2 < 0.02;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "platforms {%.5f, %.5f, %.5f}; c1=%.4f (oracle %.4f, "
                  "err %.1f%%), c2=%.4f (oracle %.4f, err %.1f%%)",
                  terr.platforms[0].value_at0(), terr.platforms[1].value_at0(),
                  terr.platforms[2].value_at0(), terr.waves[0].c, c_upper_half,
                  100 * e1, terr.waves[1].c, c_lower_half, 100 * e2);
    detail = buf;
  }
  report(3, "terrace extraction", pass, detail);
  CHECK(pass);
}

TEST_CASE("criterion 4: terrace residual convergence") {
  const Run& run = get_run("quintic-terrace", true);
  const auto& rs = run.terrace->residual_series;
  REQUIRE(!rs.empty());
  const double pass_level = 5e-3;  // * p(0) = 1
  const bool below = rs.back().second < pass_level;
  bool monotone = true;
  const size_t q = rs.size() - rs.size() / 4;
  for (size_t j = std::max<size_t>(q, 1); j < rs.size(); ++j)
    monotone = monotone && rs[j].second <= rs[j - 1].second + 1e-6;
  char buf[120];
  std::snprintf(buf, sizeof buf, "final residual %.2e (< %.0e), tail %s",
                rs.back().second, pass_level,
                monotone ? "non-increasing" : "NOT monotone");
  report(4, "convergence formula", below && monotone, buf);
  CHECK(below);
  CHECK(monotone);
}

TEST_CASE("criterion 5: zero-number monotonicity suite") {
  ScenarioConfig cfg = parse_config(scenario_toml("zero-number-suite"));
  std::ostringstream log;
  const VerifyOutcome out = run_verify_checks(cfg, log);
  const CheckResult* check = nullptr;
  for (const auto& c : out.checks)
    if (c.name == "zero-number-monotone") check = &c;
  REQUIRE(check != nullptr);
  report(5, "zero-number suite", check->outcome == "pass",
         check->detail + ", violations=" + std::to_string((int)check->value));
  CHECK(check->outcome == "pass");
}

TEST_CASE("criterion 6: steepness preservation suite") {
  ScenarioConfig cfg = parse_config(scenario_toml("steepness-suite"));
  std::ostringstream log;
  const VerifyOutcome out = run_verify_checks(cfg, log);
  const CheckResult* check = nullptr;
  for (const auto& c : out.checks)
    if (c.name == "steepness-preservation") check = &c;
  REQUIRE(check != nullptr);
  report(6, "steepness preservation", check->outcome == "pass",
         check->detail + ", violations=" + std::to_string((int)check->value));
  CHECK(check->outcome == "pass");
}

TEST_CASE("criterion 7: exponential rate in the multistable regime") {
  ScenarioConfig cfg = parse_config(scenario_toml("tpp-bistable-h3"));
  std::ostringstream log;
  const VerifyOutcome out = run_verify_checks(cfg, log);
  const CheckResult* rate = nullptr;
  const CheckResult* sandwich = nullptr;
  for (const auto& c : out.checks) {
    if (c.name == "exponential-rate") rate = &c;
    if (c.name == "sandwich-fit") sandwich = &c;
  }
  REQUIRE(rate != nullptr);
  REQUIRE(sandwich != nullptr);
  const bool pass =
      rate->outcome == "pass" && sandwich->outcome == "pass";
  report(7, "exponential rate",
         pass, "nu=" + std::to_string(rate->value) + " " + rate->detail +
                   "; beta0=" + std::to_string(sandwich->value));
  CHECK(rate->outcome == "pass");
  CHECK(sandwich->outcome == "pass");
}

TEST_CASE("criterion 8: super-solution certification") {
  const Run& run = get_run("bistable-speed", true);
  const Terrace& terr = run.terrace->terrace;
  REQUIRE(terr.n_waves() == 1);
  const WaveProfile& wave = terr.waves[0];

  SupersubParams params = supersub_params_from(run.cfg.tol, run.cfg.dt);
  // Scan region: a window around the front over two periods.
  Grid scan(-30.0, 30.0, 1201);
  std::vector<double> times;
  for (int i = 0; i <= 16; ++i) times.push_back(0.1 + i * 0.125);

  const EpsSearch search =
      find_certified_eps(ComparisonKind::fife_mcleod_upper, wave, run.cfg.spec,
                         wave.c + 0.1, 0.0, scan, times, params);
  const bool fm_pass = search.any_certified && search.eps_hat >= 1e-4;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "eps_hat=%.3e (min residual %.2e at tol %.1e)",
                search.eps_hat, search.report.worst_residual,
                search.report.cert_tol);
  report(8, "fife-mcleod certification", fm_pass, buf);
  CHECK(fm_pass);

  // Flattening super-solution for front-like data under the same family.
  const auto spec = NonlinearitySpec::bistable(0.3);
  const auto ladder = find_periodic_solutions(spec, 0.0, 1.2);
  REQUIRE(ladder.size() == 3);
  const auto basin_top =
      attraction_interval(spec, ladder[2], BasinSide::plus, -1.0, 2.0);
  const auto basin_zero =
      attraction_interval(spec, ladder[0], BasinSide::minus, -1.0, 2.0);

  Grid g(-50.0, 50.0, 2001);
  SandwichParams sp;
  sp.shape = SandwichShape::general_h3;
  sp.left_level = 0.9;
  sp.right_level = 0.05;
  sp.bump_amplitude = 0.3;
  sp.seed = 21;
  const Field u0 = sandwich_ic(g, -6.0, 6.0, 1.0, sp);
  const double horizon = 15.0;
  const auto cf = flattening_super(u0, spec, basin_top, basin_zero, horizon);
  std::vector<double> wtimes;
  for (int i = 1; i <= 12; ++i) wtimes.push_back(horizon * i / 14.0);
  const CertificationReport wrep = check_comparison(cf, spec, g, wtimes, params);

  const Trajectory traj =
      simulate(spec, g, u0, BcPolicy::track_reaction, 0.005, horizon, {});
  bool dominated = true;
  for (const auto& f : traj.snapshots)
    for (int i = 0; i < g.n_x; ++i)
      dominated = dominated && f.values[i] <= cf.eval(f.t, g.x(i)) + 1e-8;
  std::snprintf(buf, sizeof buf,
                "LW min %.2e (tol %.1e), pointwise domination %s",
                wrep.worst_residual, wrep.cert_tol,
                dominated ? "holds" : "VIOLATED");
  report(8, "flattening certification", wrep.certified && dominated, buf);
  CHECK(wrep.certified);
  CHECK(dominated);
}

TEST_CASE("criterion 9: stability classification oracle") {
  std::vector<NonlinearitySpec> specs = {
      NonlinearitySpec::kpp(),
      NonlinearitySpec::bistable(0.25),
      NonlinearitySpec::bistable(0.5),
      NonlinearitySpec::bistable(0.75),
      NonlinearitySpec::quintic(1.0, 0.2, 0.5, 0.8),
      NonlinearitySpec::quintic(16.0, 0.12, 0.5, 0.76),
      NonlinearitySpec::combustion(0.3, 1.0),
      NonlinearitySpec::time_periodic(NonlinearitySpec::kpp(), 0.5, 1.0),
      NonlinearitySpec::time_periodic(NonlinearitySpec::bistable(0.3), 0.5, 1.0),
      NonlinearitySpec::custom({{1, 0, 1.0}, {3, 0, -1.0}, {2, 1, 0.2}}, 1.0),
  };
  const double dtol = 1e-4;
  int fixed_points = 0;
  int sign_agreements = 0;
  double worst_floquet_err = 0.0;
  for (const auto& spec : specs) {
    const auto sols = find_periodic_solutions(spec, 0.0, 1.2);
    for (const auto& s : sols) {
      ++fixed_points;
      const auto rec = classify_stability(spec, s, &sols);
      const double phi_prime = poincare_map_derivative(spec, s.value_at0());
      const int mu_sign = rec.mu > dtol ? 1 : rec.mu < -dtol ? -1 : 0;
      const double one_minus = 1.0 - phi_prime;
      const double thr = 0.5 * dtol * spec.period();
      const int phi_sign = one_minus > thr ? 1 : one_minus < -thr ? -1 : 0;
      if (mu_sign == phi_sign) ++sign_agreements;
      worst_floquet_err =
          std::max(worst_floquet_err, std::abs(rec.floquet - phi_prime) /
                                          std::max(std::abs(phi_prime), 1e-12));
    }
  }
  const bool pass =
      sign_agreements == fixed_points && worst_floquet_err <= 1e-6;
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "%d/%d sign agreements, worst floquet rel err %.2e",
                sign_agreements, fixed_points, worst_floquet_err);
  report(9, "stability oracle", pass, buf);
  CHECK(sign_agreements == fixed_points);
  CHECK(worst_floquet_err <= 1e-6);
}

TEST_CASE("criterion 10: spreading bracket consistency") {
  const Run& run = get_run("quintic-terrace", false);
  const SpreadingBracket br = spreading_bracket(run.traj, 0.01);
  bool pass = true;
  std::string detail;
  for (double level : {0.1, 0.25, 0.4, 0.6, 0.75, 0.9}) {
    const auto tracks = track_levels(run.traj, {level});
    const int burn = static_cast<int>(std::ceil(0.3 * run.traj.periods()));
    const SpeedEstimate est = estimate_speed(tracks.front(), 1.0, burn);
    const bool inside =
        est.c >= br.c_lower - 3 * (br.stderr_lower + est.stderr_c) &&
        est.c <= br.c_upper + 3 * (br.stderr_upper + est.stderr_c);
    pass = pass && inside;
    char buf[64];
    std::snprintf(buf, sizeof buf, "c(%.2f)=%.4f ", level, est.c);
    detail += buf;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "bracket [%.4f, %.4f]; %s", br.c_lower,
                br.c_upper, detail.c_str());
  report(10, "spreading bracket", pass, buf);
  CHECK(pass);
}

TEST_CASE("criterion 11: kpp negative control") {
  ScenarioConfig cfg = parse_config(scenario_toml("kpp-negative-control"));
  std::ostringstream log;
  const VerifyOutcome out = run_verify_checks(cfg, log);
  int unmet = 0;
  bool spurious_pass = false;
  for (const auto& c : out.checks) {
    if (c.name == "exponential-rate" || c.name == "sandwich-fit") {
      if (c.outcome == "hypotheses-unmet") ++unmet;
      if (c.outcome == "pass") spurious_pass = true;
    }
  }
  const bool pass = unmet == 2 && !spurious_pass && !out.any_failed();
  report(11, "kpp negative control", pass,
         std::to_string(unmet) + " checks reported hypotheses-unmet");
  CHECK(unmet == 2);
  CHECK(!spurious_pass);
}
