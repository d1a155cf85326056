#include <doctest.h>

#include <cmath>

#include "terracelab/pipeline.hpp"
#include "terracelab/terrace.hpp"

using namespace terracelab;

namespace {

// Exact cubic-bistable wave for a = 0.25: U(xi) = 1/(1+exp(xi/sqrt(2))),
// c = (1-2a)/sqrt(2).
double exact_wave(double xi) { return 1.0 / (1.0 + std::exp(xi / std::sqrt(2.0))); }
constexpr double kExactSpeed = 0.25 * std::numbers::sqrt2;

PeriodicSolution constant_solution(double v, double T = 1.0) {
  PeriodicSolution p;
  p.period_T = T;
  const int n = 16;
  for (int i = 0; i <= n; ++i) {
    p.t.push_back(T * i / n);
    p.q.push_back(v);
  }
  return p;
}

WaveProfile synthetic_wave(double window = 40.0, double dx = 0.05) {
  WaveProfile w;
  w.c = kExactSpeed;
  w.period_T = 1.0;
  w.autonomous = true;
  w.anchor_level = 0.5;
  w.dxi = dx;
  w.n_xi = 2 * static_cast<int>(window / dx) + 1;
  w.xi0 = -window;
  w.taus = {0.0};
  std::vector<double> row(w.n_xi);
  for (int j = 0; j < w.n_xi; ++j) row[j] = exact_wave(w.xi0 + j * dx);
  w.rows.push_back(std::move(row));
  w.upper = constant_solution(1.0);
  w.lower = constant_solution(0.0);
  return w;
}

// Trajectory that translates the exact wave rigidly.
Trajectory synthetic_trajectory(int periods, double shift0 = 3.0) {
  Grid g(-60.0, 100.0, 3201);
  Trajectory traj;
  traj.spec = NonlinearitySpec::bistable(0.25);
  traj.dt = 0.01;
  for (int k = 0; k <= periods; ++k) {
    Field f(g, static_cast<double>(k));
    for (int i = 0; i < g.n_x; ++i)
      f.values[i] = exact_wave(g.x(i) - kExactSpeed * k - shift0);
    traj.period_snapshot_indices.push_back(static_cast<int>(traj.snapshots.size()));
    traj.snapshots.push_back(std::move(f));
  }
  return traj;
}

}  // namespace

TEST_CASE("wave profile evaluation with platform tails") {
  const WaveProfile w = synthetic_wave();
  CHECK(w.eval_profile(0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(w.eval_profile(0.3, -60.0) == doctest::Approx(1.0));
  CHECK(w.eval_profile(0.3, 60.0) == doctest::Approx(0.0));
  // U(t,x) = Utilde(x - c t): advancing t shifts the profile right.
  const double t = 2.0;
  CHECK(w.eval(t, kExactSpeed * t) == doctest::Approx(0.5).epsilon(1e-9));
  // Spline evaluation between grid nodes stays close to the analytic wave.
  for (double xi : {-7.013, -1.234, 0.618, 3.141, 11.0e0})
    CHECK(w.eval_profile(0.0, xi) ==
          doctest::Approx(exact_wave(xi)).epsilon(1e-6));
}

TEST_CASE("shift tracks of a rigidly translated wave are constant") {
  const Trajectory traj = synthetic_trajectory(40);
  Terrace terr;
  terr.platforms = {constant_solution(1.0), constant_solution(0.0)};
  terr.waves = {synthetic_wave()};

  const auto tracks = fit_shift_functions(traj, terr);
  REQUIRE(tracks.size() == 1);
  REQUIRE(tracks[0].eta.size() >= 30);
  for (double e : tracks[0].eta)
    CHECK(e == doctest::Approx(3.0).epsilon(1e-3));
  REQUIRE(tracks[0].eta_bar.has_value());
  CHECK(*tracks[0].eta_bar == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("terrace residual of the exact ansatz is interpolation-small") {
  const Trajectory traj = synthetic_trajectory(20);
  Terrace terr;
  terr.platforms = {constant_solution(1.0), constant_solution(0.0)};
  terr.waves = {synthetic_wave(50.0)};
  const Field& f = traj.final_field();
  const double r = terrace_residual(f, terr, {3.0});
  CHECK(r < 1e-6);
  // A wrong shift leaves an O(1) mismatch.
  const double r_bad = terrace_residual(f, terr, {8.0});
  CHECK(r_bad > 0.1);
}

TEST_CASE("exponential_rate") {
  SUBCASE("exact exponential") {
    std::vector<std::pair<double, double>> series;
    for (int i = 0; i <= 100; ++i) {
      const double t = 0.5 * i;
      series.emplace_back(t, 3.0 * std::exp(-0.5 * t));
    }
    const RateFit fit = exponential_rate(series);
    CHECK(fit.nu == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(!fit.non_exponential);
    CHECK(!fit.floored);
  }
  SUBCASE("noise floor is detected and truncated") {
    std::vector<std::pair<double, double>> series;
    for (int i = 0; i <= 200; ++i) {
      const double t = 0.5 * i;
      series.emplace_back(t, 3.0 * std::exp(-0.4 * t) + 1e-6);
    }
    const RateFit fit = exponential_rate(series, 0.0);
    CHECK(fit.floored);
    CHECK(fit.nu == doctest::Approx(0.4).epsilon(0.1));
  }
  SUBCASE("non-decaying series is flagged") {
    std::vector<std::pair<double, double>> series;
    for (int i = 0; i <= 50; ++i) series.emplace_back(i, 1.0 + 0.01 * (i % 3));
    const RateFit fit = exponential_rate(series);
    CHECK(fit.non_exponential);
  }
}

TEST_CASE("structure report clauses") {
  Terrace terr;
  terr.platforms = {constant_solution(1.0), constant_solution(0.0)};
  terr.waves = {synthetic_wave()};

  StabilityRecord stable;
  stable.mu = 0.5;
  stable.stable_above = stable.stable_below = Tristate::yes;
  stable.isolated_above = stable.isolated_below = Tristate::yes;
  StabilityRecord unstable;
  unstable.mu = -0.5;
  unstable.stable_above = unstable.stable_below = Tristate::no;
  unstable.isolated_above = unstable.isolated_below = Tristate::yes;

  SUBCASE("positive speed needs the upper platform stable from below") {
    const StructureReport rep =
        check_terrace_structure(terr, {stable, unstable});
    REQUIRE(rep.clauses.size() == 1);
    CHECK(rep.clauses[0].clause == "c>0");
    CHECK(rep.clauses[0].pass);
  }
  SUBCASE("zero speed needs both platforms stable") {
    Terrace flat = terr;
    flat.waves[0].c = 1e-4;
    const StructureReport ok = check_terrace_structure(flat, {stable, stable});
    CHECK(ok.clauses[0].clause == "c=0");
    CHECK(ok.clauses[0].pass);
    const StructureReport bad =
        check_terrace_structure(flat, {stable, unstable});
    CHECK(!bad.clauses[0].pass);
  }
  SUBCASE("multistable gate") {
    const StructureReport rep =
        check_terrace_structure(terr, {stable, unstable}, true);
    CHECK(rep.multistable_checked);
    CHECK(!rep.multistable_pass);
  }
}

TEST_CASE("minimality verdicts") {
  Terrace terr;
  terr.platforms = {constant_solution(1.0), constant_solution(0.0)};
  terr.waves = {synthetic_wave()};

  // Shifted copy of the wave itself.
  WaveProfile shifted = terr.waves[0];
  shifted.xi0 += 7 * shifted.dxi;

  // Artificially flattened (wider) profile.
  WaveProfile flat = terr.waves[0];
  for (int j = 0; j < flat.n_xi; ++j)
    flat.rows[0][j] = exact_wave((flat.xi0 + j * flat.dxi) / 3.0);

  const MinimalityReport rep =
      check_minimality(terr, {{0, shifted}, {0, flat}}, 1e-9);
  CHECK(rep.all_pass);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].verdict == Steepness::mutually);
  CHECK(rep.entries[1].verdict == Steepness::steeper);
}

TEST_CASE("minimality against converged runs and alternate anchor levels") {
  // Profiles extracted from a bump-perturbed run and from a different level
  // anchor converge to the same wave, so the verdicts are "mutually".
  const auto spec = NonlinearitySpec::bistable(0.25);
  Grid g(-40.0, 80.0, 1201);
  const Trajectory heavi = simulate(spec, g, heaviside_ic(g, 0.0, 1.0),
                                    BcPolicy::track_reaction, 0.01, 60.0, {});
  const auto ladder = find_periodic_solutions(spec, 0.0, 1.2);
  TerraceParams tp;
  tp.window = 30.0;
  Terrace terr = extract_terrace(heavi, ladder, tp);
  REQUIRE(terr.n_waves() == 1);

  SandwichParams sp;
  sp.shape = SandwichShape::ramp_bump;
  sp.bump_amplitude = 0.35;
  sp.seed = 5;
  const Field bump_ic = sandwich_ic(g, -4.0, 4.0, 1.0, sp);
  const Trajectory bumped = simulate(spec, g, bump_ic,
                                     BcPolicy::track_reaction, 0.01, 60.0, {});
  const auto btracks = track_levels(bumped, {0.5});
  const SpeedEstimate best = estimate_speed(btracks.front(), 1.0, 18);
  WaveProfile from_bump =
      build_wave_profile(bumped, 0.5, best.c, best.stderr_c, 30.0);

  const auto htracks = track_levels(heavi, {0.3});
  const SpeedEstimate hest = estimate_speed(htracks.front(), 1.0, 18);
  WaveProfile from_level =
      build_wave_profile(heavi, 0.3, hest.c, hest.stderr_c, 30.0);

  const MinimalityReport rep =
      check_minimality(terr, {{0, from_bump}, {0, from_level}}, 1e-6);
  CHECK(rep.all_pass);
  for (const auto& e : rep.entries) CHECK(e.verdict == Steepness::mutually);
}

TEST_CASE("combustion terrace: single ignition wave over the plateau") {
  const auto spec = NonlinearitySpec::combustion(0.3, 1.0);
  Grid g(-50.0, 70.0, 1201);
  const Trajectory traj = simulate(spec, g, heaviside_ic(g, 0.0, 1.0),
                                   BcPolicy::track_reaction, 0.01, 50.0, {});
  const auto ladder = find_periodic_solutions(spec, 0.0, 1.2);
  REQUIRE(ladder.size() == 2);
  REQUIRE(ladder[0].kind == SolutionKind::interval_of_equilibria);
  TerraceParams tp;
  tp.window = 30.0;
  const Terrace terr = extract_terrace(traj, ladder, tp);
  REQUIRE(terr.n_waves() == 1);
  CHECK(terr.platforms.back().value_at0() == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(terr.waves[0].c > 0.05);  // ignition front invades the plateau
}

TEST_CASE("ordering-violating quintic collapses to a single wave") {
  // Asymmetry chosen so the upper half-problem front is faster than the
  // lower one; no two-wave terrace can be ordered, so the construction
  // must skip the 0.5 platform.
  const auto spec = NonlinearitySpec::quintic(16.0, 0.3, 0.5, 0.62);

  auto half_speed = [&](double lo, double hi) {
    Grid g(-50.0, 60.0, 1101);
    Field ic(g, 0.0);
    for (int i = 0; i < g.n_x; ++i) ic.values[i] = g.x(i) <= 0.0 ? hi : lo;
    const Trajectory traj =
        simulate(spec, g, ic, BcPolicy::track_reaction, 0.01, 30.0, {});
    const auto tracks = track_levels(traj, {0.5 * (lo + hi)});
    return estimate_speed(tracks.front(), 1.0, 9).c;
  };
  const double c_lower_half = half_speed(0.0, 0.5);
  const double c_upper_half = half_speed(0.5, 1.0);
  CHECK(c_upper_half > c_lower_half);  // the ordered regime fails

  Grid g(-60.0, 80.0, 1401);
  const Trajectory traj = simulate(spec, g, heaviside_ic(g, 0.0, 1.0),
                                   BcPolicy::track_reaction, 0.01, 50.0, {});
  const auto ladder = find_periodic_solutions(spec, 0.0, 1.2);
  REQUIRE(ladder.size() == 5);
  TerraceParams tp;
  tp.window = 25.0;
  const Terrace terr = extract_terrace(traj, ladder, tp);
  REQUIRE(terr.n_waves() == 1);
  CHECK(terr.platforms.front().value_at0() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(terr.platforms.back().value_at0() == doctest::Approx(0.0).epsilon(1e-6));
  // The merged front speed sits between the two half-problem speeds.
  CHECK(terr.waves[0].c > c_lower_half);
  CHECK(terr.waves[0].c < c_upper_half);
}

TEST_CASE("region partition constructor checks") {
  const RegionPartition rp({0.1, 0.4}, 0.03);
  REQUIRE(rp.cbar.size() == 3);
  CHECK(rp.cbar[0] == doctest::Approx(-0.9));
  CHECK(rp.cbar[1] == doctest::Approx(0.25));
  CHECK(rp.cbar[2] == doctest::Approx(1.4));
  // cbar[i-1] < c_i < cbar[i].
  CHECK(rp.cbar[0] < 0.1);
  CHECK(0.1 < rp.cbar[1]);
  CHECK(rp.cbar[1] < 0.4);
  // The margin cap is min{0.1-(-0.9), 0.25-0.1, 0.4-0.25, 1.4-0.4}/4.
  CHECK_NOTHROW(RegionPartition({0.1, 0.4}, 0.0375));
  CHECK_THROWS_AS(RegionPartition({0.1, 0.4}, 0.04), std::invalid_argument);
  CHECK_THROWS_AS(RegionPartition({0.4, 0.1}, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(RegionPartition({0.1, 0.4}, 0.0), std::invalid_argument);
}

TEST_CASE("extract_terrace on a single bistable front (coarse but fast)") {
  const auto spec = NonlinearitySpec::bistable(0.25);
  Grid g(-40.0, 80.0, 1201);  // dx = 0.1
  const Field ic = heaviside_ic(g, 0.0, 1.0);
  const Trajectory traj =
      simulate(spec, g, ic, BcPolicy::track_reaction, 0.01, 60.0, {});
  const auto ladder = find_periodic_solutions(spec, 0.0, 1.2);
  TerraceParams tp;
  tp.window = 30.0;
  const Terrace terr = extract_terrace(traj, ladder, tp);
  REQUIRE(terr.n_waves() == 1);
  CHECK(terr.platforms.front().value_at0() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(terr.platforms.back().value_at0() == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(terr.waves[0].c == doctest::Approx(kExactSpeed).epsilon(0.02));
  // Anchored at the midpoint level.
  CHECK(terr.waves[0].eval_profile(0.0, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-6));
}
