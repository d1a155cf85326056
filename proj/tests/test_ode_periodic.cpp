#include <doctest.h>

#include <cmath>

#include "terracelab/ode_periodic.hpp"

using namespace terracelab;

TEST_CASE("poincare map basics") {
  // f == 0 is the identity flow.
  const auto zero = NonlinearitySpec::custom({}, 1.0);
  CHECK(poincare_map(zero, 0.7) == doctest::Approx(0.7));

  const auto kpp = NonlinearitySpec::kpp();
  CHECK(poincare_map(kpp, 0.0) == doctest::Approx(0.0));

  // Logistic closed form: h(1) = h0 e / (1 + h0(e - 1)).
  const double h0 = 0.5;
  const double expect = h0 * std::exp(1.0) / (1.0 + h0 * (std::exp(1.0) - 1.0));
  CHECK(poincare_map(kpp, h0) == doctest::Approx(expect).epsilon(1e-9));
  CHECK(expect == doctest::Approx(0.731059).epsilon(1e-5));
}

TEST_CASE("blow-up reports the escape time") {
  // dh/dt = 1 + h^2 blows up at t = pi/2 - atan(h0) < 1.
  double h0 = 5.0;
  try {
    ode_solve_scalar([&](double, double h) { return 1.0 + h * h; }, 0.0, 1.0,
                     h0);
    FAIL("expected divergence");
  } catch (const OdeDivergence& e) {
    CHECK(e.escape_time < 1.0);
    CHECK(e.escape_time > 0.0);
  }
  // The Poincare map surfaces the same divergence error.
  const auto spec = NonlinearitySpec::custom({{2, 0, 16.0}}, 1.0);
  CHECK_THROWS_AS(poincare_map(spec, 1.0), OdeDivergence);
}

TEST_CASE("find_periodic_solutions on the catalog") {
  const OdePeriodicParams params;

  SUBCASE("kpp has exactly 0 and 1 in [0, 1.5]") {
    const auto sols = find_periodic_solutions(NonlinearitySpec::kpp(), 0.0, 1.5);
    REQUIRE(sols.size() == 2);
    CHECK(sols[0].value_at0() == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(sols[1].value_at0() == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("quintic has all five roots") {
    const auto spec = NonlinearitySpec::quintic(1.0, 0.2, 0.5, 0.8);
    const auto sols = find_periodic_solutions(spec, 0.0, 1.0);
    REQUIRE(sols.size() == 5);
    const double expect[5] = {0.0, 0.2, 0.5, 0.8, 1.0};
    for (int i = 0; i < 5; ++i)
      CHECK(sols[i].value_at0() == doctest::Approx(expect[i]).epsilon(1e-6));
  }

  SUBCASE("combustion reports the plateau plus the point 1") {
    const auto spec = NonlinearitySpec::combustion(0.3, 1.0);
    const auto sols = find_periodic_solutions(spec, 0.0, 1.0);
    REQUIRE(sols.size() == 2);
    CHECK(sols[0].kind == SolutionKind::interval_of_equilibria);
    CHECK(sols[0].band_lo == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(sols[0].band_hi == doctest::Approx(0.3).epsilon(1e-4));
    CHECK(sols[1].kind == SolutionKind::point);
    CHECK(sols[1].value_at0() == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("returned solutions re-close over one period") {
    const auto spec = NonlinearitySpec::time_periodic(
        NonlinearitySpec::bistable(0.3), 0.5, 1.0);
    const auto sols = find_periodic_solutions(spec, 0.0, 1.2);
    for (const auto& s : sols) {
      CHECK(std::abs(poincare_map(spec, s.value_at0()) - s.value_at0()) <=
            10 * params.fp_tol);
      CHECK(std::abs(s.q.front() - s.q.back()) <= 1e-8);
    }
    // Total ordering at every sampled time.
    for (size_t i = 0; i + 1 < sols.size(); ++i)
      for (size_t j = 0; j < sols[i].q.size(); ++j)
        CHECK(sols[i].q[j] < sols[i + 1].q[j] + 1e-9);
  }
}

TEST_CASE("stability classification") {
  const auto kpp = NonlinearitySpec::kpp();
  const auto sols = find_periodic_solutions(kpp, 0.0, 1.5);

  const auto rec1 = classify_stability(kpp, sols[1], &sols);
  CHECK(rec1.mu == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rec1.floquet == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
  CHECK(rec1.stable_above == Tristate::yes);
  CHECK(rec1.stable_below == Tristate::yes);

  const auto rec0 = classify_stability(kpp, sols[0], &sols);
  CHECK(rec0.mu == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(rec0.stable_above == Tristate::no);

  // b(t) = 1 + 0.5 sin(2 pi t): the sine integrates away, mu(1) = 1.
  const auto tpp =
      NonlinearitySpec::time_periodic(NonlinearitySpec::kpp(), 0.5, 1.0);
  const auto tsols = find_periodic_solutions(tpp, 0.0, 1.5);
  REQUIRE(tsols.size() == 2);
  const auto trec = classify_stability(tpp, tsols[1], &tsols);
  CHECK(trec.mu == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("isolated flags: plateau interiors are not isolated") {
  const auto spec = NonlinearitySpec::combustion(0.3, 1.0);
  const auto sols = find_periodic_solutions(spec, 0.0, 1.2);
  REQUIRE(sols.size() == 2);
  const auto plateau = classify_stability(spec, sols[0], &sols);
  CHECK(plateau.isolated_above == Tristate::no);  // the band sits above 0
  CHECK(plateau.isolated_below == Tristate::yes);
  const auto top = classify_stability(spec, sols[1], &sols);
  CHECK(top.isolated_below == Tristate::yes);
  CHECK(top.stable_below == Tristate::yes);
}

TEST_CASE("floquet multiplier agrees with the poincare derivative") {
  std::vector<NonlinearitySpec> specs = {
      NonlinearitySpec::kpp(),
      NonlinearitySpec::bistable(0.3),
      NonlinearitySpec::time_periodic(NonlinearitySpec::bistable(0.25), 0.5, 1.0),
  };
  for (const auto& spec : specs) {
    const auto sols = find_periodic_solutions(spec, 0.0, 1.2);
    for (const auto& s : sols) {
      const auto rec = classify_stability(spec, s, &sols);
      const double phi_prime = poincare_map_derivative(spec, s.value_at0());
      CHECK(std::abs(rec.floquet - phi_prime) <=
            1e-6 * std::max(std::abs(phi_prime), 1e-12));
    }
  }
}

TEST_CASE("attraction intervals for the bistable family") {
  const auto spec = NonlinearitySpec::bistable(0.3);
  const auto sols = find_periodic_solutions(spec, 0.0, 1.2);
  REQUIRE(sols.size() == 3);

  // Longer probes sharpen the boundary: near-separatrix trajectories take
  // ~ln(1/delta)/|f'(0.3)| periods to commit to a basin.
  OdePeriodicParams params;
  params.n_basin = 150;

  // Probe-integration oracle: which seeds converge to 1?
  const auto basin_top =
      attraction_interval(spec, sols[2], BasinSide::plus, -1.0, 2.0, params);
  CHECK(basin_top.lo == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(basin_top.hi_is_window_edge);

  const auto basin_zero =
      attraction_interval(spec, sols[0], BasinSide::minus, -1.0, 2.0, params);
  CHECK(basin_zero.hi == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(basin_zero.lo_is_window_edge);

  for (double h0 : {0.35, 0.6, 0.9, 1.4}) {
    double h = h0;
    for (int k = 0; k < 60; ++k) h = poincare_map(spec, h);
    CHECK(std::abs(h - 1.0) < 1e-4);
    CHECK(basin_top.contains(h0));
  }
  for (double h0 : {0.05, 0.15, 0.28}) {
    double h = h0;
    for (int k = 0; k < 60; ++k) h = poincare_map(spec, h);
    CHECK(std::abs(h) < 1e-4);
    CHECK(basin_zero.contains(h0));
  }

  // kpp: the basin of 1 covers everything above 0 within the window.
  const auto kpp = NonlinearitySpec::kpp();
  const auto ksols = find_periodic_solutions(kpp, 0.0, 1.5);
  const auto kb = attraction_interval(kpp, ksols[1], BasinSide::plus, -1.0, 2.0);
  CHECK(kb.lo == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(kb.hi_is_window_edge);

  CHECK_THROWS_AS(
      attraction_interval(kpp, ksols[0], BasinSide::minus, -1.0, 2.0),
      std::invalid_argument);
}
