#include <doctest.h>

#include <random>

#include "terracelab/nonlinearity.hpp"

using namespace terracelab;

TEST_CASE("catalog point values") {
  const auto kpp = NonlinearitySpec::kpp();
  CHECK(kpp.eval(0.3, 0.0) == 0.0);
  CHECK(kpp.eval(0.0, 0.5) == doctest::Approx(0.25));

  const auto bi = NonlinearitySpec::bistable(0.25);
  CHECK(bi.eval(0.0, 0.5) == doctest::Approx(0.0625));

  // Combustion plateau: f = 0 below the ignition level for all t.
  const auto comb = NonlinearitySpec::combustion(0.3, 1.0);
  const auto tpp = NonlinearitySpec::time_periodic(comb, 0.5, 1.0);
  CHECK(tpp.eval(0.25, 0.2) == 0.0);
  CHECK(tpp.eval(0.25, 0.0) == 0.0);
}

TEST_CASE("analytic u-derivatives") {
  const auto kpp = NonlinearitySpec::kpp();
  CHECK(kpp.eval_du(0.0, 1.0) == doctest::Approx(-1.0));
  CHECK(kpp.eval_du(0.0, 0.0) == doctest::Approx(1.0));
  const auto bi = NonlinearitySpec::bistable(0.25);
  CHECK(bi.eval_du(0.0, 0.0) == doctest::Approx(-0.25));
}

TEST_CASE("u=0 is a rest state for every catalog family") {
  std::vector<NonlinearitySpec> specs = {
      NonlinearitySpec::kpp(),
      NonlinearitySpec::bistable(0.4),
      NonlinearitySpec::quintic(2.0, 0.2, 0.5, 0.8),
      NonlinearitySpec::combustion(0.3, 1.0),
      NonlinearitySpec::time_periodic(NonlinearitySpec::bistable(0.3), 0.5, 2.0),
      NonlinearitySpec::custom({{1, 0, 0.7}, {2, 1, -0.3}, {3, 2, 0.1}}, 1.5),
  };
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(-5.0, 5.0);
  for (const auto& s : specs)
    for (int i = 0; i < 50; ++i) CHECK(s.eval(ut(rng), 0.0) == 0.0);
}

TEST_CASE("time periodicity over 1000 random samples") {
  std::vector<NonlinearitySpec> specs = {
      NonlinearitySpec::kpp(0.7),
      NonlinearitySpec::bistable(0.25, 2.0),
      NonlinearitySpec::quintic(4.0, 0.15, 0.5, 0.8, 1.3),
      NonlinearitySpec::combustion(0.25, 1.0, 0.9),
      NonlinearitySpec::time_periodic(NonlinearitySpec::kpp(1.1), 0.4, 1.1),
      NonlinearitySpec::custom({{1, 1, 1.0}, {2, 2, -0.5}, {4, 0, 0.2}}, 0.8),
  };
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ut(-10.0, 10.0);
  std::uniform_real_distribution<double> uu(-0.5, 1.5);
  for (const auto& s : specs) {
    for (int i = 0; i < 1000; ++i) {
      const double t = ut(rng);
      const double u = uu(rng);
      CHECK(std::abs(s.eval(t + s.period(), u) - s.eval(t, u)) <= 1e-12);
    }
  }
}

TEST_CASE("analytic derivative matches central differences") {
  std::vector<NonlinearitySpec> specs = {
      NonlinearitySpec::kpp(),
      NonlinearitySpec::bistable(0.3),
      NonlinearitySpec::quintic(3.0, 0.2, 0.5, 0.75),
      NonlinearitySpec::time_periodic(NonlinearitySpec::bistable(0.25), 0.5, 1.0),
      NonlinearitySpec::custom({{1, 0, 1.0}, {3, 1, 0.4}}, 1.0),
  };
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(0.0, 3.0);
  std::uniform_real_distribution<double> uu(-0.4, 1.4);
  const double h = 1e-6;
  for (const auto& s : specs) {
    for (int i = 0; i < 200; ++i) {
      const double t = ut(rng);
      const double u = uu(rng);
      const double fd = (s.eval(t, u + h) - s.eval(t, u - h)) / (2 * h);
      const double an = s.eval_du(t, u);
      CHECK(std::abs(an - fd) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
  }
  // Combustion away from the derivative kink at theta.
  const auto comb = NonlinearitySpec::combustion(0.3, 1.0);
  for (double u : {0.05, 0.2, 0.45, 0.7, 0.95}) {
    const double fd = (comb.eval(0, u + h) - comb.eval(0, u - h)) / (2 * h);
    CHECK(std::abs(comb.eval_du(0, u) - fd) <= 1e-5);
  }
}

TEST_CASE("potential of autonomous families") {
  const auto kpp = NonlinearitySpec::kpp();
  CHECK(kpp.potential(0.0) == doctest::Approx(0.0));
  CHECK(kpp.potential(1.0) == doctest::Approx(1.0 / 6.0));

  // Dense-sampling oracle: argmax of F over [0,1] for the bistable family.
  const auto bi = NonlinearitySpec::bistable(0.25);
  double best_u = 0.0, best_f = bi.potential(0.0);
  for (int i = 0; i <= 10000; ++i) {
    const double u = i * 1e-4;
    const double F = bi.potential(u);
    if (F > best_f) {
      best_f = F;
      best_u = u;
    }
  }
  CHECK(best_u == doctest::Approx(1.0).epsilon(1e-3));

  // Combustion has a closed-form piecewise antiderivative; cross-check by
  // trapezoid quadrature.
  const auto comb = NonlinearitySpec::combustion(0.3, 1.0);
  double acc = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double a = 0.9 * i / n, b = 0.9 * (i + 1) / n;
    acc += 0.5 * (comb.eval(0, a) + comb.eval(0, b)) * (b - a);
  }
  CHECK(comb.potential(0.9) == doctest::Approx(acc).epsilon(1e-6));

  const auto tpp = NonlinearitySpec::time_periodic(comb, 0.5, 1.0);
  CHECK_THROWS_AS(tpp.potential(0.5), std::invalid_argument);
}

TEST_CASE("JSON round trip keeps evaluations") {
  const auto spec =
      NonlinearitySpec::time_periodic(NonlinearitySpec::quintic(2.5, 0.1, 0.5, 0.9),
                                      0.3, 1.7);
  const auto back = NonlinearitySpec::from_json(spec.to_json());
  for (double t : {0.0, 0.4, 1.2})
    for (double u : {0.1, 0.5, 0.95})
      CHECK(back.eval(t, u) == doctest::Approx(spec.eval(t, u)).epsilon(1e-14));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(NonlinearitySpec::bistable(1.2), std::invalid_argument);
  CHECK_THROWS_AS(NonlinearitySpec::quintic(1.0, 0.6, 0.5, 0.8),
                  std::invalid_argument);
  CHECK_THROWS_AS(NonlinearitySpec::custom({{0, 0, 1.0}}, 1.0),
                  std::invalid_argument);
  const auto kpp = NonlinearitySpec::kpp();
  CHECK_THROWS_AS(kpp.eval(0.0, std::nan("")), std::domain_error);
}
