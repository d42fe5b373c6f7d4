#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "rabihet/params.hpp"

using namespace rabihet;
using Catch::Approx;

TEST_CASE("derived quantities at the reference configuration", "[params]") {
  Params p = make_params(101.0, 0.25, Regime::StrongSegregation);
  CHECK(p.omega == Approx(25.0).margin(1e-13));
  CHECK(p.eps == Approx(0.1).margin(1e-15));
  CHECK(p.r == Approx(0.25).margin(1e-15));
}

TEST_CASE("quadratic detuning shifts the ratio by c0 eps^2", "[params]") {
  const double c0 = 0.25;
  Params p = make_params(101.0, c0, [c0](double e) { return c0 * e * e; },
                         Regime::StrongSegregation);
  CHECK(p.r == Approx(0.2525).margin(1e-14));
  CHECK(p.omega == Approx(0.2525 * 100.0).margin(1e-11));
}

TEST_CASE("constructor rejections", "[params]") {
  CHECK_THROWS_AS(make_params(101.0, 0.6, Regime::StrongSegregation), BadC0);
  CHECK_THROWS_AS(make_params(101.0, 0.5, Regime::StrongSegregation), BadC0);
  CHECK_THROWS_AS(make_params(1.0, 0.25, Regime::StrongSegregation), BadLambda);
  CHECK_THROWS_AS(make_params(0.5, 0.25, Regime::WeakSegregation), BadLambda);
  // omega_tilde(0) must vanish
  CHECK_THROWS_AS(make_params(101.0, 0.25, [](double) { return 0.1; },
                              Regime::StrongSegregation),
                  BadOmegaTilde);
  // eps = 1/sqrt(0.1) ~ 3.16 pushes r = 0.45 + eps past 1/2
  CHECK_THROWS_AS(make_params(1.1, 0.45, [](double e) { return e; },
                              Regime::StrongSegregation),
                  RatioOutOfRange);
}

TEST_CASE("ratio invariants over random admissible parameters", "[params]") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> lam(1.001, 2000.0);
  std::uniform_real_distribution<double> c0(0.01, 0.49);
  for (int k = 0; k < 100; ++k) {
    Params p = make_params(lam(rng), c0(rng), Regime::StrongSegregation);
    CHECK(p.r > 0.0);
    CHECK(p.r < 0.5);
    CHECK(4.0 * p.r * p.r < 1.0);
    CHECK(p.eps > 0.0);
  }
}

TEST_CASE("regimes share omega when the detuning vanishes", "[params]") {
  Params s = make_params(1.5, 0.3, Regime::StrongSegregation);
  Params w = make_params(1.5, 0.3, Regime::WeakSegregation);
  CHECK(s.omega == w.omega);
  CHECK(s.eps == Approx(1.0 / w.eps).margin(1e-15));
}
