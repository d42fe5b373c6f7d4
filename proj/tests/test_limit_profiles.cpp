#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "rabihet/dynamics.hpp"
#include "rabihet/limit_profiles.hpp"

using namespace rabihet;
using Catch::Approx;

namespace {

// worst u0(x)u0(-x) - c0 over off-node probes; exercises the interpolant
double u0_offnode_symmetry(const LimitProfile& prof) {
  double worst = 0.0;
  const int n = static_cast<int>(prof.xs.size());
  for (int i = 0; i < n - 1; ++i) {
    const double x = 0.5 * (prof.xs[i] + prof.xs[i + 1]);
    if (x < 0.0) continue;
    worst = std::max(worst, std::abs(prof.sample(x).first *
                                         prof.sample(-x).first -
                                     prof.c0));
  }
  return worst;
}

double tail_slope(const LimitProfile& prof, double limit_value) {
  // regression of log|value - limit| on [L/2, 0.9 L]
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (std::size_t i = 0; i < prof.xs.size(); ++i) {
    const double x = prof.xs[i];
    if (x < 0.5 * prof.L || x > 0.9 * prof.L) continue;
    const double d = std::abs(prof.values[i] - limit_value);
    if (d < 1e-13) continue;
    sx += x; sy += std::log(d); sxx += x * x; sxy += x * std::log(d); m += 1;
  }
  return (sxy - sx * sy / m) / (sxx - sx * sx / m);
}

}  // namespace

TEST_CASE("u0: anchor, slope at the anchor, and endpoints", "[limit_profiles]") {
  const double c0 = 0.25;
  LimitProfile u0 = compute_u0(c0);
  auto [val, der] = u0.sample(0.0);
  CHECK(val == Approx(0.5).margin(1e-13));          // sqrt(c0)
  CHECK(der == Approx(0.25).margin(1e-13));         // (1 - 2 c0)/2

  auto [ub0, vb0] = mixed_equilibria_limit(c0);
  const double mu = u0_slow_rate(c0);
  CHECK(std::abs(u0.values.front() - ub0) < std::exp(-0.9 * mu * u0.L));
  CHECK(std::abs(u0.values.back() - vb0) < std::exp(-0.9 * mu * u0.L));

  for (std::size_t i = 1; i < u0.values.size(); ++i)
    CHECK(u0.values[i] >= u0.values[i - 1]);
  for (double z : u0.derivs) CHECK(z >= 0.0);
}

TEST_CASE("u0: product and derivative symmetries at mirrored nodes",
          "[limit_profiles]") {
  LimitProfile u0 = compute_u0(0.25, 9.8, 2049);
  const int n = 2049;
  double worst_val = 0.0, worst_der = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = n - 1 - i;
    worst_val = std::max(worst_val,
                         std::abs(u0.values[i] * u0.values[j] - 0.25));
    worst_der = std::max(
        worst_der, std::abs(u0.derivs[j] - 0.25 * u0.derivs[i] /
                                               (u0.values[i] * u0.values[i])));
  }
  CHECK(worst_val < 1e-10);
  CHECK(worst_der < 1e-10);
}

TEST_CASE("u0: reduced Hamiltonian vanishes along the profile",
          "[limit_profiles]") {
  Params p = make_params(101.0, 0.25, Regime::StrongSegregation);
  LimitProfile u0 = compute_u0(0.25, 9.8, 513);
  for (std::size_t i = 0; i < u0.xs.size(); ++i) {
    Vec4 s(0, 0, u0.values[i], u0.derivs[i]);
    CHECK(std::abs(hamiltonian(HamiltonianKind::H0Reduced, s, p)) < 1e-12);
  }
}

TEST_CASE("phi0: anchor, slope, endpoints, monotonicity and symmetry",
          "[limit_profiles]") {
  const double c0 = 0.25;
  LimitProfile f0 = compute_phi0(c0);
  auto [val, der] = f0.sample(0.0);
  CHECK(val == Approx(0.5 * M_PI).margin(1e-13));
  CHECK(der == Approx(-0.5).margin(1e-13));  // 2 c0 - sin(pi/2)

  const double phibar0 = std::asin(0.5);
  CHECK(phibar0 == Approx(M_PI / 6.0).margin(1e-15));
  CHECK(std::abs(f0.values.front() - (M_PI - phibar0)) <
        std::exp(-0.9 * phi0_slow_rate(c0) * f0.L));
  CHECK(std::abs(f0.values.back() - phibar0) <
        std::exp(-0.9 * phi0_slow_rate(c0) * f0.L));

  for (std::size_t i = 1; i < f0.values.size(); ++i)
    CHECK(f0.values[i] <= f0.values[i - 1]);

  const int n = static_cast<int>(f0.xs.size());
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    worst = std::max(worst, std::abs(f0.values[i] + f0.values[n - 1 - i] - M_PI));
  CHECK(worst < 1e-10);

  Params w = make_params(1.04, 0.25, Regime::WeakSegregation);
  for (std::size_t i = 0; i < f0.xs.size(); ++i) {
    Vec4 s(0, 0, f0.values[i], f0.derivs[i]);
    CHECK(std::abs(hamiltonian(HamiltonianKind::HredWeak, s, w)) < 1e-12);
  }
}

TEST_CASE("sampling is exact at nodes and bounded off nodes",
          "[limit_profiles]") {
  LimitProfile f0 = compute_phi0(0.25, 13.9, 2049);
  for (std::size_t i = 0; i < f0.xs.size(); i += 97) {
    auto [v, d] = f0.sample(f0.xs[i]);
    CHECK(v == f0.values[i]);
    CHECK(d == f0.derivs[i]);
  }
  // mirrored off-node samples sum to pi within interpolation error
  for (double x : {0.3111, 1.777, 5.2345})
    CHECK(f0.sample(x).first + f0.sample(-x).first ==
          Approx(M_PI).margin(1e-8));
  CHECK_THROWS_AS(f0.sample(13.9001 + 1e-3), OutOfDomain);
}

TEST_CASE("interpolation-level symmetry residual shrinks at 4th order",
          "[limit_profiles]") {
  const double L = 9.8;
  double res257 = u0_offnode_symmetry(compute_u0(0.25, L, 257));
  double res513 = u0_offnode_symmetry(compute_u0(0.25, L, 513));
  double res1025 = u0_offnode_symmetry(compute_u0(0.25, L, 1025));
  CHECK(res257 / res513 >= 4.0);
  CHECK(res513 / res1025 >= 4.0);
}

TEST_CASE("exponential tail rates", "[limit_profiles]") {
  const double c0 = 0.25;
  LimitProfile u0 = compute_u0(c0, 9.8, 2049);
  auto [ub0, vb0] = mixed_equilibria_limit(c0);
  (void)ub0;
  CHECK(tail_slope(u0, vb0) == Approx(-u0_slow_rate(c0)).epsilon(0.02));

  LimitProfile f0 = compute_phi0(c0, 13.9, 2049);
  CHECK(tail_slope(f0, std::asin(2.0 * c0)) ==
        Approx(-phi0_slow_rate(c0)).epsilon(0.02));
}

TEST_CASE("input rejections", "[limit_profiles]") {
  CHECK_THROWS_AS(compute_u0(0.6, 9.8, 257), BadC0);
  CHECK_THROWS_AS(compute_phi0(0.0, 13.9, 257), BadC0);
  CHECK_THROWS_AS(compute_u0(0.25, 9.8, 32), InputError);
  CHECK_THROWS_AS(compute_u0(0.25, -1.0, 257), InputError);
}
