#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "rabihet/dynamics.hpp"
#include "rabihet/equilibria.hpp"
#include "rabihet/ode.hpp"

using namespace rabihet;
using Catch::Approx;

namespace {

Params strong101() { return make_params(101.0, 0.25, Regime::StrongSegregation); }
Params weak104() { return make_params(1.04, 0.25, Regime::WeakSegregation); }

Vec4 flow(CoordFrame frame, const Vec4& y0, double t, const Params& par) {
  OdeOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  return integrate_to(
      [&](const Vec4& s) { return rhs(frame, s, par); }, y0, 0.0, t, opt);
}

}  // namespace

TEST_CASE("vector field values from the displayed equations", "[dynamics]") {
  Params p = strong101();
  auto [ub, vb] = mixed_equilibria(p);
  CHECK(rhs(CoordFrame::PhysicalUV, Vec4(ub, 0, vb, 0), p)
            .lpNorm<Eigen::Infinity>() < 1e-13);

  Params p2 = make_params(2.0, 0.125, Regime::StrongSegregation);  // omega 0.125
  REQUIRE(p2.omega == Approx(0.125));
  // hand-evaluated right sides at (u,u',v,v') = (1,0,0,0) with omega = 0.25
  Params p25 = make_params(2.0, 0.25, Regime::StrongSegregation);
  Vec4 f = rhs(CoordFrame::PhysicalUV, Vec4(1, 0, 0, 0), p25);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == Approx(0.0).margin(1e-15));
  CHECK(f[2] == 0.0);
  CHECK(f[3] == Approx(-0.25).margin(1e-15));

  // polar equilibrium (0, 0, phibar, 0), sin(phibar) = 2r
  Params w = weak104();
  const double phibar = std::asin(2.0 * w.r);
  CHECK(rhs(CoordFrame::PolarBlowup, Vec4(0, 0, phibar, 0), w)
            .lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("coordinate transforms, frozen example and round trips", "[dynamics]") {
  Params p = strong101();
  auto [ub, vb] = mixed_equilibria(p);

  Vec4 h = to_frame(CoordFrame::HyperbolaPQUZ, CoordFrame::PhysicalUV,
                    Vec4(ub, 0, vb, 0), p);
  CHECK(h[0] == Approx(0.0).margin(1e-12));  // h = ubar vbar - r = 0
  CHECK(h[1] == Approx(0.0).margin(1e-14));
  CHECK(h[2] == Approx(ub).margin(1e-14));
  CHECK(h[3] == Approx(0.0).margin(1e-14));

  Vec4 pol = to_frame(CoordFrame::PolarBlowup, CoordFrame::PhysicalUV,
                      Vec4(ub, 0, vb, 0), p);
  CHECK(pol[0] == Approx(0.0).margin(1e-12));  // R = 1 exactly at the pair
  CHECK(pol[1] == Approx(0.0).margin(1e-14));
  CHECK(std::sin(pol[2]) == Approx(2.0 * p.r).margin(1e-13));
  CHECK(pol[3] == Approx(0.0).margin(1e-14));

  // hand-evaluated: p = (0.5*0.6 - 0.25)/eps^2, q = (u'v + uv')/eps
  Vec4 hx = to_frame(CoordFrame::HyperbolaPQUZ, CoordFrame::PhysicalUV,
                     Vec4(0.5, 0.1, 0.6, -0.1), p);
  CHECK(hx[0] == Approx(5.0).margin(1e-10));
  CHECK(hx[1] == Approx(0.1).margin(1e-12));
  CHECK(hx[2] == Approx(0.5).margin(1e-15));
  CHECK(hx[3] == Approx(0.1).margin(1e-15));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> pos(0.2, 1.1), vel(-0.4, 0.4);
  for (int k = 0; k < 50; ++k) {
    Vec4 y(pos(rng), vel(rng), pos(rng), vel(rng));
    for (auto frame : {CoordFrame::HyperbolaPQUZ, CoordFrame::PolarBlowup}) {
      Vec4 t = to_frame(frame, CoordFrame::PhysicalUV, y, p);
      Vec4 b = to_frame(CoordFrame::PhysicalUV, frame, t, p);
      CHECK((b - y).lpNorm<Eigen::Infinity>() < 1e-12);
    }
    Vec4 t = to_frame(CoordFrame::PolarBlowup, CoordFrame::HyperbolaPQUZ,
                      to_frame(CoordFrame::HyperbolaPQUZ, CoordFrame::PhysicalUV, y, p), p);
    Vec4 b = to_frame(CoordFrame::PhysicalUV, CoordFrame::PolarBlowup, t, p);
    CHECK((b - y).lpNorm<Eigen::Infinity>() < 1e-11);
  }
}

TEST_CASE("transform domain guards", "[dynamics]") {
  Params p = strong101();
  CHECK_THROWS_AS(to_frame(CoordFrame::HyperbolaPQUZ, CoordFrame::PhysicalUV,
                           Vec4(-0.1, 0, 0.5, 0), p),
                  DomainViolation);
  CHECK_THROWS_AS(rhs(CoordFrame::HyperbolaPQUZ, Vec4(0, 0, 0, 0), p),
                  DomainViolation);
  CHECK_THROWS_AS(rhs(CoordFrame::PolarBlowup, Vec4(0, 0, -0.3, 0), weak104()),
                  DomainViolation);
  // R = 1 - eps^2 w1 <= 0
  Params w = weak104();
  CHECK_THROWS_AS(rhs(CoordFrame::PolarBlowup,
                      Vec4(2.0 / (w.eps * w.eps), 0, 1.0, 0), w),
                  DomainViolation);
}

TEST_CASE("Hamiltonian values and cross-frame agreement", "[dynamics]") {
  Params p = strong101();
  auto [ub, vb] = mixed_equilibria(p);
  CHECK(hamiltonian(HamiltonianKind::FullH, Vec4(ub, 0, vb, 0), p) ==
        Approx(0.0).margin(1e-14));

  Params p2 = make_params(2.0, 0.25, Regime::StrongSegregation);
  CHECK(hamiltonian(HamiltonianKind::FullH, Vec4(1, 0, 1, 0), p2) ==
        Approx(-0.53125).margin(1e-15));

  // the reduced weak Hamiltonian vanishes on the connection branch
  Vec4 red(0, 0, 0.5 * M_PI, 2.0 * 0.25 - 1.0);
  CHECK(hamiltonian(HamiltonianKind::HredWeak, red, p) ==
        Approx(0.0).margin(1e-15));

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> pos(0.25, 1.0), vel(-0.3, 0.3);
  for (int k = 0; k < 40; ++k) {
    Vec4 y(pos(rng), vel(rng), pos(rng), vel(rng));
    const double H = hamiltonian(HamiltonianKind::FullH, y, p);
    Vec4 hyp = to_frame(CoordFrame::HyperbolaPQUZ, CoordFrame::PhysicalUV, y, p);
    CHECK(hamiltonian(HamiltonianKind::TildeH, hyp, p) == Approx(H).margin(1e-10));
    CHECK(hamiltonian(HamiltonianKind::HatHStrong, hyp, p) ==
          Approx(H).margin(1e-10));

    Params w = weak104();
    const double Hw = hamiltonian(HamiltonianKind::FullH, y, w);
    Vec4 pol = to_frame(CoordFrame::PolarBlowup, CoordFrame::PhysicalUV, y, w);
    CHECK(hamiltonian(HamiltonianKind::HatHWeak, pol, w) ==
          Approx(Hw).margin(1e-12));
  }
}

TEST_CASE("the physical field is canonical for FullH", "[dynamics]") {
  Params p = strong101();
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> pos(0.1, 1.2), vel(-0.5, 0.5);
  for (int k = 0; k < 50; ++k) {
    Vec4 y(pos(rng), vel(rng), pos(rng), vel(rng));
    Vec4 f = rhs(CoordFrame::PhysicalUV, y, p);
    Vec4 g = full_h_gradient(y, p);
    CHECK(f[0] == Approx(g[1]).margin(1e-12));
    CHECK(f[1] == Approx(-g[0]).margin(1e-11));
    CHECK(f[2] == Approx(g[3]).margin(1e-12));
    CHECK(f[3] == Approx(-g[2]).margin(1e-11));
  }
}

TEST_CASE("Hamiltonian conservation along integrated trajectories", "[dynamics]") {
  Params p = make_params(26.0, 0.25, Regime::StrongSegregation);
  auto [ub, vb] = mixed_equilibria(p);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> bump(-1e-3, 1e-3);
  for (int k = 0; k < 10; ++k) {
    Vec4 y0(ub + bump(rng), bump(rng), vb + bump(rng), bump(rng));
    const double H0 = hamiltonian(HamiltonianKind::FullH, y0, p);
    Vec4 y1 = flow(CoordFrame::PhysicalUV, y0, 1.0, p);
    const double H1 = hamiltonian(HamiltonianKind::FullH, y1, p);
    CHECK(std::abs(H1 - H0) < 1e-9 * (1.0 + y1.norm()));
  }

  Params w = weak104();
  Vec4 y0(0.7, 0.01, 0.71, -0.01);
  Vec4 y1 = flow(CoordFrame::PhysicalUV, y0, 3.0, w);
  CHECK(std::abs(hamiltonian(HamiltonianKind::FullH, y1, w) -
                 hamiltonian(HamiltonianKind::FullH, y0, w)) <
        1e-9 * (1.0 + y1.norm()));

  // conservation holds in the transformed frame too
  Vec4 h0 = to_frame(CoordFrame::HyperbolaPQUZ, CoordFrame::PhysicalUV,
                     Vec4(ub + 1e-3, 0, vb, 0), p);
  Vec4 h1 = flow(CoordFrame::HyperbolaPQUZ, h0, 1.0, p);
  CHECK(std::abs(hamiltonian(HamiltonianKind::TildeH, h1, p) -
                 hamiltonian(HamiltonianKind::TildeH, h0, p)) < 1e-8);
}

TEST_CASE("integrating commutes with the hyperbola transform", "[dynamics]") {
  Params p = make_params(26.0, 0.25, Regime::StrongSegregation);
  auto [ub, vb] = mixed_equilibria(p);
  Vec4 y0(ub + 2e-3, 1e-3, vb - 1e-3, 0);
  const double T = 1.0;
  Vec4 route1 = to_frame(CoordFrame::HyperbolaPQUZ, CoordFrame::PhysicalUV,
                         flow(CoordFrame::PhysicalUV, y0, T, p), p);
  Vec4 route2 = flow(CoordFrame::HyperbolaPQUZ,
                     to_frame(CoordFrame::HyperbolaPQUZ, CoordFrame::PhysicalUV, y0, p),
                     T, p);
  CHECK((route1 - route2).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("integrating commutes with the polar transform", "[dynamics]") {
  // the polar blow-up frame runs in the slow variable y = eps x, so flowing
  // T in x matches flowing eps T in that frame
  Params p = weak104();
  Vec4 y0(0.69, 0.012, 0.72, -0.008);
  const double T = 2.0;
  Vec4 route1 = to_frame(CoordFrame::PolarBlowup, CoordFrame::PhysicalUV,
                         flow(CoordFrame::PhysicalUV, y0, T, p), p);
  Vec4 route2 = flow(CoordFrame::PolarBlowup,
                     to_frame(CoordFrame::PolarBlowup, CoordFrame::PhysicalUV, y0, p),
                     p.eps * T, p);
  CHECK((route1 - route2).lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("swap symmetry of the flow", "[dynamics]") {
  Params p = make_params(26.0, 0.25, Regime::StrongSegregation);
  auto [ub, vb] = mixed_equilibria(p);
  Vec4 y0(ub + 1e-3, 5e-4, vb - 2e-3, -1e-3);
  const double T = 0.8;
  // (v,-v',u,-u')(-x) solves the system: flowing the swapped state forward
  // equals swapping the backward flow
  Vec4 lhs = flow(CoordFrame::PhysicalUV, swap_state(y0), T, p);
  Vec4 rhs_ = swap_state(flow(CoordFrame::PhysicalUV, y0, -T, p));
  CHECK((lhs - rhs_).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("analytic Jacobian and Hamiltonian derivatives match differences",
          "[dynamics]") {
  Params p = strong101();
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> pos(0.15, 1.1), vel(-0.5, 0.5);
  for (int k = 0; k < 100; ++k) {
    Vec4 y(pos(rng), vel(rng), pos(rng), vel(rng));
    Mat4 A = rhs_jacobian_physical(y, p);
    Mat4 F = rhs_jacobian_fd(CoordFrame::PhysicalUV, y, p);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double scale = std::max(1.0, std::abs(A(a, b)));
        CHECK(std::abs(A(a, b) - F(a, b)) / scale < 1e-6);
      }

    // grad H and Hess H against differences of H and grad H
    for (int j = 0; j < 4; ++j) {
      const double d = 1e-6 * std::max(1.0, std::abs(y[j]));
      Vec4 yp = y, ym = y;
      yp[j] += d;
      ym[j] -= d;
      const double fd = (hamiltonian(HamiltonianKind::FullH, yp, p) -
                         hamiltonian(HamiltonianKind::FullH, ym, p)) /
                        (2.0 * d);
      CHECK(full_h_gradient(y, p)[j] == Approx(fd).margin(2e-6));
      Vec4 gcol = (full_h_gradient(yp, p) - full_h_gradient(ym, p)) / (2.0 * d);
      for (int a = 0; a < 4; ++a)
        CHECK(full_h_hessian(y, p)(a, j) == Approx(gcol[a]).margin(2e-5));
    }
  }
}
