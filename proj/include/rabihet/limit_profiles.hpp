#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "rabihet/equilibria.hpp"
#include "rabihet/errors.hpp"
#include "rabihet/ode.hpp"

namespace rabihet {

enum class LimitKind { U0Strong, Phi0Weak };

/// One of the two scalar limit profiles on a uniform mesh over [-L, L]:
/// u0 (strong regime, increasing) or phi0 (weak regime, decreasing).
/// Node values come from an adaptive integration at local tolerance 1e-12,
/// so they are far more accurate than anything the BVP needs from them.
struct LimitProfile {
  LimitKind kind = LimitKind::U0Strong;
  double c0 = 0;
  double L = 0;
  double left_limit = 0, right_limit = 0;  // values approached at -/+ infinity
  std::vector<double> xs, values, derivs;

  /// Cubic Hermite interpolation; exact at mesh nodes.
  std::pair<double, double> sample(double x) const {
    const double slack = 1e-9 * (1.0 + L);
    if (x < xs.front() - slack || x > xs.back() + slack)
      throw OutOfDomain("sample point outside [-L, L]");
    x = std::clamp(x, xs.front(), xs.back());
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = it == xs.begin() ? 0 : (it - xs.begin()) - 1;
    if (i >= xs.size() - 1) i = xs.size() - 2;
    const double h = xs[i + 1] - xs[i];
    const double t = (x - xs[i]) / h;
    if (t == 0.0) return {values[i], derivs[i]};
    if (t == 1.0) return {values[i + 1], derivs[i + 1]};
    const double y0 = values[i], y1 = values[i + 1];
    const double d0 = derivs[i], d1 = derivs[i + 1];
    const double t2 = t * t, t3 = t2 * t;
    const double val = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
                       (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
    const double der = (6 * t2 - 6 * t) * y0 / h + (3 * t2 - 4 * t + 1) * d0 +
                       (6 * t - 6 * t2) * y1 / h + (3 * t2 - 2 * t) * d1;
    return {val, der};
  }
};

namespace detail {

using Vec1 = Eigen::Matrix<double, 1, 1>;

// Fills the mesh by integrating the scalar field outward from x = 0, freezing
// the tail at the equilibrium once |value - limit| < 1e-13 (the field
// vanishes there and step control would crawl otherwise).
template <class F>
LimitProfile integrate_scalar_profile(LimitKind kind, double c0, double L,
                                      int n, double v0, double left_lim,
                                      double right_lim, F&& field) {
  if (!(c0 > 0.0 && c0 < 0.5)) throw BadC0("c0 must lie in (0, 1/2)");
  if (!(L > 0.0)) throw InputError("half-length must be positive");
  if (n < 64) throw InputError("mesh must have at least 64 points");

  LimitProfile prof;
  prof.kind = kind;
  prof.c0 = c0;
  prof.L = L;
  prof.left_limit = left_lim;
  prof.right_limit = right_lim;
  prof.xs.resize(n);
  prof.values.resize(n);
  for (int i = 0; i < n; ++i) prof.xs[i] = -L + 2.0 * L * i / (n - 1);

  OdeOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;

  auto march = [&](int from, int to, int step, double limit) {
    Vec1 y;
    y[0] = v0;
    double x = 0.0;
    bool frozen = false;
    for (int i = from; i != to; i += step) {
      if (!frozen) {
        y = integrate_to(
            [&](const Vec1& s) { return Vec1{field(s[0])}; }, y, x, prof.xs[i],
            opt);
        x = prof.xs[i];
        if (std::abs(y[0] - limit) < 1e-13) frozen = true;
      }
      prof.values[i] = frozen ? limit : y[0];
    }
  };

  // x = 0 is not necessarily a node; start both sweeps from the anchor value.
  int mid = n / 2;
  while (mid > 0 && prof.xs[mid] > 0.0) --mid;
  march(mid, -1, -1, left_lim);
  march(mid + 1, n, +1, right_lim);

  prof.derivs.resize(n);
  for (int i = 0; i < n; ++i) prof.derivs[i] = field(prof.values[i]);
  return prof;
}

inline void check_symmetry(const LimitProfile& prof, double tol,
                           double (*pair_residual)(const LimitProfile&, int)) {
  const int n = static_cast<int>(prof.xs.size());
  double worst = 0.0;
  for (int i = 0; i < n / 2; ++i)
    worst = std::max(worst, std::abs(pair_residual(prof, i)));
  if (worst > tol)
    throw MeshTooCoarse("profile symmetry residual " + std::to_string(worst));
}

}  // namespace detail

inline double u0_field(double u, double c0) {
  const double u2 = u * u;
  return (u2 - u2 * u2 - c0 * c0) /
         (std::sqrt(2.0) * std::sqrt(u2 * u2 + c0 * c0));
}

inline double phi0_field(double phi, double c0) { return 2.0 * c0 - std::sin(phi); }

inline double u0_slow_rate(double c0) {
  return std::sqrt(2.0) * std::sqrt(1.0 - 4.0 * c0 * c0);
}

inline double phi0_slow_rate(double c0) { return std::sqrt(1.0 - 4.0 * c0 * c0); }

/// The increasing connection of u' = (u^2-u^4-c0^2)/(sqrt2 sqrt(u^4+c0^2))
/// with u(0) = sqrt(c0), joining ubar0 to vbar0.
inline LimitProfile compute_u0(double c0, double L, int n) {
  if (!(c0 > 0.0 && c0 < 0.5)) throw BadC0("c0 must lie in (0, 1/2)");
  auto [ub0, vb0] = mixed_equilibria_limit(c0);
  LimitProfile prof = detail::integrate_scalar_profile(
      LimitKind::U0Strong, c0, L, n, std::sqrt(c0), ub0, vb0,
      [c0](double u) { return u0_field(u, c0); });
  detail::check_symmetry(prof, 1e-8, [](const LimitProfile& p, int i) {
    const int j = static_cast<int>(p.xs.size()) - 1 - i;
    return p.values[i] * p.values[j] - p.c0;  // u0(x) u0(-x) = c0
  });
  return prof;
}

inline LimitProfile compute_u0(double c0) {
  return compute_u0(c0, 12.0 / u0_slow_rate(c0), 2049);
}

/// The decreasing connection of phi' = 2 c0 - sin(phi) with phi(0) = pi/2,
/// joining pi - phibar0 to phibar0 = asin(2 c0).
inline LimitProfile compute_phi0(double c0, double L, int n) {
  if (!(c0 > 0.0 && c0 < 0.5)) throw BadC0("c0 must lie in (0, 1/2)");
  const double phibar0 = std::asin(2.0 * c0);
  LimitProfile prof = detail::integrate_scalar_profile(
      LimitKind::Phi0Weak, c0, L, n, 0.5 * M_PI, M_PI - phibar0, phibar0,
      [c0](double phi) { return phi0_field(phi, c0); });
  detail::check_symmetry(prof, 1e-8, [](const LimitProfile& p, int i) {
    const int j = static_cast<int>(p.xs.size()) - 1 - i;
    return p.values[i] + p.values[j] - M_PI;  // phi0(x) + phi0(-x) = pi
  });
  return prof;
}

inline LimitProfile compute_phi0(double c0) {
  return compute_phi0(c0, 12.0 / phi0_slow_rate(c0), 2049);
}

}  // namespace rabihet
