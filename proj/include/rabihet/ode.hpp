#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "rabihet/errors.hpp"

namespace rabihet {

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  std::int64_t max_steps = 4'000'000;
  double max_norm = 1e8;  // abort when the state blows past this
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double dp_c2 = 1.0 / 5, dp_c3 = 3.0 / 10, dp_c4 = 4.0 / 5,
                        dp_c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                        e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640,
                        e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace detail

/// Advance y from x0 to x1 (either direction) with adaptive Dormand-Prince
/// steps, never stepping past x1. Vec is any fixed-size Eigen vector.
/// Returns the state at x1.
template <class Vec, class F>
Vec integrate_to(F&& f, Vec y, double x0, double x1, const OdeOptions& opt = {}) {
  using namespace detail;
  const double dir = x1 >= x0 ? 1.0 : -1.0;
  double x = x0;
  double span = std::abs(x1 - x0);
  if (span == 0.0) return y;

  Vec k1 = f(y);
  double h = dir * std::min(span, 1e-2);

  for (std::int64_t step = 0; step < opt.max_steps; ++step) {
    if (dir * (x + h - x1) > 0.0) h = x1 - x;

    Vec k2 = f(y + h * (a21 * k1));
    Vec k3 = f(y + h * (a31 * k1 + a32 * k2));
    Vec k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Vec k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vec k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vec ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vec k7 = f(ynew);
    Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double enorm = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      double sc = opt.atol +
                  opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      enorm = std::max(enorm, std::abs(err[i]) / sc);
    }

    if (enorm <= 1.0) {
      x += h;
      y = ynew;
      k1 = k7;  // FSAL
      if (y.norm() > opt.max_norm)
        throw NumericalError("ODE state norm exceeded " +
                             std::to_string(opt.max_norm));
      if (x == x1 || std::abs(x - x1) < 1e-14 * (std::abs(x1) + 1.0)) return y;
    }
    double fac = enorm > 0.0 ? 0.9 * std::pow(enorm, -0.2) : 5.0;
    h *= std::clamp(fac, 0.2, 5.0);
    if (std::abs(h) < 1e-15 * (std::abs(x) + 1.0))
      throw NumericalError("ODE step size collapsed at x = " +
                           std::to_string(x));
  }
  throw NumericalError("ODE max step count exceeded");
}

}  // namespace rabihet
