#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "rabihet/errors.hpp"

namespace rabihet {

enum class Regime { StrongSegregation, WeakSegregation };

inline const char* regime_name(Regime r) {
  return r == Regime::StrongSegregation ? "strong" : "weak";
}

// Detuning of omega/(lambda-1) from c0 as a function of the small parameter.
// Must be C^2 near 0 with omega_tilde(0) = 0.
using OmegaTilde = std::function<double(double)>;

inline double omega_tilde_zero(double) { return 0.0; }

/// Model parameters plus every derived quantity the other modules consume.
/// Immutable after construction; r is computed once and downstream formulas
/// never recompute omega/(lambda-1) (cancellation-prone for lambda near 1).
struct Params {
  double lambda = 0;   // intercomponent coupling, > 1
  double c0 = 0;       // target ratio, in (0, 1/2)
  Regime regime = Regime::StrongSegregation;
  double eps = 0;      // 1/sqrt(lambda-1) (strong) or sqrt(lambda-1) (weak)
  double r = 0;        // c0 + omega_tilde(eps) == omega/(lambda-1)
  double omega = 0;    // r * (lambda - 1)
  OmegaTilde omega_tilde;
};

inline Params make_params(double lambda, double c0, OmegaTilde omega_tilde,
                          Regime regime) {
  if (!(lambda > 1.0) || !std::isfinite(lambda))
    throw BadLambda("lambda must be > 1, got " + std::to_string(lambda));
  if (!(c0 > 0.0 && c0 < 0.5))
    throw BadC0("c0 must lie in (0, 1/2), got " + std::to_string(c0));
  if (!omega_tilde) omega_tilde = omega_tilde_zero;
  if (std::abs(omega_tilde(0.0)) > 1e-14)
    throw BadOmegaTilde("omega_tilde(0) must vanish");

  Params p;
  p.lambda = lambda;
  p.c0 = c0;
  p.regime = regime;
  p.eps = regime == Regime::StrongSegregation ? 1.0 / std::sqrt(lambda - 1.0)
                                              : std::sqrt(lambda - 1.0);
  p.r = c0 + omega_tilde(p.eps);
  p.omega = p.r * (lambda - 1.0);
  p.omega_tilde = std::move(omega_tilde);
  if (!(p.r > 0.0 && p.r < 0.5))
    throw RatioOutOfRange("omega/(lambda-1) = " + std::to_string(p.r) +
                          " outside (0, 1/2)");
  return p;
}

inline Params make_params(double lambda, double c0, Regime regime) {
  return make_params(lambda, c0, omega_tilde_zero, regime);
}

// Rebuild Params from a serialized (lambda, c0, omega) triple. Used by the
// readers; r is recovered from omega once, here only.
inline Params params_from_omega(double lambda, double c0, double omega,
                                Regime regime) {
  if (!(lambda > 1.0)) throw BadLambda("lambda must be > 1");
  if (!(c0 > 0.0 && c0 < 0.5)) throw BadC0("c0 must lie in (0, 1/2)");
  Params p;
  p.lambda = lambda;
  p.c0 = c0;
  p.regime = regime;
  p.eps = regime == Regime::StrongSegregation ? 1.0 / std::sqrt(lambda - 1.0)
                                              : std::sqrt(lambda - 1.0);
  p.r = omega / (lambda - 1.0);
  p.omega = omega;
  p.omega_tilde = nullptr;
  if (!(p.r > 0.0 && p.r < 0.5))
    throw RatioOutOfRange("omega/(lambda-1) outside (0, 1/2)");
  return p;
}

}  // namespace rabihet
