#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "rabihet/dynamics.hpp"
#include "rabihet/errors.hpp"
#include "rabihet/params.hpp"

namespace rabihet {

enum class EquilibriumKind { Zero, Diagonal, MixedLow, MixedHigh };

/// An equilibrium of the first-order physical system with the eigendata of
/// its 4x4 linearization. Eigenvalues come in +/- pairs; Zero and Diagonal
/// carry imaginary pairs in the segregation regime, so they are stored
/// complex. Eigenvectors are unit columns with nonnegative u-component.
struct Equilibrium {
  Vec4 point = Vec4::Zero();
  EquilibriumKind kind = EquilibriumKind::Zero;
  std::array<std::complex<double>, 4> eigenvalues{};  // sorted by real part
  Eigen::Matrix4cd eigenvectors = Eigen::Matrix4cd::Zero();
};

/// The mixed equilibrium pair (ubar, vbar): ubar*vbar = r, ubar^2+vbar^2 = 1.
inline std::pair<double, double> mixed_equilibria(const Params& par) {
  const double s = std::sqrt(1.0 - 4.0 * par.r * par.r);
  return {std::sqrt(0.5 * (1.0 - s)), std::sqrt(0.5 * (1.0 + s))};
}

// eps = 0 limits of the mixed pair (r replaced by c0).
inline std::pair<double, double> mixed_equilibria_limit(double c0) {
  const double s = std::sqrt(1.0 - 4.0 * c0 * c0);
  return {std::sqrt(0.5 * (1.0 - s)), std::sqrt(0.5 * (1.0 + s))};
}

namespace detail {

inline Equilibrium make_equilibrium(EquilibriumKind kind, double u, double v,
                                    const Params& par) {
  Equilibrium e;
  e.kind = kind;
  e.point = Vec4(u, 0.0, v, 0.0);
  Mat4 J = rhs_jacobian_physical(e.point, par);

  Eigen::EigenSolver<Mat4> solver(J);
  std::array<int, 4> idx = {0, 1, 2, 3};
  auto vals = solver.eigenvalues();
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (vals[a].real() != vals[b].real()) return vals[a].real() < vals[b].real();
    return vals[a].imag() < vals[b].imag();
  });
  for (int k = 0; k < 4; ++k) {
    e.eigenvalues[k] = vals[idx[k]];
    Eigen::Vector4cd vec = solver.eigenvectors().col(idx[k]);
    vec.normalize();
    // fix the phase: u-component nonnegative real where possible
    std::complex<double> pivot = vec[0];
    if (std::abs(pivot) < 1e-12) pivot = vec[2];
    if (std::abs(pivot) < 1e-12) pivot = vec[1];
    if (std::abs(pivot) > 0.0) vec *= std::conj(pivot) / std::abs(pivot);
    e.eigenvectors.col(k) = vec;
  }
  return e;
}

}  // namespace detail

/// All positive-quadrant-relevant equilibria: (0,0), the diagonal point, and
/// the mixed pair. (1,0) and (0,1) solve the split system only, not the
/// coupled one, and are not returned.
inline std::vector<Equilibrium> all_equilibria(const Params& par) {
  const double d = std::sqrt((1.0 + par.omega) / (1.0 + par.lambda));
  auto [ub, vb] = mixed_equilibria(par);
  std::vector<Equilibrium> out;
  out.push_back(detail::make_equilibrium(EquilibriumKind::Zero, 0.0, 0.0, par));
  out.push_back(detail::make_equilibrium(EquilibriumKind::Diagonal, d, d, par));
  out.push_back(detail::make_equilibrium(EquilibriumKind::MixedLow, ub, vb, par));
  out.push_back(detail::make_equilibrium(EquilibriumKind::MixedHigh, vb, ub, par));
  return out;
}

/// Real eigenframe of the saddle at a mixed equilibrium, built from the
/// symmetric 2x2 reduction of the 4x4 linearization. Columns of `vectors`
/// are unit eigenvectors ordered by eigenvalue; `adjoint` holds the rows of
/// vectors^-1 in the same order.
struct SaddleFrame {
  Vec4 point;
  Vec4 values;   // increasing: -mu_fast, -mu_slow, +mu_slow, +mu_fast
  Mat4 vectors;
  Mat4 adjoint;
};

inline SaddleFrame mixed_saddle_frame(const Params& par, EquilibriumKind kind) {
  if (kind != EquilibriumKind::MixedLow && kind != EquilibriumKind::MixedHigh)
    throw InputError("saddle frame is defined at the mixed equilibria only");
  auto [ub, vb] = mixed_equilibria(par);
  const double u = kind == EquilibriumKind::MixedLow ? ub : vb;
  const double v = kind == EquilibriumKind::MixedLow ? vb : ub;

  // Second-order block [[fu, fv],[fv, gv]]: mu^2 are its eigenvalues.
  const double fu = 3.0 * u * u - 1.0 + par.lambda * v * v;
  const double gv = 3.0 * v * v - 1.0 + par.lambda * u * u;
  const double fv = 2.0 * par.lambda * u * v - par.omega;
  const double mean = 0.5 * (fu + gv);
  const double disc = std::sqrt(0.25 * (fu - gv) * (fu - gv) + fv * fv);
  const double nu_slow = mean - disc, nu_fast = mean + disc;
  if (nu_slow <= 0.0)
    throw DegenerateSpectrum("mixed equilibrium lost its saddle character");
  const double mu_s = std::sqrt(nu_slow), mu_f = std::sqrt(nu_fast);

  auto plane_vector = [&](double nu) {
    Eigen::Vector2d w;
    // pick the numerically stable row
    if (std::abs(nu - fu) > std::abs(nu - gv))
      w << fv, nu - fu;
    else
      w << nu - gv, fv;
    if (w.norm() == 0.0) w << 1.0, 0.0;
    w.normalize();
    if (w[0] < 0.0) w = -w;
    return w;
  };
  const Eigen::Vector2d ws = plane_vector(nu_slow), wf = plane_vector(nu_fast);

  SaddleFrame fr;
  fr.point = Vec4(u, 0.0, v, 0.0);
  fr.values = Vec4(-mu_f, -mu_s, mu_s, mu_f);
  auto lift = [](const Eigen::Vector2d& w, double mu) {
    Vec4 col(w[0], mu * w[0], w[1], mu * w[1]);
    col.normalize();
    if (col[0] < 0.0 || (col[0] == 0.0 && col[2] < 0.0)) col = -col;
    return col;
  };
  fr.vectors.col(0) = lift(wf, -mu_f);
  fr.vectors.col(1) = lift(ws, -mu_s);
  fr.vectors.col(2) = lift(ws, mu_s);
  fr.vectors.col(3) = lift(wf, mu_f);
  fr.adjoint = fr.vectors.inverse();
  return fr;
}

/// Slow and fast rates at the mixed equilibria, classified by magnitude.
/// Strong regime: rates in x. Weak regime: rates in the slow variable
/// y = eps x (divide the x-rates by eps).
inline std::pair<double, double> slow_eigenvalues(const Params& par) {
  Equilibrium e = detail::make_equilibrium(
      EquilibriumKind::MixedLow, mixed_equilibria(par).first,
      mixed_equilibria(par).second, par);
  double mu_slow = 0.0, mu_fast = 0.0;
  for (const auto& lam : e.eigenvalues) {
    if (std::abs(lam.real()) < 1e-10)
      throw DegenerateSpectrum("eigenvalue too close to the imaginary axis");
    if (lam.real() > 0.0) {
      if (mu_slow == 0.0 || lam.real() < mu_slow) mu_slow = lam.real();
      if (lam.real() > mu_fast) mu_fast = lam.real();
    }
  }
  if (par.regime == Regime::WeakSegregation) {
    mu_slow /= par.eps;
    mu_fast /= par.eps;
  }
  return {mu_slow, mu_fast};
}

// Smallest positive rate in the x variable regardless of regime; sets the
// truncation length L = 12/mu of the solver and the limit profiles.
inline double slow_rate_x(const Params& par) {
  auto [mu_slow, mu_fast] = slow_eigenvalues(par);
  (void)mu_fast;
  return par.regime == Regime::WeakSegregation ? mu_slow * par.eps : mu_slow;
}

}  // namespace rabihet
