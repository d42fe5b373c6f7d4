#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "rabihet/errors.hpp"
#include "rabihet/params.hpp"

// Vector fields, coordinate transforms and conserved quantities. Everything
// here is hand-coded from the displayed equations, not derived from the
// Hamiltonians; the Hamiltonians act as independent cross-checks.
namespace rabihet {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// State layouts:
//   PhysicalUV    (u, u', v, v')
//   HyperbolaPQUZ (p, q, u, z)        p = (uv - r)/eps^2, q = eps p', z = u'
//   PolarBlowup   (w1, w2, phi1, phi2) in the slow variable y = eps x
enum class CoordFrame { PhysicalUV, HyperbolaPQUZ, PolarBlowup };

enum class HamiltonianKind {
  FullH,       // PhysicalUV
  TildeH,      // HyperbolaPQUZ, written in (h, u) variables
  HatHStrong,  // HyperbolaPQUZ, strong-regime scaling
  H0Reduced,   // HyperbolaPQUZ, eps = 0 limit on the slow manifold
  HatHWeak,    // PolarBlowup
  HredWeak     // PolarBlowup, eps = 0 reduced system
};

namespace detail {

constexpr double kHyperbolaUMin = 1e-8;

// One component of the coupled cubic system; the other is the same function
// with the arguments swapped. Keeping a single implementation makes the
// u<->v swap symmetry exact in floating point.
inline double cubic_rhs(double a, double b, double lambda, double omega) {
  return a * a * a - a + lambda * b * b * a - omega * b;
}

}  // namespace detail

// The reversing symmetry (u,u',v,v') -> (v,-v',u,-u'). If y(x) solves the
// physical system then swap_state(y(-x)) does too.
inline Vec4 swap_state(const Vec4& y) { return Vec4(y[2], -y[3], y[0], -y[1]); }

inline Vec4 rhs(CoordFrame frame, const Vec4& y, const Params& par) {
  const double lam = par.lambda, om = par.omega, r = par.r, eps = par.eps;
  switch (frame) {
    case CoordFrame::PhysicalUV: {
      const double u = y[0], du = y[1], v = y[2], dv = y[3];
      return Vec4(du, detail::cubic_rhs(u, v, lam, om), dv,
                  detail::cubic_rhs(v, u, lam, om));
    }
    case CoordFrame::HyperbolaPQUZ: {
      const double p = y[0], q = y[1], u = y[2], z = y[3];
      if (u < detail::kHyperbolaUMin)
        throw DomainViolation("hyperbola frame requires u > 0");
      const double e2 = eps * eps;
      const double hr = e2 * p + r;  // uv
      const double G = ((1.0 + 2.0 * e2) * p + 2.0 * r) *
                           (u * u + hr * hr / (u * u)) -
                       2.0 * e2 * p - 2.0 * r * (1.0 + z * z / (u * u)) +
                       2.0 * eps * (z / u) * q - 2.0 * e2 * (z * z / (u * u)) * p;
      const double dz =
          u * u * u - u + (hr / u) * ((1.0 + e2) * p + r);
      return Vec4(q / eps, G / eps, z, dz);
    }
    case CoordFrame::PolarBlowup: {
      const double w1 = y[0], w2 = y[1], f1 = y[2], f2 = y[3];
      const double e2 = eps * eps;
      const double R = 1.0 - e2 * w1;
      if (R <= 0.0) throw DomainViolation("polar blow-up requires R > 0");
      if (!(f1 > 0.0 && f1 < M_PI))
        throw DomainViolation("polar blow-up requires phi1 in (0, pi)");
      const double s = std::sin(f1), c = std::cos(f1);
      const double W = -0.25 * R * f2 * f2 - R * (e2 * w1 * w1 - 2.0 * w1) -
                       0.5 * R * R * R * s * s + r * R * s;
      const double df2 =
          2.0 * eps * w2 * f2 / R + 0.5 * R * R * 2.0 * s * c - 2.0 * r * c;
      return Vec4(w2 / eps, W / eps, f2, df2);
    }
  }
  throw Error("unreachable");
}

/// Hand-differentiated Jacobian of the physical vector field.
inline Mat4 rhs_jacobian_physical(const Vec4& y, const Params& par) {
  const double lam = par.lambda, om = par.omega;
  const double u = y[0], v = y[2];
  Mat4 A = Mat4::Zero();
  A(0, 1) = 1.0;
  A(1, 0) = 3.0 * u * u - 1.0 + lam * v * v;
  A(1, 2) = 2.0 * lam * u * v - om;
  A(2, 3) = 1.0;
  A(3, 0) = 2.0 * lam * u * v - om;
  A(3, 2) = 3.0 * v * v - 1.0 + lam * u * u;
  return A;
}

/// Central finite differences, the fallback for the diagnostic frames and
/// behind the solver's fd_jacobian flag.
inline Mat4 rhs_jacobian_fd(CoordFrame frame, const Vec4& y, const Params& par) {
  Mat4 A;
  for (int j = 0; j < 4; ++j) {
    const double dj = 1e-6 * std::max(1.0, std::abs(y[j]));
    Vec4 yp = y, ym = y;
    yp[j] += dj;
    ym[j] -= dj;
    A.col(j) = (rhs(frame, yp, par) - rhs(frame, ym, par)) / (2.0 * dj);
  }
  return A;
}

inline Mat4 rhs_jacobian(CoordFrame frame, const Vec4& y, const Params& par) {
  if (frame == CoordFrame::PhysicalUV) return rhs_jacobian_physical(y, par);
  return rhs_jacobian_fd(frame, y, par);
}

namespace detail {

inline Vec4 physical_to_hyperbola(const Vec4& y, const Params& par) {
  const double u = y[0], du = y[1], v = y[2], dv = y[3];
  if (u <= 0.0 || v <= 0.0)
    throw DomainViolation("physical state must have u > 0, v > 0");
  const double e2 = par.eps * par.eps;
  const double p = (u * v - par.r) / e2;
  const double q = (du * v + u * dv) / par.eps;
  return Vec4(p, q, u, du);
}

inline Vec4 hyperbola_to_physical(const Vec4& y, const Params& par) {
  const double p = y[0], q = y[1], u = y[2], z = y[3];
  if (u < kHyperbolaUMin) throw DomainViolation("hyperbola frame requires u > 0");
  const double e2 = par.eps * par.eps;
  const double v = (e2 * p + par.r) / u;
  const double dv = (par.eps * q - z * v) / u;
  return Vec4(u, z, v, dv);
}

inline Vec4 physical_to_polar(const Vec4& y, const Params& par) {
  const double u = y[0], du = y[1], v = y[2], dv = y[3];
  if (u <= 0.0 || v <= 0.0)
    throw DomainViolation("physical state must have u > 0, v > 0");
  const double e2 = par.eps * par.eps;
  const double R = std::hypot(u, v);
  const double phi = 2.0 * std::atan2(v, u);  // in (0, pi) for u, v > 0
  const double Rdot = (u * du + v * dv) / R;
  const double phidot_x = 2.0 * (u * dv - v * du) / (R * R);
  const double w1 = (1.0 - R) / e2;
  const double w2 = -Rdot / e2;  // = eps * dw1/dy
  const double f2 = phidot_x / par.eps;
  return Vec4(w1, w2, phi, f2);
}

inline Vec4 polar_to_physical(const Vec4& y, const Params& par) {
  const double w1 = y[0], w2 = y[1], f1 = y[2], f2 = y[3];
  const double e2 = par.eps * par.eps;
  const double R = 1.0 - e2 * w1;
  if (R <= 0.0) throw DomainViolation("polar blow-up requires R > 0");
  const double c = std::cos(0.5 * f1), s = std::sin(0.5 * f1);
  const double Rdot = -e2 * w2;
  const double phidot_x = par.eps * f2;
  return Vec4(R * c, Rdot * c - 0.5 * R * s * phidot_x, R * s,
              Rdot * s + 0.5 * R * c * phidot_x);
}

}  // namespace detail

/// Exact algebraic change of variables between frames (round trips are
/// identity to roundoff). PhysicalUV is the hub.
inline Vec4 to_frame(CoordFrame target, CoordFrame source, const Vec4& y,
                     const Params& par) {
  if (target == source) return y;
  Vec4 phys = y;
  switch (source) {
    case CoordFrame::PhysicalUV: break;
    case CoordFrame::HyperbolaPQUZ: phys = detail::hyperbola_to_physical(y, par); break;
    case CoordFrame::PolarBlowup: phys = detail::polar_to_physical(y, par); break;
  }
  switch (target) {
    case CoordFrame::PhysicalUV: return phys;
    case CoordFrame::HyperbolaPQUZ: return detail::physical_to_hyperbola(phys, par);
    case CoordFrame::PolarBlowup: return detail::physical_to_polar(phys, par);
  }
  throw Error("unreachable");
}

inline double hamiltonian(HamiltonianKind kind, const Vec4& y, const Params& par) {
  const double k = par.lambda - 1.0, r = par.r, eps = par.eps, c0 = par.c0;
  switch (kind) {
    case HamiltonianKind::FullH: {
      const double u = y[0], du = y[1], v = y[2], dv = y[3];
      const double a = 1.0 - u * u - v * v;
      const double b = u * v - r;
      return 0.5 * du * du + 0.5 * dv * dv - 0.25 * a * a - 0.5 * k * b * b;
    }
    case HamiltonianKind::TildeH: {
      const double p = y[0], q = y[1], u = y[2], z = y[3];
      if (u < detail::kHyperbolaUMin)
        throw DomainViolation("hyperbola frame requires u > 0");
      const double h = eps * eps * p, hp = eps * q;
      const double num = hp * u - (h + r) * z;
      const double a = 1.0 - u * u - (h + r) * (h + r) / (u * u);
      return 0.5 * z * z + 0.5 * num * num / (u * u * u * u) - 0.25 * a * a -
             0.5 * k * h * h;
    }
    case HamiltonianKind::HatHStrong: {
      const double p = y[0], q = y[1], u = y[2], z = y[3];
      if (u < detail::kHyperbolaUMin)
        throw DomainViolation("hyperbola frame requires u > 0");
      const double hr = eps * eps * p + r;
      const double num = eps * q * u - hr * z;
      const double a = 1.0 - u * u - hr * hr / (u * u);
      return 0.5 * z * z + 0.5 * num * num / (u * u * u * u) - 0.25 * a * a -
             0.5 * eps * eps * p * p;
    }
    case HamiltonianKind::H0Reduced: {
      const double u = y[2], z = y[3];
      if (u < detail::kHyperbolaUMin)
        throw DomainViolation("reduced system requires u > 0");
      const double a = 1.0 - u * u - c0 * c0 / (u * u);
      return 0.5 * (1.0 + c0 * c0 / (u * u * u * u)) * z * z - 0.25 * a * a;
    }
    case HamiltonianKind::HatHWeak: {
      const double w1 = y[0], w2 = y[1], f1 = y[2], f2 = y[3];
      const double e2 = eps * eps;
      const double R = 1.0 - e2 * w1;
      if (R <= 0.0) throw DomainViolation("polar blow-up requires R > 0");
      const double a = 0.5 * R * R * std::sin(f1) - r;
      const double bulk = e2 * w2 * w2 + 0.25 * R * R * f2 * f2 -
                          0.5 * e2 * std::pow(2.0 * w1 - e2 * w1 * w1, 2) -
                          a * a;
      return 0.5 * e2 * bulk;
    }
    case HamiltonianKind::HredWeak: {
      const double f1 = y[2], f2 = y[3];
      const double s = std::sin(f1) - 2.0 * c0;
      return 0.5 * f2 * f2 - 0.5 * s * s;
    }
  }
  throw Error("unreachable");
}

/// Gradient of FullH in PhysicalUV coordinates. The physical system is
/// canonical: rhs = (H_du, -H_u, H_dv, -H_v), which the tests exploit.
inline Vec4 full_h_gradient(const Vec4& y, const Params& par) {
  const double k = par.lambda - 1.0, r = par.r;
  const double u = y[0], du = y[1], v = y[2], dv = y[3];
  const double a = 1.0 - u * u - v * v;
  const double b = u * v - r;
  return Vec4(u * a - k * v * b, du, v * a - k * u * b, dv);
}

inline Mat4 full_h_hessian(const Vec4& y, const Params& par) {
  const double k = par.lambda - 1.0, r = par.r;
  const double u = y[0], v = y[2];
  const double huu = 1.0 - 3.0 * u * u - v * v - k * v * v;
  const double hvv = 1.0 - u * u - 3.0 * v * v - k * u * u;
  const double huv = -2.0 * u * v - k * (2.0 * u * v - r);
  Mat4 H = Mat4::Zero();
  H(0, 0) = huu;
  H(0, 2) = huv;
  H(2, 0) = huv;
  H(2, 2) = hvv;
  H(1, 1) = 1.0;
  H(3, 3) = 1.0;
  return H;
}

}  // namespace rabihet
