#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rabihet/dynamics.hpp"
#include "rabihet/equilibria.hpp"
#include "rabihet/errors.hpp"
#include "rabihet/limit_profiles.hpp"
#include "rabihet/params.hpp"

// Heteroclinic boundary-value solver: 4th-order MIRK collocation (condensed
// 3-point Lobatto IIIA) on the physical first-order system, Newton with
// backtracking, projection boundary conditions from the saddle eigenframes,
// and the phase condition u(0) = v(0).
//
// The conserved Hamiltonian makes the plain square system with three
// projection conditions nearly singular (it acquires an e^(-mu L) singular
// value through the adjoint solution grad H(y(x))). We therefore solve the
// standard regularized formulation: the field is augmented to
// f + lambda_unf * grad H with a scalar unknown lambda_unf, all four
// projection conditions are kept, and lambda_unf vanishes at any true
// solution. The discrete system stays square (4n+1) and, unlike the
// dropped-condition variant, is exactly mirror symmetric, which is what makes
// u(-x) = v(x) hold at the solver tolerance instead of the truncation error.
namespace rabihet {

enum class Damping { None, Backtracking };

struct SolveOptions {
  int n = 1025;         // mesh nodes, odd so that x = 0 is a node
  double L = 0.0;       // half-length; <= 0 means 12 / mu_slow (x variable)
  double tol = 1e-10;   // Newton residual tolerance (inf norm)
  int max_iters = 25;
  Damping damping = Damping::Backtracking;
  bool fd_jacobian = false;   // finite-difference fallback
  bool graded_mesh = false;   // sinh grading toward x = 0
};

struct Diagnostics {
  double hamiltonian_drift = 0;  // max node |FullH|
  double bc_residual = 0;        // max projection/phase residual
  double final_residual = 0;     // Newton residual at exit
  int newton_iters = 0;
  double unfolding_lambda = 0;   // ~0 at a genuine solution
  double condition_estimate = 0;
  double refinement_delta = 0;   // set by refine()
  double tol = 0;                // Newton tolerance the solve was asked for
};

/// A (candidate or converged) heteroclinic profile in PhysicalUV coordinates.
struct Profile {
  Params params;
  std::vector<double> xs;
  std::vector<Vec4> states;
  int phase_anchor = 0;  // node where u = v is enforced
  Diagnostics diagnostics;

  int n() const { return static_cast<int>(xs.size()); }
  double L() const { return xs.empty() ? 0.0 : xs.back(); }
};

namespace detail {

inline const Mat4 kSwap = [] {
  Mat4 S = Mat4::Zero();
  S(0, 2) = 1.0;
  S(1, 3) = -1.0;
  S(2, 0) = 1.0;
  S(3, 1) = -1.0;
  return S;
}();

inline std::vector<double> make_mesh(int n, double L, bool graded) {
  if (n < 129 || n % 2 == 0)
    throw InputError("mesh must have an odd node count >= 129");
  std::vector<double> xs(n);
  const double beta = 2.0;
  for (int i = 0; i < n; ++i) {
    const double s = -1.0 + 2.0 * i / (n - 1);
    xs[i] = graded ? L * std::sinh(beta * s) / std::sinh(beta) : L * s;
  }
  xs[(n - 1) / 2] = 0.0;
  return xs;
}

/// Cubic Hermite interpolation of a profile, derivatives from the vector
/// field. Used for re-meshing only, never for measurements.
inline Vec4 interp_state(const Profile& prof, double x) {
  const auto& xs = prof.xs;
  if (x <= xs.front()) return prof.states.front();
  if (x >= xs.back()) return prof.states.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = (it - xs.begin()) - 1;
  const double h = xs[i + 1] - xs[i];
  const double t = (x - xs[i]) / h;
  const Vec4 y0 = prof.states[i], y1 = prof.states[i + 1];
  const Vec4 d0 = rhs(CoordFrame::PhysicalUV, y0, prof.params);
  const Vec4 d1 = rhs(CoordFrame::PhysicalUV, y1, prof.params);
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

struct NewtonSystem {
  const Params& par;
  const SolveOptions& opts;
  const std::vector<double>& xs;
  Vec4 e_minus, e_plus;
  Eigen::Matrix<double, 2, 4> w_left, w_right;
  int n;
  int phase_anchor;

  NewtonSystem(const Params& p, const SolveOptions& o,
               const std::vector<double>& mesh, int anchor)
      : par(p), opts(o), xs(mesh), n(static_cast<int>(mesh.size())),
        phase_anchor(anchor) {
    SaddleFrame fr = mixed_saddle_frame(par, EquilibriumKind::MixedLow);
    e_minus = fr.point;
    e_plus = kSwap * e_minus;
    // rows 0,1 of the adjoint belong to -mu_fast, -mu_slow: the stable
    // subspace at the left equilibrium. Their images under the reversing
    // symmetry are exactly the unstable adjoint rows at the right one, so
    // the right conditions are built from the same rows and the discrete
    // system is mirror symmetric to the last bit.
    for (int k = 0; k < 2; ++k) {
      Eigen::RowVector4d w = fr.adjoint.row(k);
      w.normalize();
      w_left.row(k) = w;
      w_right.row(k) = w * kSwap;
    }
  }

  Vec4 g(const Vec4& y, double lam_unf) const {
    Vec4 out = rhs(CoordFrame::PhysicalUV, y, par);
    if (lam_unf != 0.0) out += lam_unf * full_h_gradient(y, par);
    return out;
  }

  Mat4 dg(const Vec4& y, double lam_unf) const {
    Mat4 A;
    if (opts.fd_jacobian) {
      for (int j = 0; j < 4; ++j) {
        const double dj = 1e-6 * std::max(1.0, std::abs(y[j]));
        Vec4 yp = y, ym = y;
        yp[j] += dj;
        ym[j] -= dj;
        A.col(j) = (g(yp, lam_unf) - g(ym, lam_unf)) / (2.0 * dj);
      }
    } else {
      A = rhs_jacobian_physical(y, par);
      if (lam_unf != 0.0) A += lam_unf * full_h_hessian(y, par);
    }
    return A;
  }

  int size() const { return 4 * n + 1; }

  Eigen::VectorXd residual(const Eigen::VectorXd& Y) const {
    const double lam_unf = Y[4 * n];
    Eigen::VectorXd F(size());
    auto node = [&](int i) { return Vec4(Y.segment<4>(4 * i)); };

    F.segment<2>(0) = w_left * (node(0) - e_minus);
    for (int i = 0; i < n - 1; ++i) {
      const double h = xs[i + 1] - xs[i];
      const Vec4 yi = node(i), yj = node(i + 1);
      const Vec4 gi = g(yi, lam_unf), gj = g(yj, lam_unf);
      const Vec4 ym = 0.5 * (yi + yj) - (h / 8.0) * (gj - gi);
      const Vec4 gm = g(ym, lam_unf);
      F.segment<4>(2 + 4 * i) =
          (yj - yi - (h / 6.0) * (gi + 4.0 * gm + gj)) / h;
    }
    F.segment<2>(4 * n - 2) = w_right * (node(n - 1) - e_plus);
    F[4 * n] = Y[4 * phase_anchor + 0] - Y[4 * phase_anchor + 2];
    return F;
  }

  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& Y) const {
    const double lam_unf = Y[4 * n];
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(40 * n);
    auto node = [&](int i) { return Vec4(Y.segment<4>(4 * i)); };
    auto add_block = [&](int row0, int col0, const Mat4& B) {
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          if (B(a, b) != 0.0) trip.emplace_back(row0 + a, col0 + b, B(a, b));
    };

    for (int k = 0; k < 2; ++k)
      for (int b = 0; b < 4; ++b)
        trip.emplace_back(k, b, w_left(k, b));

    for (int i = 0; i < n - 1; ++i) {
      const double h = xs[i + 1] - xs[i];
      const Vec4 yi = node(i), yj = node(i + 1);
      const Vec4 gi = g(yi, lam_unf), gj = g(yj, lam_unf);
      const Vec4 ym = 0.5 * (yi + yj) - (h / 8.0) * (gj - gi);
      const Mat4 Ai = dg(yi, lam_unf), Aj = dg(yj, lam_unf);
      const Mat4 Am = dg(ym, lam_unf);
      const Mat4 I = Mat4::Identity();

      const Mat4 dym_dyi = 0.5 * I + (h / 8.0) * Ai;
      const Mat4 dym_dyj = 0.5 * I - (h / 8.0) * Aj;
      const Mat4 dFi = (-I - (h / 6.0) * (Ai + 4.0 * Am * dym_dyi)) / h;
      const Mat4 dFj = (I - (h / 6.0) * (Aj + 4.0 * Am * dym_dyj)) / h;
      add_block(2 + 4 * i, 4 * i, dFi);
      add_block(2 + 4 * i, 4 * (i + 1), dFj);

      const Vec4 hi = full_h_gradient(yi, par), hj = full_h_gradient(yj, par);
      const Vec4 hm = full_h_gradient(ym, par);
      const Vec4 dym_dl = -(h / 8.0) * (hj - hi);
      const Vec4 dF_dl = (-(h / 6.0) * (hi + hj + 4.0 * (hm + Am * dym_dl))) / h;
      for (int a = 0; a < 4; ++a)
        if (dF_dl[a] != 0.0) trip.emplace_back(2 + 4 * i + a, 4 * n, dF_dl[a]);
    }

    for (int k = 0; k < 2; ++k)
      for (int b = 0; b < 4; ++b)
        trip.emplace_back(4 * n - 2 + k, 4 * (n - 1) + b, w_right(k, b));
    trip.emplace_back(4 * n, 4 * phase_anchor + 0, 1.0);
    trip.emplace_back(4 * n, 4 * phase_anchor + 2, -1.0);

    Eigen::SparseMatrix<double> J(size(), size());
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }
};

inline bool in_domain(const Eigen::VectorXd& Y, int n) {
  for (int i = 0; i < n; ++i)
    if (Y[4 * i] <= 0.0 || Y[4 * i + 2] <= 0.0) return false;
  return true;
}

}  // namespace detail

/// Strong regime: u = u0, v = r/u0 (uv = r holds exactly, the leading-order
/// product estimate). Weak regime: R = 1, phi = phi0(eps x).
inline Profile initial_guess(const Params& par, const LimitProfile& limit,
                             const SolveOptions& opts = {}) {
  const bool strong = par.regime == Regime::StrongSegregation;
  if (strong != (limit.kind == LimitKind::U0Strong))
    throw RegimeMismatch("limit profile kind does not match the regime");

  Profile prof;
  prof.params = par;
  const double L = opts.L > 0.0 ? opts.L : 12.0 / slow_rate_x(par);
  prof.xs = detail::make_mesh(opts.n, L, opts.graded_mesh);
  prof.phase_anchor = (opts.n - 1) / 2;
  prof.states.resize(opts.n);

  for (int i = 0; i < opts.n; ++i) {
    const double x = prof.xs[i];
    if (strong) {
      auto [u, du] = limit.sample(std::clamp(x, -limit.L, limit.L));
      const double v = par.r / u;
      prof.states[i] = Vec4(u, du, v, -par.r * du / (u * u));
    } else {
      const double arg = std::clamp(par.eps * x, -limit.L, limit.L);
      auto [phi, dphi_y] = limit.sample(arg);
      const double dphi = par.eps * dphi_y;
      const double c = std::cos(0.5 * phi), s = std::sin(0.5 * phi);
      prof.states[i] = Vec4(c, -0.5 * s * dphi, s, 0.5 * c * dphi);
    }
  }
  return prof;
}

/// Newton iteration on the collocation system. Throws NewtonDiverged,
/// LeftDomain or IllConditioned; returns a converged Profile otherwise.
inline Profile solve(const Params& par, const Profile& guess,
                     const SolveOptions& opts = {}) {
  const int n = guess.n();
  if (n < 129 || n % 2 == 0)
    throw InputError("mesh must have an odd node count >= 129");
  if (guess.phase_anchor < 0 || guess.phase_anchor >= n ||
      std::abs(guess.xs[guess.phase_anchor]) > 1e-12)
    throw InputError("phase anchor must sit at x = 0");

  detail::NewtonSystem sys(par, opts, guess.xs, guess.phase_anchor);

  Eigen::VectorXd Y(sys.size());
  for (int i = 0; i < n; ++i) Y.segment<4>(4 * i) = guess.states[i];
  Y[4 * n] = 0.0;
  if (!detail::in_domain(Y, n)) throw LeftDomain("guess has u or v <= 0");

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  double res = 0.0, cond_est = 0.0;
  int iters = 0;
  bool converged = false;
  const double floor_res = std::min(opts.tol, 1e-13);

  Eigen::VectorXd F = sys.residual(Y);
  res = F.lpNorm<Eigen::Infinity>();
  std::mt19937 probe_rng(12345);

  for (int it = 0; it < opts.max_iters; ++it) {
    if (res <= floor_res) { converged = true; break; }
    Eigen::SparseMatrix<double> J = sys.jacobian(Y);
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw IllConditioned("Newton matrix factorization failed");
    Eigen::VectorXd d = lu.solve(-F);
    ++iters;

    if (it == 0) {
      // condition probe: ||J||_inf times a sampled lower bound of ||J^-1||_inf
      Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(sys.size());
      for (int k = 0; k < J.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator c(J, k); c; ++c)
          rowsum[c.row()] += std::abs(c.value());
      const double jnorm = rowsum.maxCoeff();
      double inv_norm = d.lpNorm<Eigen::Infinity>() /
                        std::max(F.lpNorm<Eigen::Infinity>(), 1e-300);
      std::uniform_int_distribution<int> coin(0, 1);
      for (int probe = 0; probe < 2; ++probe) {
        Eigen::VectorXd b(sys.size());
        for (int k = 0; k < b.size(); ++k) b[k] = coin(probe_rng) ? 1.0 : -1.0;
        inv_norm = std::max(inv_norm, lu.solve(b).lpNorm<Eigen::Infinity>());
      }
      cond_est = jnorm * inv_norm;
      if (cond_est > 1e14)
        throw IllConditioned("condition estimate " + std::to_string(cond_est));
    }

    bool accepted = false, domain_blocked = false;
    double alpha = 1.0;
    const int max_halvings = opts.damping == Damping::Backtracking ? 20 : 1;
    for (int half = 0; half < max_halvings; ++half, alpha *= 0.5) {
      Eigen::VectorXd Ynew = Y + alpha * d;
      if (!detail::in_domain(Ynew, n)) {
        domain_blocked = true;
        if (opts.damping == Damping::None) break;
        continue;
      }
      Eigen::VectorXd Fnew = sys.residual(Ynew);
      double rnew = Fnew.lpNorm<Eigen::Infinity>();
      if (rnew <= (1.0 - 1e-4 * alpha) * res) {
        Y = std::move(Ynew);
        F = std::move(Fnew);
        res = rnew;
        accepted = true;
        break;
      }
      if (opts.damping == Damping::None) break;
    }
    if (!accepted) {
      if (res <= opts.tol) { converged = true; break; }  // at roundoff floor
      if (domain_blocked)
        throw LeftDomain("iterate left the positive quadrant");
      throw NewtonDiverged("line search stalled at residual " +
                           std::to_string(res));
    }
  }
  if (!converged && res > opts.tol)
    throw NewtonDiverged("residual " + std::to_string(res) + " after " +
                         std::to_string(iters) + " iterations");

  Profile out;
  out.params = par;
  out.xs = guess.xs;
  out.phase_anchor = guess.phase_anchor;
  out.states.resize(n);
  for (int i = 0; i < n; ++i) out.states[i] = Y.segment<4>(4 * i);

  Diagnostics& diag = out.diagnostics;
  diag.tol = opts.tol;
  diag.final_residual = res;
  diag.newton_iters = iters;
  diag.unfolding_lambda = Y[4 * n];
  diag.condition_estimate = cond_est;
  for (int i = 0; i < n; ++i)
    diag.hamiltonian_drift =
        std::max(diag.hamiltonian_drift,
                 std::abs(hamiltonian(HamiltonianKind::FullH, out.states[i], par)));
  Eigen::Vector2d bl = sys.w_left * (out.states.front() - sys.e_minus);
  Eigen::Vector2d br = sys.w_right * (out.states.back() - sys.e_plus);
  diag.bc_residual = std::max({bl.lpNorm<Eigen::Infinity>(),
                               br.lpNorm<Eigen::Infinity>(),
                               std::abs(out.states[out.phase_anchor][0] -
                                        out.states[out.phase_anchor][2])});
  return out;
}

inline Profile solve_from_limit(const Params& par, const SolveOptions& opts = {}) {
  LimitProfile limit = par.regime == Regime::StrongSegregation
                           ? compute_u0(par.c0)
                           : compute_phi0(par.c0);
  return solve(par, initial_guess(par, limit, opts), opts);
}

/// Each solve is seeded by the previous profile, re-meshed (and x-rescaled by
/// the ratio of truncation lengths, which tracks the slow rate).
inline std::vector<Profile> continue_in_lambda(const std::vector<Params>& path,
                                               const SolveOptions& opts = {}) {
  if (path.empty()) return {};
  for (std::size_t i = 1; i < path.size(); ++i) {
    const bool inc = path[1].lambda > path[0].lambda;
    if (inc != (path[i].lambda > path[i - 1].lambda))
      throw InputError("continuation path must be monotone in lambda");
  }

  std::vector<Profile> out;
  out.reserve(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Params& par = path[k];
    try {
      if (k == 0) {
        out.push_back(solve_from_limit(par, opts));
      } else {
        const Profile& prev = out.back();
        Profile seed;
        seed.params = par;
        const double L = opts.L > 0.0 ? opts.L : 12.0 / slow_rate_x(par);
        seed.xs = detail::make_mesh(opts.n, L, opts.graded_mesh);
        seed.phase_anchor = (opts.n - 1) / 2;
        seed.states.resize(opts.n);
        const double sigma = prev.L() / L;
        for (int i = 0; i < opts.n; ++i) {
          Vec4 s = detail::interp_state(prev, sigma * seed.xs[i]);
          s[1] *= sigma;
          s[3] *= sigma;
          seed.states[i] = s;
        }
        out.push_back(solve(par, seed, opts));
      }
    } catch (const NumericalError& err) {
      throw ContinuationStalled("lambda = " + std::to_string(par.lambda) +
                                ": " + err.what());
    }
  }
  return out;
}

/// Re-solve on a mesh with every interval split `factor` ways, seeded by
/// interpolation; diagnostics.refinement_delta holds the max change at the
/// shared nodes (a discretization-error estimate).
inline Profile refine(const Profile& prof, int factor,
                      const SolveOptions& opts = {}) {
  if (factor < 2 || factor > 4) throw InputError("refine factor must be 2, 3 or 4");
  const int n = prof.n();
  Profile seed;
  seed.params = prof.params;
  seed.xs.reserve((n - 1) * factor + 1);
  for (int i = 0; i < n - 1; ++i)
    for (int k = 0; k < factor; ++k)
      seed.xs.push_back(prof.xs[i] +
                        (prof.xs[i + 1] - prof.xs[i]) * k / factor);
  seed.xs.push_back(prof.xs.back());
  const int nn = static_cast<int>(seed.xs.size());
  seed.phase_anchor = prof.phase_anchor * factor;
  seed.states.resize(nn);
  for (int i = 0; i < nn; ++i)
    seed.states[i] = detail::interp_state(prof, seed.xs[i]);

  Profile fine = solve(prof.params, seed, opts);
  double delta = 0.0;
  for (int i = 0; i < n; ++i)
    delta = std::max(delta, (fine.states[i * factor] - prof.states[i])
                                .lpNorm<Eigen::Infinity>());
  fine.diagnostics.refinement_delta = delta;
  return fine;
}

}  // namespace rabihet
