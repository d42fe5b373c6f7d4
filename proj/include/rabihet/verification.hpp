#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rabihet/asymptotics.hpp"
#include "rabihet/bvp.hpp"
#include "rabihet/equilibria.hpp"
#include "rabihet/limit_profiles.hpp"
#include "rabihet/ode.hpp"

// The acceptance pipeline: every strong- and weak-coupling asymptotic
// estimate checked at desk scale. Each criterion yields one record; fits
// whose ladder spans less than a decade run in the squared variable and the
// slope is converted back exactly (log eps^2 = 2 log eps).
namespace rabihet {

struct CriterionResult {
  std::string id;
  std::string description;
  double measured = 0;   // fitted slope or measured value
  double expected = 0;
  double tolerance = 0;  // |measured - expected| <= tolerance passes
  double r_squared = 1;
  bool pass = false;
};

inline EstimateRecord to_record(const CriterionResult& c) {
  return {c.id, c.measured, c.expected, c.tolerance, c.pass, c.r_squared};
}

namespace detail {

inline CriterionResult value_criterion(const std::string& id,
                                       const std::string& desc, double measured,
                                       double bound) {
  CriterionResult c;
  c.id = id;
  c.description = desc;
  c.measured = measured;
  c.expected = 0.0;
  c.tolerance = bound;
  c.pass = measured <= bound;
  return c;
}

inline CriterionResult slope_criterion(const std::string& id,
                                       const std::string& desc,
                                       const RateFit& fit_in_squared_var,
                                       double expected, double tol) {
  CriterionResult c;
  c.id = id;
  c.description = desc;
  c.measured = 2.0 * fit_in_squared_var.slope;
  c.expected = expected;
  c.tolerance = tol;
  c.r_squared = fit_in_squared_var.r_squared;
  c.pass = std::abs(c.measured - expected) <= tol;
  return c;
}

inline double mirror_symmetry_residual(const Profile& prof) {
  double worst = 0.0;
  const int n = prof.n();
  for (int i = 0; i < n; ++i)
    worst = std::max(worst,
                     std::abs(prof.states[i][0] - prof.states[n - 1 - i][2]));
  return worst;
}

}  // namespace detail

struct VerificationRun {
  double c0 = 0.25;
  std::vector<CriterionResult> criteria;
  std::vector<EstimateRecord> records() const {
    std::vector<EstimateRecord> out;
    for (const auto& c : criteria) out.push_back(to_record(c));
    return out;
  }
  bool all_pass() const {
    for (const auto& c : criteria)
      if (!c.pass) return false;
    return true;
  }
};

inline int verification_threads() {
  if (const char* env = std::getenv("RABI_HET_THREADS")) {
    int k = std::atoi(env);
    if (k >= 1) return k;
  }
  return 2;
}

inline VerificationRun run_verification(double c0 = 0.25) {
  VerificationRun run;
  run.c0 = c0;
  SolveOptions opts;
  opts.n = 1025;

  // --- instantaneous checks -------------------------------------------------
  {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> draw(0.01, 0.49);
    double worst_id = 0.0, worst_res = 0.0;
    for (int k = 0; k < 50; ++k) {
      Params par = make_params(101.0, draw(rng), Regime::StrongSegregation);
      auto [ub, vb] = mixed_equilibria(par);
      worst_id = std::max({worst_id, std::abs(ub * vb - par.r),
                           std::abs(ub * ub + vb * vb - 1.0)});
      for (const auto& eq : all_equilibria(par))
        worst_res = std::max(worst_res,
                             rhs(CoordFrame::PhysicalUV, eq.point, par)
                                 .lpNorm<Eigen::Infinity>());
    }
    run.criteria.push_back(detail::value_criterion(
        "01-equilibria-identities",
        "ubar vbar = r, ubar^2+vbar^2 = 1 and equilibrium residuals, 50 random r",
        std::max(worst_id, worst_res), 1e-12));
  }
  {
    LimitProfile u0 = compute_u0(c0, 12.0 / u0_slow_rate(c0), 2049);
    LimitProfile f0 = compute_phi0(c0, 12.0 / phi0_slow_rate(c0), 2049);
    double worst = 0.0;
    const int n = 2049;
    for (int i = 0; i < n; ++i) {
      const int j = n - 1 - i;
      worst = std::max(worst, std::abs(u0.values[i] * u0.values[j] - c0));
      worst = std::max(worst, std::abs(u0.derivs[j] - c0 * u0.derivs[i] /
                                                          (u0.values[i] *
                                                           u0.values[i])));
      worst = std::max(worst, std::abs(f0.values[i] + f0.values[j] - M_PI));
    }
    run.criteria.push_back(detail::value_criterion(
        "02-limit-profile-symmetry",
        "u0(x)u0(-x)=c0, z0(-x)=c0 z0/u0^2, phi0(x)+phi0(-x)=pi at n=2049",
        worst, 1e-9));
  }

  // --- solve the ladders (strong/weak halves may run concurrently) ----------
  std::vector<Profile> strong, weak, manifold_strong;
  Profile base100, perturbed100;

  auto strong_half = [&] {
    std::vector<Params> path;
    for (double lam : {25.0, 100.0, 400.0, 1600.0})
      path.push_back(make_params(lam, c0, Regime::StrongSegregation));
    strong = continue_in_lambda(path, opts);

    std::vector<Params> mpath;
    for (double eps : {0.2, 0.1, 0.05, 0.025})
      mpath.push_back(
          make_params(1.0 + 1.0 / (eps * eps), c0, Regime::StrongSegregation));
    manifold_strong = continue_in_lambda(mpath, opts);

    Params p100 = make_params(100.0, c0, Regime::StrongSegregation);
    LimitProfile u0 = compute_u0(c0);
    Profile guess = initial_guess(p100, u0, opts);
    base100 = solve(p100, guess, opts);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> noise(-0.01, 0.01);
    Profile bumped = guess;
    for (auto& s : bumped.states)
      for (int k = 0; k < 4; ++k) s[k] *= 1.0 + noise(rng);
    perturbed100 = solve(p100, bumped, opts);
  };
  auto weak_half = [&] {
    std::vector<Params> path;
    for (double lam : {1.04, 1.01, 1.0025})
      path.push_back(make_params(lam, c0, Regime::WeakSegregation));
    weak = continue_in_lambda(path, opts);
  };

  if (verification_threads() >= 2) {
    std::exception_ptr weak_error;
    std::thread ws([&] {
      try {
        weak_half();
      } catch (...) {
        weak_error = std::current_exception();
      }
    });
    try {
      strong_half();
    } catch (...) {
      ws.join();
      throw;
    }
    ws.join();
    if (weak_error) std::rethrow_exception(weak_error);
  } else {
    strong_half();
    weak_half();
  }

  // --- strong-regime estimates ----------------------------------------------
  double L_needed = 0.0;
  for (const auto& pr : strong) L_needed = std::max(L_needed, pr.L());
  LimitProfile u0 = compute_u0(c0, 1.02 * L_needed, 4097);

  {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& pr : strong)
      pairs.push_back({pr.params.eps * pr.params.eps,
                       sup_error_vs_limit(pr, u0)});
    run.criteria.push_back(detail::slope_criterion(
        "04-strong-convergence-order",
        "sup|u - u0| vs eps = 1/sqrt(lambda-1), ladder 25..1600", fit_rate(pairs),
        1.0, 0.15));
  }
  {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& pr : strong) {
      double worst = 0.0;
      for (const auto& s : pr.states)
        worst = std::max(worst, std::abs(s[0] * s[2] - pr.params.r));
      pairs.push_back({1.0 / pr.params.lambda, worst});
    }
    RateFit fit = fit_rate(pairs);
    CriterionResult c;
    c.id = "05-strong-product-estimate";
    c.description = "max|uv - r| vs 1/lambda, ladder 25..1600";
    c.measured = fit.slope;
    c.expected = 1.0;
    c.tolerance = 0.2;
    c.r_squared = fit.r_squared;
    c.pass = std::abs(c.measured - 1.0) <= 0.2;
    run.criteria.push_back(c);
  }
  {
    auto [rate, pref] = decay_fit(strong.back(), DecayQuantity::Uprime);
    (void)pref;
    const double target = std::sqrt(2.0) * std::sqrt(1.0 - 4.0 * c0 * c0);
    CriterionResult c;
    c.id = "06-strong-decay-rate";
    c.description = "u' decay rate at lambda = 1600 vs sqrt2 sqrt(1-4c0^2)";
    c.measured = rate;
    c.expected = target;
    c.tolerance = 0.05 * target;
    c.pass = std::abs(rate - target) <= c.tolerance;
    run.criteria.push_back(c);
  }

  // --- weak-regime estimates -------------------------------------------------
  double Ly_needed = 0.0;
  for (const auto& pr : weak)
    Ly_needed = std::max(Ly_needed, pr.params.eps * pr.L());
  LimitProfile f0 = compute_phi0(c0, 1.02 * Ly_needed, 4097);

  {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& pr : weak)
      pairs.push_back({pr.params.lambda - 1.0, sup_error_vs_limit(pr, f0)});
    run.criteria.push_back(detail::slope_criterion(
        "07a-weak-convergence-order",
        "sup|phi - phi0(sqrt(lambda-1) x)| vs sqrt(lambda-1)", fit_rate(pairs),
        1.0, 0.2));
  }
  {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& pr : weak) {
      double worst = 0.0;
      for (const auto& s : pr.states)
        worst = std::max(worst, std::abs(s[0] * s[0] + s[2] * s[2] - 1.0));
      pairs.push_back({pr.params.lambda - 1.0, worst});
    }
    RateFit fit = fit_rate(pairs);
    CriterionResult c;
    c.id = "07b-weak-r2-order";
    c.description = "max|u^2+v^2-1| vs (lambda-1)";
    c.measured = fit.slope;
    c.expected = 1.0;
    c.tolerance = 0.2;
    c.r_squared = fit.r_squared;
    c.pass = std::abs(c.measured - 1.0) <= 0.2;
    run.criteria.push_back(c);
  }
  {
    const Profile& pr = weak.back();  // lambda = 1.0025
    auto [rate, pref] = decay_fit(pr, DecayQuantity::R2Minus1);
    (void)pref;
    const double target =
        std::sqrt(1.0 - 4.0 * c0 * c0) * std::sqrt(pr.params.lambda - 1.0);
    CriterionResult c;
    c.id = "08-weak-decay-rate";
    c.description = "R^2-1 decay rate at lambda = 1.0025";
    c.measured = rate;
    c.expected = target;
    c.tolerance = 0.10 * target;
    c.pass = std::abs(rate - target) <= c.tolerance;
    run.criteria.push_back(c);
  }

  // --- symmetry / monotonicity / Hamiltonian across every profile ------------
  {
    double worst_sym = 0.0;
    bool monotone = true;
    for (const auto& pr : strong) {
      worst_sym = std::max(worst_sym, detail::mirror_symmetry_residual(pr));
      for (int i = 1; i + 1 < pr.n(); ++i)
        monotone = monotone && pr.states[i][1] > 0.0;
    }
    for (const auto& pr : weak) {
      for (const auto& s : pr.states)
        monotone = monotone && (s[0] * s[3] - s[2] * s[1]) < 0.0;  // phi' < 0
    }
    CriterionResult c = detail::value_criterion(
        "09-symmetry-monotonicity",
        "u(-x)=v(x) to 1e-8; u'>0 (strong); phi'<0 (weak)", worst_sym, 1e-8);
    c.pass = c.pass && monotone;
    run.criteria.push_back(c);
  }
  {
    double drift = 0.0;
    for (const auto* set : {&strong, &weak, &manifold_strong})
      for (const auto& pr : *set)
        drift = std::max(drift, pr.diagnostics.hamiltonian_drift);
    drift = std::max({drift, base100.diagnostics.hamiltonian_drift,
                      perturbed100.diagnostics.hamiltonian_drift});
    run.criteria.push_back(detail::value_criterion(
        "03-hamiltonian-zero-level", "max node |H| over every converged profile",
        drift, 1e-8));
  }

  // --- slow-manifold residual orders ------------------------------------------
  {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& pr : manifold_strong)
      pairs.push_back({pr.params.eps * pr.params.eps,
                       slow_manifold_residual(pr)});
    run.criteria.push_back(detail::slope_criterion(
        "10a-manifold-residual-strong",
        "strong slow-manifold residual vs eps, ladder eps = .2,.1,.05,.025",
        fit_rate(pairs), 1.0, 0.25));
  }
  {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& pr : weak)
      pairs.push_back({pr.params.eps * pr.params.eps,
                       slow_manifold_residual(pr)});
    run.criteria.push_back(detail::slope_criterion(
        "10b-manifold-residual-weak",
        "weak slow-manifold residual vs eps, ladder eps = .2,.1,.05",
        fit_rate(pairs), 1.0, 0.25));
  }

  // --- local uniqueness and IVP cross-check -----------------------------------
  {
    double diff = 0.0;
    for (int i = 0; i < base100.n(); ++i)
      diff = std::max(diff, (base100.states[i] - perturbed100.states[i])
                                .lpNorm<Eigen::Infinity>());
    run.criteria.push_back(detail::value_criterion(
        "11-local-uniqueness",
        "1% perturbed guess at lambda = 100 reconverges to the same profile",
        diff, 1e-8));
  }
  {
    const Profile& pr = base100;
    const double Lhalf = 0.5 * pr.L();
    double dev = 0.0;
    OdeOptions oopt;
    oopt.rtol = 1e-12;
    oopt.atol = 1e-14;
    oopt.max_norm = 1e6;
    Vec4 y = pr.states.front();
    try {
      for (int i = 1; i < pr.n() && pr.xs[i] <= Lhalf; ++i) {
        y = integrate_to(
            [&](const Vec4& s) { return rhs(CoordFrame::PhysicalUV, s, pr.params); },
            y, pr.xs[i - 1], pr.xs[i], oopt);
        dev = std::max(dev, (y - pr.states[i]).lpNorm<Eigen::Infinity>());
      }
    } catch (const NumericalError&) {
      dev = oopt.max_norm;  // flow blew up before reaching L/2
    }
    run.criteria.push_back(detail::value_criterion(
        "12-ivp-cross-check",
        "adaptive flow from the left endpoint shadows the profile on [-L, L/2]",
        dev, 1e-5));
  }

  std::sort(run.criteria.begin(), run.criteria.end(),
            [](const CriterionResult& a, const CriterionResult& b) {
              return a.id < b.id;
            });
  return run;
}

}  // namespace rabihet
