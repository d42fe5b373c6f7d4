// Command-line front end: closed-form equilibria, limit profiles, single
// solves, continuation sweeps and the full verification pipeline.

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "rabihet/bvp.hpp"
#include "rabihet/io.hpp"
#include "rabihet/verification.hpp"

namespace {

using namespace rabihet;

struct CommonArgs {
  double lambda = 101.0;
  double c0 = 0.25;
  std::string c0_list = "0.25";  // sweep accepts a comma list
  std::string regime = "strong";
  std::string omega_tilde = "zero";
  int n = 1025;
  double half_length = 0.0;  // 0 = auto
  double tol = 1e-10;
  std::string out;
  std::string format = "csv";
  std::string ladder;
};

Regime parse_regime(const std::string& s) {
  if (s == "strong") return Regime::StrongSegregation;
  if (s == "weak") return Regime::WeakSegregation;
  throw InputError("regime must be 'strong' or 'weak'");
}

OmegaTilde parse_omega_tilde(const std::string& s, double c0) {
  if (s == "zero") return omega_tilde_zero;
  if (s == "quadratic") return [c0](double e) { return c0 * e * e; };
  throw InputError("omega-tilde must be 'zero' or 'quadratic'");
}

Params params_from(const CommonArgs& a) {
  return make_params(a.lambda, a.c0, parse_omega_tilde(a.omega_tilde, a.c0),
                     parse_regime(a.regime));
}

SolveOptions solve_options(const CommonArgs& a) {
  SolveOptions o;
  o.n = a.n;
  o.L = a.half_length;
  o.tol = a.tol;
  return o;
}

void emit(const std::string& path, const std::string& payload) {
  if (path.empty())
    std::cout << payload;
  else
    write_file(path, payload);
}

std::vector<double> parse_ladder(const std::string& s) {
  std::vector<double> vals;
  std::string tok;
  for (char ch : s + ",") {
    if (ch == ',') {
      if (!tok.empty()) vals.push_back(std::stod(tok));
      tok.clear();
    } else {
      tok += ch;
    }
  }
  if (vals.empty()) throw InputError("--ladder needs a comma-separated list");
  return vals;
}

int cmd_equilibria(const CommonArgs& a) {
  Params par = params_from(a);
  auto eqs = all_equilibria(par);
  static const char* names[] = {"zero      ", "diagonal  ", "mixed_low ",
                                "mixed_high"};
  for (const auto& e : eqs) {
    std::printf("%s u=%.10f v=%.10f  eigenvalues:", names[int(e.kind)],
                e.point[0], e.point[2]);
    for (const auto& lam : e.eigenvalues)
      std::printf(" (%.10g%+.10gi)", lam.real(), lam.imag());
    std::printf("\n");
  }
  auto [mu_slow, mu_fast] = slow_eigenvalues(par);
  std::printf("mu_slow=%.10f mu_fast=%.10f (%s)\n", mu_slow, mu_fast,
              par.regime == Regime::WeakSegregation ? "in y = eps x" : "in x");
  if (!a.out.empty()) write_file(a.out, equilibria_json(eqs).dump(2) + "\n");
  return 0;
}

int cmd_limit_profile(const CommonArgs& a) {
  const bool strong = parse_regime(a.regime) == Regime::StrongSegregation;
  const double L = a.half_length > 0.0
                       ? a.half_length
                       : 12.0 / (strong ? u0_slow_rate(a.c0) : phi0_slow_rate(a.c0));
  const int n = a.n >= 64 ? a.n : 2049;
  LimitProfile prof =
      strong ? compute_u0(a.c0, L, n) : compute_phi0(a.c0, L, n);
  emit(a.out, a.format == "json" ? limit_profile_json(prof).dump(2) + "\n"
                                 : limit_profile_csv(prof));
  return 0;
}

int cmd_solve(const CommonArgs& a) {
  Params par = params_from(a);
  SolveOptions opts = solve_options(a);
  Profile prof = solve_from_limit(par, opts);
  std::fprintf(stderr,
               "converged: iters=%d residual=%.3e |H|max=%.3e bc=%.3e\n",
               prof.diagnostics.newton_iters, prof.diagnostics.final_residual,
               prof.diagnostics.hamiltonian_drift, prof.diagnostics.bc_residual);
  emit(a.out, a.format == "json" ? profile_json(prof).dump(2) + "\n"
                                 : profile_csv(prof));
  return 0;
}

int cmd_sweep(const CommonArgs& a) {
  const Regime regime = parse_regime(a.regime);
  const std::vector<double> lambdas = parse_ladder(a.ladder);
  const std::vector<double> c0s = parse_ladder(a.c0_list);

  // one continuation per c0; independent c0 sweeps may run in parallel,
  // capped by RABI_HET_THREADS
  std::vector<std::vector<Profile>> results(c0s.size());
  std::vector<std::exception_ptr> errors(c0s.size());
  auto run_one = [&](std::size_t k) {
    try {
      std::vector<Params> path;
      for (double lam : lambdas)
        path.push_back(make_params(lam, c0s[k],
                                   parse_omega_tilde(a.omega_tilde, c0s[k]),
                                   regime));
      results[k] = continue_in_lambda(path, solve_options(a));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(verification_threads(), c0s.size());
  if (workers >= 2) {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < c0s.size();) run_one(k);
      });
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t k = 0; k < c0s.size(); ++k) run_one(k);
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  for (std::size_t k = 0; k < c0s.size(); ++k) {
    for (const auto& prof : results[k]) {
      char name[96];
      if (c0s.size() > 1)
        std::snprintf(name, sizeof(name), "c0%.6g_lambda%.6g", c0s[k],
                      prof.params.lambda);
      else
        std::snprintf(name, sizeof(name), "lambda%.6g", prof.params.lambda);
      const std::string payload = a.format == "json"
                                      ? profile_json(prof).dump(2) + "\n"
                                      : profile_csv(prof);
      if (a.out.empty()) {
        std::cout << "# " << name << "\n" << payload;
      } else {
        write_file(a.out + "_" + name + (a.format == "json" ? ".json" : ".csv"),
                   payload);
      }
      std::fprintf(stderr, "%s: iters=%d residual=%.3e |H|max=%.3e\n", name,
                   prof.diagnostics.newton_iters,
                   prof.diagnostics.final_residual,
                   prof.diagnostics.hamiltonian_drift);
    }
  }
  return 0;
}

int cmd_verify(const CommonArgs& a) {
  VerificationRun run = run_verification(a.c0);
  for (const auto& c : run.criteria)
    std::printf("[%s] %-30s measured=%.6g expected=%.6g tol=%.3g\n",
                c.pass ? "PASS" : "FAIL", c.id.c_str(), c.measured, c.expected,
                c.tolerance);
  const std::string path = a.out.empty() ? "report.json" : a.out;
  write_file(path, report_json(run.records(), run.c0).dump(2) + "\n");
  std::printf("report written to %s\n", path.c_str());
  if (!run.all_pass()) {
    for (const auto& c : run.criteria)
      if (!c.pass)
        std::fprintf(stderr, "verify: criterion %s failed (%s)\n",
                     c.id.c_str(), c.description.c_str());
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heteroclinic profiles of the Rabi-coupled condensate system"};
  app.require_subcommand(1);
  CommonArgs a;

  auto add_common = [&](CLI::App* sub, bool solver_flags) {
    sub->add_option("--lambda", a.lambda, "coupling lambda > 1");
    if (sub->get_name() == "sweep")
      sub->add_option("--c0", a.c0_list,
                      "target ratio(s) in (0, 1/2), comma separated");
    else
      sub->add_option("--c0", a.c0, "target ratio in (0, 1/2)");
    sub->add_option("--regime", a.regime, "strong|weak");
    sub->add_option("--omega-tilde", a.omega_tilde, "zero|quadratic");
    sub->add_option("--out", a.out, "output path (stdout if omitted)");
    sub->add_option("--format", a.format, "csv|json");
    if (solver_flags) {
      sub->add_option("--n", a.n, "mesh nodes (odd)");
      sub->add_option("--half-length", a.half_length,
                      "truncation half-length (auto if omitted)");
      sub->add_option("--tol", a.tol, "Newton tolerance");
    }
  };

  auto* eq = app.add_subcommand("equilibria", "closed-form equilibria and spectra");
  add_common(eq, false);
  auto* lp = app.add_subcommand("limit-profile", "compute u0 or phi0");
  add_common(lp, true);
  auto* sv = app.add_subcommand("solve", "one heteroclinic solve");
  add_common(sv, true);
  auto* sw = app.add_subcommand("sweep", "continuation over a lambda ladder");
  add_common(sw, true);
  sw->add_option("--ladder", a.ladder, "comma-separated lambda values")
      ->required();
  auto* vf = app.add_subcommand("verify", "run the full verification pipeline");
  add_common(vf, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (eq->parsed()) return cmd_equilibria(a);
    if (lp->parsed()) return cmd_limit_profile(a);
    if (sv->parsed()) return cmd_solve(a);
    if (sw->parsed()) return cmd_sweep(a);
    if (vf->parsed()) return cmd_verify(a);
  } catch (const rabihet::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const rabihet::NumericalError& e) {
    std::fprintf(stderr, "numerical failure in %s: %s\n",
                 app.get_subcommands().front()->get_name().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
