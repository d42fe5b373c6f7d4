#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rabihet/asymptotics.hpp"
#include "rabihet/bvp.hpp"
#include "rabihet/equilibria.hpp"
#include "rabihet/limit_profiles.hpp"

// Flat-file serialization. Numbers are written with 17 significant digits so
// a written profile reads back bit-exactly; payloads carry no timestamps.
namespace rabihet {

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string profile_csv(const Profile& prof) {
  std::ostringstream os;
  os << "x,u,v,du,dv,H\n";
  for (int i = 0; i < prof.n(); ++i) {
    const Vec4& y = prof.states[i];
    const double H = hamiltonian(HamiltonianKind::FullH, y, prof.params);
    os << detail::fmt17(prof.xs[i]) << ',' << detail::fmt17(y[0]) << ','
       << detail::fmt17(y[2]) << ',' << detail::fmt17(y[1]) << ','
       << detail::fmt17(y[3]) << ',' << detail::fmt17(H) << '\n';
  }
  return os.str();
}

inline std::string limit_profile_csv(const LimitProfile& prof) {
  std::ostringstream os;
  os << "x,value,deriv\n";
  for (std::size_t i = 0; i < prof.xs.size(); ++i)
    os << detail::fmt17(prof.xs[i]) << ',' << detail::fmt17(prof.values[i])
       << ',' << detail::fmt17(prof.derivs[i]) << '\n';
  return os.str();
}

inline nlohmann::json profile_json(const Profile& prof) {
  nlohmann::json meta{{"lambda", prof.params.lambda},
                      {"omega", prof.params.omega},
                      {"c0", prof.params.c0},
                      {"regime", regime_name(prof.params.regime)},
                      {"n", prof.n()},
                      {"L", prof.L()},
                      {"tol", prof.diagnostics.tol},
                      {"schema_version", kSchemaVersion}};
  nlohmann::json nodes = nlohmann::json::array();
  for (int i = 0; i < prof.n(); ++i) {
    const Vec4& y = prof.states[i];
    const double H = hamiltonian(HamiltonianKind::FullH, y, prof.params);
    nodes.push_back({prof.xs[i], y[0], y[2], y[1], y[3], H});
  }
  nlohmann::json diag{{"hamiltonian_drift", prof.diagnostics.hamiltonian_drift},
                      {"bc_residual", prof.diagnostics.bc_residual},
                      {"final_residual", prof.diagnostics.final_residual},
                      {"newton_iters", prof.diagnostics.newton_iters},
                      {"unfolding_lambda", prof.diagnostics.unfolding_lambda},
                      {"condition_estimate", prof.diagnostics.condition_estimate}};
  return {{"meta", meta}, {"nodes", nodes}, {"diagnostics", diag}};
}

inline Profile profile_from_json(const nlohmann::json& j) {
  const auto& meta = j.at("meta");
  Regime regime = meta.at("regime").get<std::string>() == "strong"
                      ? Regime::StrongSegregation
                      : Regime::WeakSegregation;
  Profile prof;
  prof.params = params_from_omega(meta.at("lambda").get<double>(),
                                  meta.at("c0").get<double>(),
                                  meta.at("omega").get<double>(), regime);
  for (const auto& row : j.at("nodes")) {
    prof.xs.push_back(row.at(0).get<double>());
    prof.states.push_back(Vec4(row.at(1).get<double>(), row.at(3).get<double>(),
                               row.at(2).get<double>(), row.at(4).get<double>()));
  }
  prof.phase_anchor = (prof.n() - 1) / 2;
  prof.diagnostics.tol = meta.at("tol").get<double>();
  const auto& d = j.at("diagnostics");
  prof.diagnostics.hamiltonian_drift = d.at("hamiltonian_drift").get<double>();
  prof.diagnostics.bc_residual = d.at("bc_residual").get<double>();
  prof.diagnostics.final_residual = d.at("final_residual").get<double>();
  prof.diagnostics.newton_iters = d.at("newton_iters").get<int>();
  prof.diagnostics.unfolding_lambda = d.at("unfolding_lambda").get<double>();
  prof.diagnostics.condition_estimate =
      d.at("condition_estimate").get<double>();
  return prof;
}

inline nlohmann::json limit_profile_json(const LimitProfile& prof) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < prof.xs.size(); ++i)
    nodes.push_back({prof.xs[i], prof.values[i], prof.derivs[i]});
  return {{"meta",
           {{"kind", prof.kind == LimitKind::U0Strong ? "u0" : "phi0"},
            {"c0", prof.c0},
            {"L", prof.L},
            {"n", prof.xs.size()},
            {"schema_version", kSchemaVersion}}},
          {"nodes", nodes}};
}

inline nlohmann::json equilibria_json(const std::vector<Equilibrium>& eqs) {
  static const char* names[] = {"zero", "diagonal", "mixed_low", "mixed_high"};
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : eqs) {
    nlohmann::json evs = nlohmann::json::array();
    for (const auto& lam : e.eigenvalues)
      evs.push_back({lam.real(), lam.imag()});
    out.push_back({{"kind", names[static_cast<int>(e.kind)]},
                   {"u", e.point[0]},
                   {"v", e.point[2]},
                   {"eigenvalues", evs}});
  }
  return out;
}

inline nlohmann::json report_json(const std::vector<EstimateRecord>& records,
                                  double c0) {
  bool all = true;
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    all = all && r.pass;
    recs.push_back({{"estimate_id", r.estimate_id},
                    {"fitted_slope", r.fitted_slope},
                    {"expected_slope", r.expected_slope},
                    {"tolerance", r.tolerance},
                    {"pass", r.pass},
                    {"r_squared", r.r_squared}});
  }
  return {{"c0", c0},
          {"schema_version", kSchemaVersion},
          {"records", recs},
          {"passed", all}};
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open " + path + " for writing");
  os << contents;
  if (!os) throw InputError("failed writing " + path);
}

}  // namespace rabihet
