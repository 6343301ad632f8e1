#pragma once

/*
 * Implementations behind the `invex` subcommands. Each command returns a
 * RunReport JSON document
 *
 *   {command, config_digest, seed, results, timings}
 *
 * plus the exit code and an optional CSV table. Only `timings` depends on
 * the machine; everything else is a pure function of (config, seed, flags).
 */

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "invex/cli/config.hpp"
#include "invex/cli/report.hpp"
#include "invex/convexity.hpp"
#include "invex/inverse.hpp"
#include "invex/matcert.hpp"
#include "invex/numdiff.hpp"
#include "invex/optimize.hpp"
#include "invex/pathway.hpp"

namespace invex::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitNumerical = 3,
  kExitContradiction = 4,
};

struct CommandResult {
  json report;
  int exit_code = kExitOk;
  std::string csv;  // empty when the command has no table
};

inline json make_report(const std::string& command, const Config& cfg) {
  json r;
  r["command"] = command;
  r["config_digest"] = config_digest(cfg);
  r["seed"] = cfg.seed;
  return r;
}

inline json verdict_json(const matcert::DefinitenessVerdict& v) {
  return {{"status", std::string(to_string(v.status))}, {"min_eigenvalue", v.min_eigenvalue_estimate}};
}

inline json certificate_json(const convexity::ConvexityCertificate& c) {
  json j = {{"status", std::string(to_string(c.status))},
            {"sigma_estimate", c.sigma_estimate},
            {"samples_checked", c.samples_checked}};
  if (c.witness) {
    j["witness"] = {{"sample_index", c.witness->sample_index},
                    {"point", to_json(c.witness->point)},
                    {"direction", to_json(c.witness->direction)},
                    {"value", c.witness->value}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Scalar examples
// ---------------------------------------------------------------------------

/// A scalar map, its inverse and the closed-form derivatives used by the
/// inverse second-derivative formula.
struct ScalarPair {
  std::string name;
  SmoothMap f;
  SmoothMap g;
  std::function<double(double)> f1, f2, g1;
  Interval default_interval;
};

inline SmoothMap scalar_fn(std::function<double(double)> fn, std::function<bool(double)> dom = {}) {
  SmoothMap m;
  m.eval = [fn](const Vector& x) { return Vector::Constant(1, fn(x(0))); };
  if (dom) m.in_domain = [dom](const Vector& x) { return dom(x(0)); };
  return m;
}

inline std::optional<ScalarPair> scalar_pair(const std::string& name) {
  const auto positive = [](double x) { return x > 0.0; };
  if (name == "reciprocal") {
    return ScalarPair{name,
                      scalar_fn([](double x) { return 1.0 / x; }, positive),
                      scalar_fn([](double y) { return 1.0 / y; }, positive),
                      [](double x) { return -1.0 / (x * x); },
                      [](double x) { return 2.0 / (x * x * x); },
                      [](double y) { return -1.0 / (y * y); },
                      {0.1, 10.0}};
  }
  if (name == "exp_neg") {
    return ScalarPair{name,
                      scalar_fn([](double x) { return std::exp(-x); }),
                      scalar_fn([](double y) { return -std::log(y); }, positive),
                      [](double x) { return -std::exp(-x); },
                      [](double x) { return std::exp(-x); },
                      [](double y) { return -1.0 / y; },
                      {-2.0, 2.0}};
  }
  if (name == "exp") {
    return ScalarPair{name,
                      scalar_fn([](double x) { return std::exp(x); }),
                      scalar_fn([](double y) { return std::log(y); }, positive),
                      [](double x) { return std::exp(x); },
                      [](double x) { return std::exp(x); },
                      [](double y) { return 1.0 / y; },
                      {-2.0, 2.0}};
  }
  if (name == "identity") {
    return ScalarPair{name,
                      scalar_fn([](double x) { return x; }),
                      scalar_fn([](double y) { return y; }),
                      [](double) { return 1.0; },
                      [](double) { return 0.0; },
                      [](double) { return 1.0; },
                      {-1.0, 1.0}};
  }
  return std::nullopt;
}

struct InverseScan {
  std::string verdict;  // inverse_convex | inverse_not_convex | indeterminate
  double min_formula = 0.0;
  double max_relative_fd_error = 0.0;
  std::vector<std::array<double, 5>> rows;  // x, y, f'', g'' formula, g'' FD
};

/// g'' from -g' f'' / f'^2 at `count` equispaced points, cross-checked against
/// a finite-difference second derivative of g itself.
inline InverseScan scan_inverse(const ScalarPair& p, Interval iv, int count) {
  InverseScan s;
  s.min_formula = std::numeric_limits<double>::infinity();
  bool any_negative = false;
  bool any_flat = false;
  for (int k = 0; k < count; ++k) {
    const double x = iv.lo + (k + 1) * (iv.hi - iv.lo) / (count + 1);
    const double y = p.f.scalar(Vector::Constant(1, x));
    const double formula = inverse::scalar_inverse_second_derivative(p.f1(x), p.f2(x), p.g1(y));
    const double fd = numdiff::hessian(p.g, Vector::Constant(1, y))(0, 0);
    const double tol = 1e-9 * (1.0 + std::abs(formula));
    any_negative = any_negative || formula < -tol;
    any_flat = any_flat || std::abs(formula) <= tol;
    s.min_formula = std::min(s.min_formula, formula);
    const double rel = std::abs(fd - formula) / std::max(std::abs(formula), 1e-300);
    if (std::abs(formula) > tol) s.max_relative_fd_error = std::max(s.max_relative_fd_error, rel);
    s.rows.push_back({x, y, p.f2(x), formula, fd});
  }
  s.verdict = any_negative ? "inverse_not_convex" : any_flat ? "indeterminate" : "inverse_convex";
  return s;
}

inline CommandResult cmd_certify1d(const std::string& name, double lo, double hi, int count,
                                   const Config& cfg = {}) {
  const auto pair = scalar_pair(name);
  if (!pair) {
    throw config_error("unknown function '" + name + "' (expected reciprocal, exp_neg, exp or identity)", 0,
                       "function_name");
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw config_error("interval must satisfy lo < hi", 0, "interval");
  }
  if (count <= 0) throw config_error("count must be positive", 0, "count");
  if (!pair->f.contains(Vector::Constant(1, lo + (hi - lo) * 1e-9)) ||
      !pair->f.contains(Vector::Constant(1, hi - (hi - lo) * 1e-9))) {
    throw config_error("interval leaves the domain of '" + name + "'", 0, "interval");
  }

  StageTimer timer;
  CommandResult out;
  out.report = make_report("certify1d", cfg);
  const Interval iv{lo, hi};
  const auto cert = timer.time("scan", [&] { return convexity::scalar_convexity_scan(pair->f, iv, count); });
  const auto inv = timer.time("inverse", [&] { return scan_inverse(*pair, iv, count); });

  json results;
  results["function"] = name;
  results["interval"] = {lo, hi};
  results["count"] = count;
  results["function_certificate"] = certificate_json(cert);
  results["inverse"] = {{"verdict", inv.verdict},
                        {"min_second_derivative", inv.min_formula},
                        {"max_relative_fd_error", inv.max_relative_fd_error}};
  out.report["results"] = results;
  out.report["timings"] = timer.timings();

  std::ostringstream csv;
  csv << "x,y,f_second,g_second_formula,g_second_fd\n";
  for (const auto& r : inv.rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) line += ',';
      detail::write_number(line, r[i]);
    }
    csv << line << '\n';
  }
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// theorem1
// ---------------------------------------------------------------------------

/// Named (f, g) pair plus the points at which to verify it.
struct NamedPair {
  SmoothMap f;
  SmoothMap g;
  std::vector<Vector> points;
};

inline NamedPair theorem1_pair(const std::string& name, const Config& cfg) {
  NamedPair p;
  if (name == "pathway") {
    p.f = pathway::forward_map(cfg.model);
    p.g = pathway::inverse_map(cfg.model);
    DomainSampler zs = pathway::z_sampler(cfg.model, cfg.seed, cfg.count);
    zs.box = cfg.z_box_or_default();
    for (const Vector& z : zs.sample_in(p.g)) p.points.push_back(pathway::inverse_cascade(cfg.model, z));
    return p;
  }
  if (name == "identity") {
    p.f = identity_map(2);
    p.g = identity_map(2);
    const DomainSampler s{{{-1.0, 1.0}, {-1.0, 1.0}}, Distribution::uniform, cfg.seed, cfg.count};
    p.points = s.sample_in(p.f);
    return p;
  }
  const auto sp = scalar_pair(name);
  if (!sp) {
    throw config_error("unknown pair '" + name + "' (expected pathway, reciprocal, exp_neg, exp or identity)", 0,
                       "pair");
  }
  p.f = sp->f;
  p.g = sp->g;
  const DomainSampler s{{sp->default_interval}, Distribution::uniform, cfg.seed, cfg.count};
  p.points = s.sample_in(p.f);
  return p;
}

inline json theorem1_results(const std::string& name, const inverse::Theorem1Report& rep) {
  const std::size_t n = rep.samples.empty() ? 0 : rep.samples.front().components.size();
  std::vector<int> f_not_pd(n, 0), grad_not_neg(n, 0), g_not_pd(n, 0), g_support_pd(n, 0);
  std::vector<double> g_min(n, std::numeric_limits<double>::infinity());
  int mismatches = 0;
  bool nonpositive_pattern = true;
  json records = json::array();
  for (const auto& s : rep.samples) {
    json rec = {{"x", to_json(s.x)},
                {"y", to_json(s.y)},
                {"round_trip_residual", s.round_trip_residual},
                {"jacobian_identity_residual", s.jacobian_identity_residual}};
    json hf = json::array();
    for (std::size_t k = 0; k < s.hessian_f.size(); ++k) {
      hf.push_back(verdict_json(s.hessian_f[k]));
      if (!s.hessian_f[k].positive_definite()) ++f_not_pd[k];
    }
    rec["hessian_f"] = hf;
    json comps = json::array();
    for (std::size_t m = 0; m < s.components.size(); ++m) {
      const auto& c = s.components[m];
      if (!c.gradient_negative) ++grad_not_neg[m];
      if (!c.hessian_g.positive_definite()) ++g_not_pd[m];
      if (c.hessian_g_on_support.positive_definite()) ++g_support_pd[m];
      g_min[m] = std::min(g_min[m], c.hessian_g.min_eigenvalue_estimate);
      // Definiteness must survive the congruence with Df; only decided verdicts count.
      const auto a = c.hessian_g.status;
      const auto b = c.pulled_back.status;
      if (a != b && a != matcert::Definiteness::indeterminate && b != matcert::Definiteness::indeterminate) {
        ++mismatches;
      }
      for (int i = 0; i < c.gradient.size(); ++i) {
        const bool on_support = std::find(c.support.begin(), c.support.end(), i) != c.support.end();
        if (on_support ? !(c.gradient(i) < 0.0) : c.gradient(i) != 0.0) nonpositive_pattern = false;
      }
      comps.push_back({{"gradient", to_json(c.gradient)},
                       {"gradient_negative", c.gradient_negative},
                       {"support", c.support},
                       {"congruence_residual", c.congruence_residual},
                       {"hessian_g", verdict_json(c.hessian_g)},
                       {"pulled_back", verdict_json(c.pulled_back)},
                       {"hessian_g_on_support", verdict_json(c.hessian_g_on_support)}});
    }
    rec["components"] = comps;
    records.push_back(rec);
  }

  json r;
  r["pair"] = name;
  r["samples"] = rep.samples.size();
  r["overall"] = std::string(to_string(rep.overall));
  r["residuals_within_tolerance"] = rep.residuals_within_tolerance;
  r["max_round_trip_residual"] = rep.max_round_trip_residual;
  r["max_jacobian_identity_residual"] = rep.max_jacobian_identity_residual;
  r["max_congruence_residual"] = rep.max_congruence_residual;
  r["hypotheses"] = {{"hessian_f_not_pd_count", f_not_pd}, {"gradient_not_negative_count", grad_not_neg}};
  r["conclusion"] = {{"hessian_g_not_pd_count", g_not_pd}, {"hessian_g_min_eigenvalue", g_min}};
  r["support_restricted"] = {{"gradient_negative_on_support_zero_elsewhere", nonpositive_pattern},
                             {"hessian_g_on_support_pd_count", g_support_pd}};
  r["congruence_consistency_mismatches"] = mismatches;
  r["records"] = records;
  return r;
}

inline CommandResult cmd_theorem1(const Config& cfg, const std::string& pair_name = "pathway") {
  StageTimer timer;
  CommandResult out;
  out.report = make_report("theorem1", cfg);
  const NamedPair pair = timer.time("sample", [&] { return theorem1_pair(pair_name, cfg); });
  inverse::Theorem1Tolerances tol;
  tol.pd_rel = cfg.pd;
  tol.congruence = cfg.fd;
  const auto rep = timer.time("verify", [&] { return inverse::theorem1_verify(pair.f, pair.g, pair.points, tol); });
  out.report["results"] = theorem1_results(pair_name, rep);
  out.report["timings"] = timer.timings();
  if (rep.overall == inverse::Theorem1Verdict::conclusion_fails_despite_hypotheses) {
    out.exit_code = kExitContradiction;
  }

  std::ostringstream csv;
  csv << "sample,matrix,index,min_eigenvalue,status\n";
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    const auto& s = rep.samples[i];
    auto row = [&](const char* what, std::size_t idx, const matcert::DefinitenessVerdict& v) {
      std::string line = std::to_string(i) + "," + what + "," + std::to_string(idx) + ",";
      detail::write_number(line, v.min_eigenvalue_estimate);
      csv << line << ',' << to_string(v.status) << '\n';
    };
    for (std::size_t k = 0; k < s.hessian_f.size(); ++k) row("hessian_f", k, s.hessian_f[k]);
    for (std::size_t m = 0; m < s.components.size(); ++m) row("hessian_g", m, s.components[m].hessian_g);
  }
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// pathway
// ---------------------------------------------------------------------------

inline json steady_state_json(const pathway::SteadyState& s) {
  return {{"flux", s.flux}, {"x0", s.x0}, {"x1", s.x1}, {"x2", s.x2}, {"residuals", s.residuals}, {"z", s.z}};
}

inline CommandResult cmd_steady_state(const Config& cfg, const pathway::EnzymeVector& e) {
  StageTimer timer;
  CommandResult out;
  out.report = make_report("pathway steady-state", cfg);
  const auto s = timer.time("solve", [&] { return pathway::solve_steady_state(cfg.model, e, cfg.solver); });
  json r = steady_state_json(s);
  r["e"] = e.e;
  r["specific_flux"] = s.flux / e.total();
  r["max_residual"] = s.max_residual();
  r["reconstructed_e"] = pathway::reconstruct_enzymes(cfg.model, s).e;
  out.report["results"] = r;
  out.report["timings"] = timer.timings();
  return out;
}

inline CommandResult cmd_optimize(const Config& cfg, double e_total, int resolution = 256) {
  StageTimer timer;
  CommandResult out;
  out.report = make_report("pathway optimize", cfg);
  const auto alloc = timer.time("newton", [&] { return optimize::optimal_enzyme_allocation(cfg.model, e_total); });
  const auto grid = timer.time("oracle", [&] { return optimize::grid_oracle(cfg.model, resolution); });
  json r;
  r["e_total"] = e_total;
  r["e_star"] = alloc.e_star.e;
  r["J_star"] = alloc.flux;
  r["specific_flux"] = alloc.specific_flux;
  r["objective_value"] = alloc.optimum.value;
  r["specific_flux_times_objective"] = alloc.specific_flux * alloc.optimum.value;
  r["y_star"] = {alloc.optimum.y_star(0), alloc.optimum.y_star(1)};
  r["x_star"] = {std::exp(alloc.optimum.y_star(0)), std::exp(alloc.optimum.y_star(1))};
  r["gradient_norm"] = alloc.optimum.gradient_norm;
  r["iterations"] = alloc.optimum.iterations;
  r["converged"] = alloc.optimum.converged;
  r["steady_state"] = steady_state_json(alloc.state);
  r["concentration_gap"] = alloc.concentration_gap;
  r["oracle"] = {{"resolution", grid.resolution}, {"value", grid.value}, {"y", {grid.y(0), grid.y(1)}}};
  r["oracle_gap"] = (grid.value - alloc.optimum.value) / alloc.optimum.value;
  out.report["results"] = r;
  out.report["timings"] = timer.timings();
  return out;
}

inline CommandResult cmd_concavity(const Config& cfg) {
  StageTimer timer;
  CommandResult out;
  out.report = make_report("pathway concavity", cfg);
  DomainSampler es = pathway::enzyme_sampler(cfg.seed, cfg.count);
  es.box = cfg.e_box_or_default();
  const auto rep = timer.time("check", [&] {
    return pathway::specific_flux_concavity_check(cfg.model, es, cfg.pd, 1e-5, cfg.solver);
  });
  json r;
  r["verdict"] = rep.concave_at_samples() ? "concave_at_samples" : "not_concave_at_samples";
  r["samples"] = rep.samples.size();
  r["excluded"] = rep.excluded;
  r["tolerance"] = rep.tolerance;
  r["max_eigenvalue"] = rep.max_eigenvalue;
  r["euler"] = {{"max_relative_residual", rep.max_euler_residual},
                {"tolerance", rep.euler_tolerance},
                {"hold", rep.euler_identities_hold()}};
  r["max_radial_residual"] = rep.max_radial_residual;
  r["flux_max_eigenvalue"] = rep.max_flux_eigenvalue;
  r["fixed_total_max_eigenvalue"] = rep.max_simplex_eigenvalue;
  r["e_box"] = to_json(es.box);
  out.report["results"] = r;
  out.report["timings"] = timer.timings();

  std::ostringstream csv;
  csv << "e1,e2,e3,flux,specific_flux,max_eigenvalue,euler_flux,euler_specific,radial,flux_max_eigenvalue,"
         "fixed_total_max_eigenvalue\n";
  for (const auto& s : rep.samples) {
    std::string line;
    for (double v : {s.e[0], s.e[1], s.e[2], s.flux, s.specific_flux, s.max_eigenvalue, s.euler_flux_residual,
                     s.euler_specific_residual, s.radial_residual, s.flux_max_eigenvalue,
                     s.simplex_max_eigenvalue}) {
      if (!line.empty()) line += ',';
      detail::write_number(line, v);
    }
    csv << line << '\n';
  }
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// Error mapping
// ---------------------------------------------------------------------------

/// Runs `body`, turning toolkit errors into a structured error report.
inline CommandResult run_guarded(const std::string& command, const Config& cfg,
                                 const std::function<CommandResult()>& body) {
  auto fail = [&](int code, const std::string& kind, const std::string& message) {
    CommandResult out;
    out.exit_code = code;
    out.report = {{"command", command}, {"seed", cfg.seed}, {"error", {{"kind", kind}, {"message", message}}}};
    return out;
  };
  try {
    return body();
  } catch (const config_error& e) {
    auto out = fail(kExitUsage, "config_error", e.what());
    out.report["error"]["field"] = e.field();
    out.report["error"]["line"] = e.line();
    return out;
  } catch (const contract_violation& e) {
    return fail(kExitUsage, "contract_violation", e.what());
  } catch (const domain_error& e) {
    return fail(kExitUsage, "domain_error", e.what());
  } catch (const infeasible_state& e) {
    return fail(kExitNumerical, "infeasible_state", e.what());
  } catch (const solver_error& e) {
    auto out = fail(kExitNumerical, "solver_error", e.what());
    out.report["error"]["bracket"] = {e.lo(), e.hi()};
    return out;
  } catch (const invalid_pair& e) {
    auto out = fail(kExitNumerical, "invalid_pair", e.what());
    out.report["error"]["sample"] = e.sample();
    return out;
  } catch (const non_convergence& e) {
    auto out = fail(kExitNumerical, "non_convergence", e.what());
    out.report["error"]["best_iterate"] = to_json(e.best_iterate());
    return out;
  } catch (const differentiation_failure& e) {
    auto out = fail(kExitNumerical, "differentiation_failure", e.what());
    out.report["error"]["coordinate"] = e.coordinate();
    return out;
  } catch (const error& e) {
    return fail(kExitNumerical, "numerical_error", e.what());
  }
}

}  // namespace invex::cli
