#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

#include "invex/errors.hpp"
#include "invex/pathway.hpp"

namespace invex::optimize {

using pathway::PathwayModel;

struct OptimizationResult {
  Eigen::Vector2d y_star = Eigen::Vector2d::Zero();
  double value = 0.0;
  double gradient_norm = 0.0;  // max norm
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // objective value at each accepted iterate
};

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

struct NewtonSettings {
  double backtrack = 0.5;
  double armijo = 1e-4;
  int max_iter = 100;
  int max_backtracks = 60;
};

/// y1 = log x0 - d, y2 = log x0 - 2d with d = log(100)/3.
inline Eigen::Vector2d default_start(const PathwayModel& model) {
  const double ly0 = std::log(model.x0);
  const double d = (ly0 - std::log(model.x0 / 100.0)) / 3.0;
  return {ly0 - d, ly0 - 2.0 * d};
}

/**
 * Damped Newton on the log-variable objective with Armijo backtracking.
 * Trial points outside log x0 > y1 > y2 are rejected like failed Armijo
 * tests. If the Hessian does not factor as SPD the step falls back to
 * steepest descent.
 */
inline OptimizationResult minimize_objective(const PathwayModel& model, const Eigen::Vector2d& y_init,
                                             double tol = 1e-10, const NewtonSettings& opt = {}) {
  model.validate();
  if (!pathway::objective_domain(model, y_init(0), y_init(1))) {
    throw contract_violation("initial point must satisfy log x0 > y1 > y2");
  }
  OptimizationResult r;
  Eigen::Vector2d y = y_init;
  auto cur = pathway::objective_log_full(model, y(0), y(1));
  r.history.push_back(cur.value);

  for (r.iterations = 0; r.iterations < opt.max_iter; ++r.iterations) {
    r.gradient_norm = cur.gradient.cwiseAbs().maxCoeff();
    if (r.gradient_norm <= tol) {
      r.converged = true;
      break;
    }
    Eigen::Vector2d dir;
    const Eigen::LLT<Eigen::Matrix2d> llt(cur.hessian);
    if (llt.info() == Eigen::Success) {
      dir = -llt.solve(cur.gradient);
    } else {
      dir = -cur.gradient;
    }
    const double slope = cur.gradient.dot(dir);

    bool accepted = false;
    double step = 1.0;
    for (int k = 0; k < opt.max_backtracks; ++k, step *= opt.backtrack) {
      const Eigen::Vector2d trial = y + step * dir;
      if (!pathway::objective_domain(model, trial(0), trial(1))) continue;
      const auto next = pathway::objective_log_full(model, trial(0), trial(1));
      const bool armijo = next.value <= cur.value + opt.armijo * step * slope && next.value < cur.value;
      // Near the minimum the value stops moving at working precision; a step
      // that keeps it within rounding and shrinks the gradient still counts.
      const bool flat = next.value <= cur.value + 4.0 * kEps * std::abs(cur.value) &&
                        next.gradient.cwiseAbs().maxCoeff() < 0.5 * cur.gradient.cwiseAbs().maxCoeff();
      if (armijo || flat) {
        y = trial;
        cur = next;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no descent possible at working precision
    r.history.push_back(cur.value);
  }
  r.y_star = y;
  r.value = cur.value;
  r.gradient_norm = cur.gradient.cwiseAbs().maxCoeff();
  r.converged = r.gradient_norm <= tol;
  return r;
}

inline OptimizationResult minimize_objective(const PathwayModel& model, double tol = 1e-10) {
  return minimize_objective(model, default_start(model), tol);
}

struct GridResult {
  Eigen::Vector2d y = Eigen::Vector2d::Zero();
  double value = std::numeric_limits<double>::infinity();
  int resolution = 0;
  double spacing = 0.0;
};

/// Log-decades below x0 covered by the grid oracle.
inline constexpr double kGridDecades = 4.0;

/**
 * Exhaustive search over the triangular grid y_k = log x0 - W k/res,
 * k = 1..res, with y1 = y_i > y2 = y_j (i < j) and W = 4 log 10. Grids whose
 * resolutions divide one another are nested, so refining never raises the
 * best value.
 */
inline GridResult grid_oracle(const PathwayModel& model, int resolution) {
  model.validate();
  if (resolution < 16) throw contract_violation("grid resolution must be at least 16");
  const double ly0 = std::log(model.x0);
  const double width = kGridDecades * std::log(10.0);
  GridResult g;
  g.resolution = resolution;
  g.spacing = width / resolution;
  for (int i = 1; i <= resolution; ++i) {
    const double y1 = ly0 - width * i / resolution;
    for (int j = i + 1; j <= resolution; ++j) {
      const double y2 = ly0 - width * j / resolution;
      if (!pathway::objective_domain(model, y1, y2)) continue;
      const double v = pathway::objective_log(model, y1, y2);
      if (v < g.value) {
        g.value = v;
        g.y = {y1, y2};
      }
    }
  }
  return g;
}

struct Allocation {
  pathway::EnzymeVector e_star;
  double flux = 0.0;           // J* = e_T / objective at the minimizer
  double specific_flux = 0.0;  // J/e_T from the steady state re-solved at e_star
  OptimizationResult optimum;
  pathway::SteadyState state;     // steady state re-solved at e_star
  double concentration_gap = 0.0;  // max relative |x - exp(y*)|
};

/// Optimal enzyme split for total enzyme e_T: e_i proportional to 1/f_i at the
/// objective minimizer, followed by an independent steady-state solve.
inline Allocation optimal_enzyme_allocation(const PathwayModel& model, double e_total, double tol = 1e-10) {
  if (!(e_total > 0.0)) throw contract_violation("total enzyme must be positive");
  Allocation a;
  a.optimum = minimize_objective(model, tol);
  if (!a.optimum.converged) {
    throw non_convergence("objective minimization did not converge",
                          Vector(Eigen::Vector2d(a.optimum.y_star)));
  }
  const auto at = pathway::objective_log_full(model, a.optimum.y_star(0), a.optimum.y_star(1));
  for (std::size_t i = 0; i < 3; ++i) a.e_star.e[i] = e_total * at.terms[i] / at.value;
  a.flux = e_total / at.value;
  a.state = pathway::solve_steady_state(model, a.e_star);
  a.specific_flux = a.state.flux / a.e_star.total();
  const double x1 = std::exp(a.optimum.y_star(0));
  const double x2 = std::exp(a.optimum.y_star(1));
  a.concentration_gap = std::max(std::abs(a.state.x1 - x1) / x1, std::abs(a.state.x2 - x2) / x2);
  return a;
}

}  // namespace invex::optimize
