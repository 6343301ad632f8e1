#pragma once

/*
 * Three-step linear pathway  X0 -e1-> X1 -e2-> X2 -e3-> (sink)  with rescaled
 * reversible Michaelis-Menten rates
 *
 *   f_i(x_{i-1}, x_i) = (x_{i-1} - x_i) / (a_i x_{i-1} + b_i x_i + c_i),   x_3 = 0.
 *
 * Reactions are indexed 0, 1, 2 here (enzymes e[0..2], parameters a[0..2]).
 * x0 is a fixed boundary concentration. With z_i = e_i / J the steady state
 * reads z_i f_i = 1, which is linear in x_i given x_{i-1}; every solve below
 * exploits that cascade structure.
 */

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "invex/errors.hpp"
#include "invex/matcert.hpp"
#include "invex/numdiff.hpp"
#include "invex/sampling.hpp"
#include "invex/smooth_map.hpp"

namespace invex::pathway {

using Triple = std::array<double, 3>;

struct PathwayModel {
  Triple a{1.0, 1.0, 1.0};
  Triple b{1.0, 1.0, 1.0};
  Triple c{1.0, 1.0, 1.0};
  double x0 = 10.0;

  /// a = b = c = 1, x0 = 10.
  static PathwayModel canonical() { return {}; }

  void validate() const {
    for (int i = 0; i < 3; ++i) {
      if (!(a[i] > 0.0) || !(b[i] > 0.0) || !(c[i] > 0.0) || !std::isfinite(a[i] + b[i] + c[i])) {
        throw contract_violation("pathway parameters a, b, c must be strictly positive");
      }
    }
    if (!(x0 > 0.0) || !std::isfinite(x0)) throw contract_violation("x0 must be strictly positive");
  }
};

struct EnzymeVector {
  Triple e{1.0, 1.0, 1.0};

  double total() const { return e[0] + e[1] + e[2]; }
  EnzymeVector scaled(double lambda) const { return {{lambda * e[0], lambda * e[1], lambda * e[2]}}; }
};

struct SteadyState {
  double x0 = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  double flux = 0.0;
  std::array<double, 2> residuals{};  // right-hand sides of the ODE at the state
  Triple z{};                         // z_i = e_i / J

  double max_residual() const { return std::max(std::abs(residuals[0]), std::abs(residuals[1])); }
};

/// Rate law of reaction i (0-based). Reaction 2 ignores `x_next` (sink).
inline double rate(const PathwayModel& model, int i, double x_prev, double x_next) {
  if (i < 0 || i > 2) throw contract_violation("reaction index must be 0, 1 or 2");
  if (i == 2) x_next = 0.0;
  if (!(x_prev >= 0.0) || !(x_next >= 0.0)) throw contract_violation("concentrations must be nonnegative");
  const auto ii = static_cast<std::size_t>(i);
  return (x_prev - x_next) / (model.a[ii] * x_prev + model.b[ii] * x_next + model.c[ii]);
}

// ---------------------------------------------------------------------------
// Steady state
// ---------------------------------------------------------------------------

namespace detail {

struct CascadeTrial {
  bool feasible = false;
  double x1 = 0.0;
  double x2 = 0.0;
  double residual = 0.0;  // x2 from the cascade minus x2 forced by z_3 f_3(x2) = 1
};

// Forward cascade for trial flux J: z_i = e_i/J, x_i = (x_{i-1}(z_i - a_i) - c_i)/(z_i + b_i).
inline CascadeTrial forward_cascade(const PathwayModel& m, const EnzymeVector& e, double flux) {
  CascadeTrial t;
  Triple z;
  for (std::size_t i = 0; i < 3; ++i) {
    z[i] = e.e[i] / flux;
    if (!(z[i] > m.a[i])) return t;
  }
  t.x1 = (m.x0 * (z[0] - m.a[0]) - m.c[0]) / (z[0] + m.b[0]);
  t.x2 = (t.x1 * (z[1] - m.a[1]) - m.c[1]) / (z[1] + m.b[1]);
  if (!(m.x0 > t.x1 && t.x1 > t.x2 && t.x2 > 0.0)) return t;
  t.feasible = true;
  t.residual = t.x2 - m.c[2] / (z[2] - m.a[2]);
  return t;
}

}  // namespace detail

/**
 * Steady state for enzyme levels `e` by bisection on the flux J.
 *
 * The cascade residual decreases in J and the cascade becomes infeasible
 * beyond some J, so "infeasible or residual < 0" marks J as too large. The
 * bracket starts at (0, (1 - 1e-12) min_i e_i/a_i) and is bisected to
 * adjacent doubles.
 */
inline SteadyState solve_steady_state(const PathwayModel& model, const EnzymeVector& e, double tol = 1e-10) {
  model.validate();
  for (double ei : e.e) {
    if (!(ei > 0.0) || !std::isfinite(ei)) throw contract_violation("enzyme levels must be strictly positive");
  }
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i) hi = std::min(hi, e.e[i] / model.a[i]);
  hi *= 1.0 - 1e-12;
  double lo = 0.0;

  auto too_large = [&](double j) {
    const auto t = detail::forward_cascade(model, e, j);
    return !t.feasible || t.residual < 0.0;
  };
  if (!too_large(hi)) throw infeasible_state("no feasible flux bracket: residual stays positive at J_upper");

  constexpr int kMaxBisections = 4000;
  int it = 0;
  for (; it < kMaxBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    (too_large(mid) ? hi : lo) = mid;
  }
  if (it == kMaxBisections) throw solver_error("flux bisection did not converge", lo, hi);

  // lo is feasible unless it never moved off zero.
  auto pick = detail::forward_cascade(model, e, lo);
  double flux = lo;
  const auto at_hi = detail::forward_cascade(model, e, hi);
  if (at_hi.feasible && (!pick.feasible || std::abs(at_hi.residual) < std::abs(pick.residual))) {
    pick = at_hi;
    flux = hi;
  }
  if (!pick.feasible || !(flux > 0.0)) {
    throw infeasible_state("no feasible steady state with x0 > x1 > x2 > 0 for these enzyme levels");
  }

  SteadyState s;
  s.x0 = model.x0;
  s.x1 = pick.x1;
  s.x2 = pick.x2;
  s.flux = flux;
  const double v1 = e.e[0] * rate(model, 0, s.x0, s.x1);
  const double v2 = e.e[1] * rate(model, 1, s.x1, s.x2);
  const double v3 = e.e[2] * rate(model, 2, s.x2, 0.0);
  s.residuals = {v1 - v2, v2 - v3};
  for (std::size_t i = 0; i < 3; ++i) s.z[i] = e.e[i] / flux;
  if (!(s.max_residual() <= tol)) {
    throw solver_error("steady-state residual " + std::to_string(s.max_residual()) + " exceeds tolerance", lo,
                       hi);
  }
  return s;
}

/// J / (e_1 + e_2 + e_3).
inline double specific_flux(const PathwayModel& model, const EnzymeVector& e, double tol = 1e-10) {
  return solve_steady_state(model, e, tol).flux / e.total();
}

/// e_i = J / f_i at a steady state.
inline EnzymeVector reconstruct_enzymes(const PathwayModel& model, const SteadyState& s) {
  return {{s.flux / rate(model, 0, s.x0, s.x1), s.flux / rate(model, 1, s.x1, s.x2),
           s.flux / rate(model, 2, s.x2, 0.0)}};
}

// ---------------------------------------------------------------------------
// Reciprocal rates in log variables
// ---------------------------------------------------------------------------

/// 1/f(p, q) = (a p + b q + c)/(p - q) and its derivatives with respect to
/// u = log p and v = log q. For the sink reaction q = 0 and the v-parts vanish.
struct ReciprocalRate {
  double value = 0.0;
  double du = 0.0, dv = 0.0;
  double duu = 0.0, dvv = 0.0, duv = 0.0;
};

inline ReciprocalRate reciprocal_rate(double a, double b, double c, double p, double q) {
  const double d = p - q;
  const double s = a + b;
  ReciprocalRate r;
  r.value = (a * p + b * q + c) / d;
  const double tp = -(s * q + c) / (d * d);
  const double tq = (s * p + c) / (d * d);
  const double tpp = 2.0 * (s * q + c) / (d * d * d);
  const double tqq = 2.0 * (s * p + c) / (d * d * d);
  const double tpq = -(s * (p + q) + 2.0 * c) / (d * d * d);
  r.du = p * tp;
  r.duu = p * tp + p * p * tpp;
  r.dv = q * tq;
  r.dvv = q * tq + q * q * tqq;
  r.duv = p * q * tpq;
  return r;
}

inline ReciprocalRate reciprocal_rate(const PathwayModel& m, int i, double p, double q) {
  const auto ii = static_cast<std::size_t>(i);
  return reciprocal_rate(m.a[ii], m.b[ii], m.c[ii], p, i == 2 ? 0.0 : q);
}

// ---------------------------------------------------------------------------
// Objective e_T / J in log concentrations
// ---------------------------------------------------------------------------

inline bool objective_domain(const PathwayModel& model, double y1, double y2) {
  return std::isfinite(y1) && std::isfinite(y2) && std::log(model.x0) > y1 && y1 > y2;
}

struct ObjectiveValue {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
  Triple terms{};  // z_i = 1/f_i
};

/// 1/f_1(x0, e^y1) + 1/f_2(e^y1, e^y2) + 1/f_3(e^y2) with analytic derivatives.
inline ObjectiveValue objective_log_full(const PathwayModel& model, double y1, double y2) {
  if (!objective_domain(model, y1, y2)) throw domain_error("objective requires log x0 > y1 > y2");
  const double x1 = std::exp(y1);
  const double x2 = std::exp(y2);
  if (!(model.x0 > x1 && x1 > x2 && x2 > 0.0)) throw domain_error("objective requires x0 > x1 > x2 > 0");
  const auto r1 = reciprocal_rate(model, 0, model.x0, x1);
  const auto r2 = reciprocal_rate(model, 1, x1, x2);
  const auto r3 = reciprocal_rate(model, 2, x2, 0.0);
  ObjectiveValue o;
  o.terms = {r1.value, r2.value, r3.value};
  o.value = r1.value + r2.value + r3.value;
  o.gradient << r1.dv + r2.du, r2.dv + r3.du;
  o.hessian << r1.dvv + r2.duu, r2.duv, r2.duv, r2.dvv + r3.duu;
  return o;
}

inline double objective_log(const PathwayModel& model, double y1, double y2) {
  return objective_log_full(model, y1, y2).value;
}

/// The objective as a SmoothMap on (y1, y2). Derivatives are left to finite
/// differences unless `analytic` is set.
inline SmoothMap objective_map(const PathwayModel& model, bool analytic = false) {
  SmoothMap f;
  f.dim_in = 2;
  f.dim_out = 1;
  f.in_domain = [model](const Vector& y) { return objective_domain(model, y(0), y(1)); };
  f.eval = [model](const Vector& y) { return Vector::Constant(1, objective_log(model, y(0), y(1))); };
  if (analytic) {
    f.jacobian = [model](const Vector& y) -> Matrix {
      return objective_log_full(model, y(0), y(1)).gradient.transpose();
    };
    f.hessians = [model](const Vector& y) {
      return std::vector<Matrix>{objective_log_full(model, y(0), y(1)).hessian};
    };
  }
  return f;
}

// ---------------------------------------------------------------------------
// z-variables and the explicit inverse
// ---------------------------------------------------------------------------

inline bool log_concentration_domain(const Vector& y) {
  return y.size() == 3 && y.allFinite() && y(0) > y(1) && y(1) > y(2);
}

inline bool z_domain(const PathwayModel& model, const Vector& z) {
  if (z.size() != 3 || !z.allFinite()) return false;
  for (int i = 0; i < 3; ++i) {
    if (!(z(i) > model.a[static_cast<std::size_t>(i)])) return false;
  }
  return true;
}

/// z_i = 1/f_i(x_{i-1}, x_i) from log concentrations y = (y0, y1, y2); x0 is free here.
inline Vector z_from_log_concentrations(const PathwayModel& model, const Vector& y) {
  if (!log_concentration_domain(y)) throw domain_error("z map requires y0 > y1 > y2");
  const Vector x = y.array().exp();
  Vector z(3);
  z(0) = reciprocal_rate(model, 0, x(0), x(1)).value;
  z(1) = reciprocal_rate(model, 1, x(1), x(2)).value;
  z(2) = reciprocal_rate(model, 2, x(2), 0.0).value;
  return z;
}

/// Concentrations (x0, x1, x2) from z by the backward cascade
/// x_{i-1} = gamma_i + x_i (1 + M_i), gamma_i = c_i/(z_i - a_i), M_i = (a_i + b_i)/(z_i - a_i),
/// starting from x_3 = 0.
inline Vector concentrations_from_z(const PathwayModel& model, const Vector& z) {
  if (!z_domain(model, z)) throw domain_error("inverse cascade requires z_i > a_i");
  Vector x(3);
  double next = 0.0;
  for (int i = 2; i >= 0; --i) {
    const auto ii = static_cast<std::size_t>(i);
    const double gap = z(i) - model.a[ii];
    const double gamma = model.c[ii] / gap;
    const double big_m = (model.a[ii] + model.b[ii]) / gap;
    next = gamma + next * (1.0 + big_m);
    x(i) = next;
  }
  return x;
}

/// (y0, y1, y2) = log of concentrations_from_z.
inline Vector inverse_cascade(const PathwayModel& model, const Vector& z) {
  return concentrations_from_z(model, z).array().log();
}

/// Analytic d y_m / d z_i (rows m, columns i); y_m depends on z_i for i >= m only.
inline Matrix cascade_gradients(const PathwayModel& model, const Vector& z) {
  const Vector x = concentrations_from_z(model, z);
  Matrix dx = Matrix::Zero(3, 3);  // d x_m / d z_i
  for (int m = 2; m >= 0; --m) {
    const auto mm = static_cast<std::size_t>(m);
    const double gap = z(m) - model.a[mm];
    const double gamma = model.c[mm] / gap;
    const double big_m = (model.a[mm] + model.b[mm]) / gap;
    const double x_next = m == 2 ? 0.0 : x(m + 1);
    dx(m, m) = -(gamma + x_next * big_m) / gap;
    if (m < 2) {
      for (int i = m + 1; i < 3; ++i) dx(m, i) = (1.0 + big_m) * dx(m + 1, i);
    }
  }
  Matrix dy(3, 3);
  for (int m = 0; m < 3; ++m) dy.row(m) = dx.row(m) / x(m);
  return dy;
}

/// y = (y0, y1, y2) -> z with analytic Jacobian and Hessians.
inline SmoothMap forward_map(const PathwayModel& model) {
  SmoothMap f;
  f.dim_in = 3;
  f.dim_out = 3;
  f.in_domain = [](const Vector& y) { return log_concentration_domain(y); };
  f.eval = [model](const Vector& y) { return z_from_log_concentrations(model, y); };
  auto parts = [model](const Vector& y) {
    const Vector x = y.array().exp();
    return std::array<ReciprocalRate, 3>{reciprocal_rate(model, 0, x(0), x(1)),
                                         reciprocal_rate(model, 1, x(1), x(2)),
                                         reciprocal_rate(model, 2, x(2), 0.0)};
  };
  f.jacobian = [parts](const Vector& y) -> Matrix {
    const auto r = parts(y);
    Matrix j = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) {
      j(i, i) = r[static_cast<std::size_t>(i)].du;
      if (i < 2) j(i, i + 1) = r[static_cast<std::size_t>(i)].dv;
    }
    return j;
  };
  f.hessians = [parts](const Vector& y) {
    const auto r = parts(y);
    std::vector<Matrix> hs;
    for (int i = 0; i < 3; ++i) {
      const auto& ri = r[static_cast<std::size_t>(i)];
      Matrix h = Matrix::Zero(3, 3);
      h(i, i) = ri.duu;
      if (i < 2) {
        h(i + 1, i + 1) = ri.dvv;
        h(i, i + 1) = h(i + 1, i) = ri.duv;
      }
      hs.push_back(h);
    }
    return hs;
  };
  return f;
}

/// z -> y via the backward cascade, with the analytic Jacobian. Hessians are
/// left to finite differences.
inline SmoothMap inverse_map(const PathwayModel& model) {
  SmoothMap g;
  g.dim_in = 3;
  g.dim_out = 3;
  g.in_domain = [model](const Vector& z) { return z_domain(model, z); };
  g.eval = [model](const Vector& z) { return inverse_cascade(model, z); };
  g.jacobian = [model](const Vector& z) { return cascade_gradients(model, z); };
  return g;
}

/// Log-uniform sampler on (a_i + 0.1, a_i + 10).
inline DomainSampler z_sampler(const PathwayModel& model, std::uint64_t seed, int count) {
  DomainSampler s;
  for (double ai : model.a) s.box.push_back({ai + 0.1, ai + 10.0});
  s.distribution = Distribution::log_uniform;
  s.seed = seed;
  s.count = count;
  return s;
}

/// Uniform sampler on the enzyme box [lo, hi]^3.
inline DomainSampler enzyme_sampler(std::uint64_t seed, int count, double lo = 0.2, double hi = 5.0) {
  DomainSampler s;
  s.box.assign(3, Interval{lo, hi});
  s.distribution = Distribution::uniform;
  s.seed = seed;
  s.count = count;
  return s;
}

// ---------------------------------------------------------------------------
// Specific-flux concavity
// ---------------------------------------------------------------------------

inline bool positive_enzymes(const Vector& e) { return e.size() == 3 && e.allFinite() && (e.array() > 0.0).all(); }

inline EnzymeVector to_enzymes(const Vector& e) { return {{e(0), e(1), e(2)}}; }

/// e -> J(e).
inline SmoothMap flux_map(const PathwayModel& model, double solver_tol = 1e-10) {
  SmoothMap f;
  f.dim_in = 3;
  f.dim_out = 1;
  f.in_domain = positive_enzymes;
  f.eval = [model, solver_tol](const Vector& e) {
    return Vector::Constant(1, solve_steady_state(model, to_enzymes(e), solver_tol).flux);
  };
  return f;
}

/// e -> J(e) / e_T.
inline SmoothMap specific_flux_map(const PathwayModel& model, double solver_tol = 1e-10) {
  SmoothMap f;
  f.dim_in = 3;
  f.dim_out = 1;
  f.in_domain = positive_enzymes;
  f.eval = [model, solver_tol](const Vector& e) {
    return Vector::Constant(1, specific_flux(model, to_enzymes(e), solver_tol));
  };
  return f;
}

struct ConcavitySample {
  Triple e{};
  double flux = 0.0;
  double specific_flux = 0.0;
  double max_eigenvalue = 0.0;           // of the FD Hessian of J/e_T
  double euler_flux_residual = 0.0;      // |grad J . e - J| / J
  double euler_specific_residual = 0.0;  // |grad(J/e_T) . e| / (J/e_T)
  double radial_residual = 0.0;          // max |H_J e|
  double flux_max_eigenvalue = 0.0;      // of the FD Hessian of J
  double simplex_max_eigenvalue = 0.0;   // of the J/e_T Hessian on the plane sum(v) = 0
};

struct ConcavityReport {
  std::vector<ConcavitySample> samples;
  std::size_t excluded = 0;  // samples where the solver or a stencil failed
  double tolerance = 1e-4;
  double euler_tolerance = 1e-5;
  double max_eigenvalue = -std::numeric_limits<double>::infinity();
  double max_euler_residual = 0.0;
  double max_radial_residual = 0.0;
  double max_flux_eigenvalue = -std::numeric_limits<double>::infinity();
  double max_simplex_eigenvalue = -std::numeric_limits<double>::infinity();

  bool concave_at_samples() const { return !samples.empty() && max_eigenvalue <= tolerance; }
  bool euler_identities_hold() const { return !samples.empty() && max_euler_residual <= euler_tolerance; }
};

inline ConcavityReport specific_flux_concavity_check(const PathwayModel& model, const DomainSampler& sampler,
                                                     double tol = 1e-4, double euler_tol = 1e-5,
                                                     double solver_tol = 1e-10) {
  model.validate();
  if (sampler.dim() != 3) throw contract_violation("enzyme sampler must be three-dimensional");
  const SmoothMap flux = flux_map(model, solver_tol);
  const SmoothMap sflux = specific_flux_map(model, solver_tol);

  // Orthonormal basis of {v : v1 + v2 + v3 = 0}, the directions that keep e_T fixed.
  Matrix plane(3, 2);
  plane << 1.0, 1.0, -1.0, 1.0, 0.0, -2.0;
  plane.col(0).normalize();
  plane.col(1).normalize();

  ConcavityReport rep;
  rep.tolerance = tol;
  rep.euler_tolerance = euler_tol;
  for (const Vector& e : sampler.sample(positive_enzymes)) {
    ConcavitySample s;
    try {
      s.e = {e(0), e(1), e(2)};
      s.flux = flux.scalar(e);
      s.specific_flux = s.flux / e.sum();
      const Matrix hs = numdiff::hessian(sflux, e);
      s.max_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(hs, Eigen::EigenvaluesOnly).eigenvalues()(2);
      s.euler_flux_residual = std::abs(numdiff::gradient(flux, e).dot(e) - s.flux) / s.flux;
      s.euler_specific_residual = std::abs(numdiff::gradient(sflux, e).dot(e)) / s.specific_flux;
      const Matrix hj = numdiff::hessian(flux, e);
      s.radial_residual = (hj * e).cwiseAbs().maxCoeff();
      s.flux_max_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(hj, Eigen::EigenvaluesOnly).eigenvalues()(2);
      const Matrix on_plane = plane.transpose() * hs * plane;
      s.simplex_max_eigenvalue =
          Eigen::SelfAdjointEigenSolver<Matrix>(on_plane, Eigen::EigenvaluesOnly).eigenvalues()(1);
    } catch (const error&) {
      ++rep.excluded;
      continue;
    }
    rep.max_eigenvalue = std::max(rep.max_eigenvalue, s.max_eigenvalue);
    rep.max_euler_residual =
        std::max({rep.max_euler_residual, s.euler_flux_residual, s.euler_specific_residual});
    rep.max_radial_residual = std::max(rep.max_radial_residual, s.radial_residual);
    rep.max_flux_eigenvalue = std::max(rep.max_flux_eigenvalue, s.flux_max_eigenvalue);
    rep.max_simplex_eigenvalue = std::max(rep.max_simplex_eigenvalue, s.simplex_max_eigenvalue);
    rep.samples.push_back(s);
  }
  return rep;
}

}  // namespace invex::pathway
