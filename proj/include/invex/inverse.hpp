#pragma once

/*
 * Inverse maps and the negative-gradient criterion for convex inverses.
 *
 * For f: D -> R invertible with inverse g, differentiating g(f(x)) = x gives
 *
 *   Dg(f(x)) Df(x) = I
 *   Df^T H_{g_m} Df = -sum_k (dg_m/dy_k) H_{f_k}        for every component m,
 *
 * so when every H_{f_k} is positive definite and grad g_m < 0 entrywise,
 * H_{g_m} is congruent to a positive combination of positive definite
 * matrices and hence positive definite. theorem1_verify checks hypotheses,
 * conclusion and both identities at sample points.
 */

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/LU>

#include "invex/errors.hpp"
#include "invex/matcert.hpp"
#include "invex/numdiff.hpp"
#include "invex/sampling.hpp"
#include "invex/smooth_map.hpp"

namespace invex::inverse {

inline double max_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/**
 * Solves f(x) = y by damped Newton from `x_guess`. The full step is halved
 * (at most 40 times) until the trial point is in-domain and the max-norm
 * residual decreases.
 */
inline Vector newton_invert(const SmoothMap& f, const Vector& y, const Vector& x_guess, double tol,
                            int max_iter) {
  if (f.dim_in != f.dim_out) throw contract_violation("newton_invert needs a square map");
  if (y.size() != f.dim_out) throw contract_violation("target has the wrong dimension");
  if (!f.contains(x_guess)) throw contract_violation("initial guess is outside the domain");
  constexpr int kMaxHalvings = 40;

  Vector x = x_guess;
  double res = max_norm(f.eval(x) - y);
  for (int iter = 0; iter < max_iter; ++iter) {
    if (res <= tol) return x;
    const Matrix jac = numdiff::jacobian(f, x);
    const Eigen::FullPivLU<Matrix> lu(jac);
    if (!lu.isInvertible()) throw inversion_failure("singular Jacobian during Newton inversion");
    const Vector step = lu.solve(y - f.eval(x));

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, lambda *= 0.5) {
      const Vector trial = x + lambda * step;
      if (!f.contains(trial)) continue;
      const double trial_res = max_norm(f.eval(trial) - y);
      if (trial_res < res) {
        x = trial;
        res = trial_res;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (res <= tol) return x;
      throw non_convergence("Newton line search stalled at residual " + std::to_string(res), x);
    }
  }
  if (res <= tol) return x;
  throw non_convergence("Newton inversion exceeded " + std::to_string(max_iter) + " iterations", x);
}

/// g''(f(x)) = -g'(f(x)) f''(x) / f'(x)^2.
inline double scalar_inverse_second_derivative(double f_prime, double f_second, double g_prime) {
  if (f_prime == 0.0) throw contract_violation("f'(x) must be nonzero");
  return -g_prime * f_second / (f_prime * f_prime);
}

namespace detail {

inline Vector forward_point(const SmoothMap& f, const SmoothMap& g, const Vector& x) {
  if (f.dim_out != g.dim_in || g.dim_out != f.dim_in) {
    throw contract_violation("f and g have incompatible dimensions");
  }
  if (!f.contains(x)) throw contract_violation("x is outside the domain of f");
  Vector y = f.eval(x);
  if (!g.contains(y)) throw contract_violation("f(x) is outside the domain of g");
  return y;
}

inline double congruence_residual(const Matrix& df, const Matrix& hess_g, const Vector& grad_g,
                                  std::span<const Matrix> hess_f) {
  const Matrix pulled = df.transpose() * hess_g * df;
  Matrix combo = Matrix::Zero(df.cols(), df.cols());
  for (std::size_t k = 0; k < hess_f.size(); ++k) combo += grad_g(static_cast<int>(k)) * hess_f[k];
  const double scale = 1.0 + std::max(matcert::max_abs(pulled), matcert::max_abs(combo));
  return matcert::max_abs(pulled + combo) / scale;
}

}  // namespace detail

/// max |Dg(f(x)) Df(x) - I|.
inline double jacobian_identity_residual(const SmoothMap& f, const SmoothMap& g, const Vector& x) {
  const Vector y = detail::forward_point(f, g, x);
  const Matrix prod = numdiff::jacobian(g, y) * numdiff::jacobian(f, x);
  return matcert::max_abs(prod - Matrix::Identity(prod.rows(), prod.cols()));
}

/// Normalized max-norm of Df^T H_{g_m} Df + sum_k (dg_m/dy_k) H_{f_k}.
inline double congruence_identity_residual(const SmoothMap& f, const SmoothMap& g, const Vector& x, int m) {
  const Vector y = detail::forward_point(f, g, x);
  if (m < 0 || m >= g.dim_out) throw contract_violation("component index out of range");
  std::vector<Matrix> hess_f;
  for (int k = 0; k < f.dim_out; ++k) hess_f.push_back(numdiff::hessian(component(f, k), x));
  const Vector grad = numdiff::jacobian(g, y).row(m).transpose();
  return detail::congruence_residual(numdiff::jacobian(f, x), numdiff::hessian(component(g, m), y), grad,
                                     hess_f);
}

struct Theorem1Tolerances {
  double round_trip = 1e-8;
  double jacobian_identity = 1e-6;  // analytic-gradient checks
  double congruence = 1e-4;         // checks involving FD Hessians
  double pd_rel = 1e-4;             // relative PD tolerance for FD Hessians
};

enum class Theorem1Verdict {
  hypotheses_hold_conclusion_holds,
  hypotheses_fail,
  conclusion_fails_despite_hypotheses,
};

constexpr std::string_view to_string(Theorem1Verdict v) {
  switch (v) {
    case Theorem1Verdict::hypotheses_hold_conclusion_holds: return "hypotheses_hold_conclusion_holds";
    case Theorem1Verdict::hypotheses_fail: return "hypotheses_fail";
    case Theorem1Verdict::conclusion_fails_despite_hypotheses: return "conclusion_fails_despite_hypotheses";
  }
  return "?";
}

/// Checks on one inverse component g_m at one sample.
struct ComponentCheck {
  Vector gradient;  // grad g_m(y)
  bool gradient_negative = false;
  std::vector<int> support;  // coordinates where grad g_m(y) != 0
  double congruence_residual = 0.0;
  matcert::DefinitenessVerdict hessian_g;             // H_{g_m}(y)
  matcert::DefinitenessVerdict pulled_back;           // Df^T H_{g_m} Df
  matcert::DefinitenessVerdict hessian_g_on_support;  // H_{g_m} restricted to `support`
};

struct SampleRecord {
  Vector x;
  Vector y;
  double round_trip_residual = 0.0;
  double jacobian_identity_residual = 0.0;
  std::vector<matcert::DefinitenessVerdict> hessian_f;  // H_{f_k}(x), all k
  std::vector<ComponentCheck> components;

  bool hypotheses_hold() const {
    const bool convex = std::all_of(hessian_f.begin(), hessian_f.end(),
                                    [](const auto& v) { return v.positive_definite(); });
    const bool decreasing = std::all_of(components.begin(), components.end(),
                                        [](const auto& c) { return c.gradient_negative; });
    return convex && decreasing;
  }
  bool conclusion_holds() const {
    return std::all_of(components.begin(), components.end(),
                       [](const auto& c) { return c.hessian_g.positive_definite(); });
  }
};

struct Theorem1Report {
  std::vector<SampleRecord> samples;
  Theorem1Verdict overall = Theorem1Verdict::hypotheses_fail;
  bool residuals_within_tolerance = true;
  double max_round_trip_residual = 0.0;
  double max_jacobian_identity_residual = 0.0;
  double max_congruence_residual = 0.0;
};

inline SampleRecord verify_sample(const SmoothMap& f, const SmoothMap& g, const Vector& x,
                                  const Theorem1Tolerances& tol) {
  SampleRecord rec;
  rec.x = x;
  rec.y = detail::forward_point(f, g, x);
  rec.round_trip_residual = max_norm(g.eval(rec.y) - x);

  const Matrix df = numdiff::jacobian(f, x);
  const Matrix dg = numdiff::jacobian(g, rec.y);
  rec.jacobian_identity_residual = matcert::max_abs(dg * df - Matrix::Identity(df.cols(), df.cols()));

  std::vector<Matrix> hess_f;
  for (int k = 0; k < f.dim_out; ++k) {
    hess_f.push_back(numdiff::hessian(component(f, k), x));
    rec.hessian_f.push_back(matcert::certify_positive_definite(
        hess_f.back(), matcert::scaled_tolerance(hess_f.back(), tol.pd_rel)));
  }

  for (int m = 0; m < g.dim_out; ++m) {
    ComponentCheck c;
    c.gradient = dg.row(m).transpose();
    c.gradient_negative = (c.gradient.array() < 0.0).all();
    for (int i = 0; i < c.gradient.size(); ++i) {
      if (c.gradient(i) != 0.0) c.support.push_back(i);
    }
    const Matrix hg = numdiff::hessian(component(g, m), rec.y);
    c.hessian_g = matcert::certify_positive_definite(hg, matcert::scaled_tolerance(hg, tol.pd_rel));
    const Matrix pulled = matcert::congruence_transform(df, hg);
    c.pulled_back = matcert::certify_positive_definite(pulled, matcert::scaled_tolerance(pulled, tol.pd_rel));
    if (!c.support.empty()) {
      const Matrix sub = hg(c.support, c.support);
      c.hessian_g_on_support = matcert::certify_positive_definite(sub, matcert::scaled_tolerance(sub, tol.pd_rel));
    }
    c.congruence_residual = detail::congruence_residual(df, hg, c.gradient, hess_f);
    rec.components.push_back(std::move(c));
  }
  return rec;
}

/// Runs the checks at every point of `points` (all in the domain of f).
/// Throws invalid_pair when g fails to invert f at some point.
inline Theorem1Report theorem1_verify(const SmoothMap& f, const SmoothMap& g, std::span<const Vector> points,
                                      const Theorem1Tolerances& tol = {}) {
  if (f.dim_in != f.dim_out) throw contract_violation("theorem1_verify needs maps R^N -> R^N");
  Theorem1Report report;
  report.samples.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    report.samples[i] = verify_sample(f, g, points[i], tol);
    if (!(report.samples[i].round_trip_residual <= tol.round_trip)) {
      throw invalid_pair("g does not invert f at sample " + std::to_string(i) + " (round-trip residual " +
                             std::to_string(report.samples[i].round_trip_residual) + ")",
                         i);
    }
  }

  bool hypotheses = true;
  bool conclusion = true;
  for (const auto& s : report.samples) {
    hypotheses = hypotheses && s.hypotheses_hold();
    conclusion = conclusion && s.conclusion_holds();
    report.max_round_trip_residual = std::max(report.max_round_trip_residual, s.round_trip_residual);
    report.max_jacobian_identity_residual =
        std::max(report.max_jacobian_identity_residual, s.jacobian_identity_residual);
    for (const auto& c : s.components) {
      report.max_congruence_residual = std::max(report.max_congruence_residual, c.congruence_residual);
    }
  }
  report.residuals_within_tolerance = report.max_jacobian_identity_residual <= tol.jacobian_identity &&
                                      report.max_congruence_residual <= tol.congruence;
  if (!hypotheses) {
    report.overall = Theorem1Verdict::hypotheses_fail;
  } else {
    report.overall = conclusion ? Theorem1Verdict::hypotheses_hold_conclusion_holds
                                : Theorem1Verdict::conclusion_fails_despite_hypotheses;
  }
  return report;
}

inline Theorem1Report theorem1_verify(const SmoothMap& f, const SmoothMap& g, const DomainSampler& sampler,
                                      const Theorem1Tolerances& tol = {}) {
  const auto points = sampler.sample_in(f);
  return theorem1_verify(f, g, points, tol);
}

}  // namespace invex::inverse
