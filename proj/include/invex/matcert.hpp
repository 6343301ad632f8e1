#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Eigenvalues>

#include "invex/errors.hpp"
#include "invex/smooth_map.hpp"

namespace invex::matcert {

enum class Definiteness { positive_definite, not_positive_definite, indeterminate };

constexpr std::string_view to_string(Definiteness d) {
  switch (d) {
    case Definiteness::positive_definite: return "positive_definite";
    case Definiteness::not_positive_definite: return "not_positive_definite";
    case Definiteness::indeterminate: return "indeterminate";
  }
  return "?";
}

/// Result of certifying a symmetric matrix. `failing_direction` is the unit
/// eigenvector of the smallest eigenvalue whenever the matrix does not
/// certify, so v^T S v <= tolerance holds for it.
struct DefinitenessVerdict {
  Definiteness status = Definiteness::indeterminate;
  double min_eigenvalue_estimate = 0.0;
  double tolerance = 0.0;
  std::optional<Vector> failing_direction;

  bool positive_definite() const { return status == Definiteness::positive_definite; }
};

inline double max_abs(const Matrix& s) { return s.size() == 0 ? 0.0 : s.cwiseAbs().maxCoeff(); }

/// 1e-9 (1 + max|S_ij|), suited to matrices known in closed form.
inline double default_pd_tolerance(const Matrix& s) { return 1e-9 * (1.0 + max_abs(s)); }

/// rel (1 + max|S_ij|); finite-difference Hessians use rel = 1e-4.
inline double scaled_tolerance(const Matrix& s, double rel) { return rel * (1.0 + max_abs(s)); }

inline bool is_symmetric(const Matrix& s, double rel = 1e-12) {
  if (s.rows() != s.cols()) return false;
  return max_abs(s - s.transpose()) <= rel * std::max(max_abs(s), 1e-300);
}

inline DefinitenessVerdict certify_positive_definite(const Matrix& s, double pd_tolerance) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw contract_violation("certify_positive_definite: matrix must be square and non-empty");
  }
  if (!s.allFinite()) throw contract_violation("certify_positive_definite: non-finite entries");
  if (!is_symmetric(s)) throw contract_violation("certify_positive_definite: matrix is not symmetric");
  if (!(pd_tolerance >= 0.0)) throw contract_violation("pd_tolerance must be nonnegative");

  const Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success) throw error("symmetric eigensolver failed");

  DefinitenessVerdict v;
  v.tolerance = pd_tolerance;
  v.min_eigenvalue_estimate = eig.eigenvalues()(0);  // ascending order
  if (v.min_eigenvalue_estimate > pd_tolerance) {
    v.status = Definiteness::positive_definite;
  } else {
    v.status = v.min_eigenvalue_estimate < -pd_tolerance ? Definiteness::not_positive_definite
                                                         : Definiteness::indeterminate;
    v.failing_direction = eig.eigenvectors().col(0);
  }
  return v;
}

inline DefinitenessVerdict certify_positive_definite(const Matrix& s) {
  return certify_positive_definite(s, default_pd_tolerance(s));
}

/// W^T A W, symmetrized.
inline Matrix congruence_transform(const Matrix& w, const Matrix& a) {
  if (w.rows() != w.cols()) throw contract_violation("congruence_transform: W must be square");
  if (a.rows() != a.cols() || a.rows() != w.rows()) {
    throw contract_violation("congruence_transform: dimension mismatch between W and A");
  }
  if (!is_symmetric(a)) throw contract_violation("congruence_transform: A must be symmetric");
  const Matrix b = w.transpose() * a * w;
  return 0.5 * (b + b.transpose());
}

/// sum_k c_k A_k for strictly positive c_k.
inline Matrix positive_combination(std::span<const double> coeffs, std::span<const Matrix> mats) {
  if (coeffs.size() != mats.size() || mats.empty()) {
    throw contract_violation("positive_combination: need one coefficient per matrix");
  }
  const auto n = mats.front().rows();
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < mats.size(); ++k) {
    if (!(coeffs[k] > 0.0)) throw contract_violation("positive_combination: coefficient must be > 0");
    if (mats[k].rows() != n || mats[k].cols() != n) {
      throw contract_violation("positive_combination: matrices differ in dimension");
    }
    if (!is_symmetric(mats[k])) throw contract_violation("positive_combination: matrix not symmetric");
    sum += coeffs[k] * mats[k];
  }
  return 0.5 * (sum + sum.transpose());
}

}  // namespace invex::matcert
