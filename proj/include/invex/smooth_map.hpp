#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "invex/errors.hpp"

namespace invex {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/**
 * A smooth map R^dim_in -> R^dim_out restricted to an open domain.
 *
 * Derivative callbacks are optional; an empty std::function means "not
 * supplied" and the numdiff routines fall back to finite differences.
 * `hessians` returns one dim_in x dim_in symmetric matrix per output
 * component. All callbacks must be pure so a map can be shared across
 * threads.
 */
struct SmoothMap {
  int dim_in = 1;
  int dim_out = 1;
  std::function<Vector(const Vector&)> eval;
  std::function<bool(const Vector&)> in_domain;
  std::function<Matrix(const Vector&)> jacobian;
  std::function<std::vector<Matrix>(const Vector&)> hessians;

  bool contains(const Vector& x) const {
    if (x.size() != dim_in || !x.allFinite()) return false;
    return !in_domain || in_domain(x);
  }

  /// Evaluates the map, refusing points outside the domain.
  Vector operator()(const Vector& x) const {
    if (!contains(x)) throw domain_error("SmoothMap evaluated outside its domain");
    return eval(x);
  }

  double scalar(const Vector& x) const { return (*this)(x)(0); }

  bool has_jacobian() const { return static_cast<bool>(jacobian); }
  bool has_hessians() const { return static_cast<bool>(hessians); }
};

/// Builds a scalar-valued map from a callable returning double.
template <typename F>
SmoothMap scalar_map(int dim_in, F f, std::function<bool(const Vector&)> domain = {}) {
  SmoothMap m;
  m.dim_in = dim_in;
  m.dim_out = 1;
  m.eval = [f = std::move(f)](const Vector& x) { return Vector::Constant(1, f(x)); };
  m.in_domain = std::move(domain);
  return m;
}

/// The m-th output component of `f`, keeping analytic derivatives when present.
inline SmoothMap component(const SmoothMap& f, int m) {
  if (m < 0 || m >= f.dim_out) throw contract_violation("component index out of range");
  SmoothMap c;
  c.dim_in = f.dim_in;
  c.dim_out = 1;
  c.in_domain = f.in_domain;
  c.eval = [eval = f.eval, m](const Vector& x) { return Vector::Constant(1, eval(x)(m)); };
  if (f.jacobian) {
    c.jacobian = [jac = f.jacobian, m](const Vector& x) -> Matrix { return jac(x).row(m); };
  }
  if (f.hessians) {
    c.hessians = [hes = f.hessians, m](const Vector& x) {
      return std::vector<Matrix>{hes(x).at(static_cast<std::size_t>(m))};
    };
  }
  return c;
}

/// x -> x on R^n.
inline SmoothMap identity_map(int n) {
  SmoothMap f;
  f.dim_in = n;
  f.dim_out = n;
  f.eval = [](const Vector& x) { return x; };
  f.jacobian = [n](const Vector&) -> Matrix { return Matrix::Identity(n, n); };
  f.hessians = [n](const Vector&) {
    return std::vector<Matrix>(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  };
  return f;
}

/// x -> A x for a square or rectangular A.
inline SmoothMap linear_map(Matrix a) {
  SmoothMap f;
  f.dim_in = static_cast<int>(a.cols());
  f.dim_out = static_cast<int>(a.rows());
  const auto n = a.cols();
  const auto rows = static_cast<std::size_t>(a.rows());
  f.eval = [a](const Vector& x) -> Vector { return a * x; };
  f.jacobian = [a](const Vector&) -> Matrix { return a; };
  f.hessians = [n, rows](const Vector&) { return std::vector<Matrix>(rows, Matrix::Zero(n, n)); };
  return f;
}

}  // namespace invex
