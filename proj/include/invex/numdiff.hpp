#pragma once

/*
 * Central finite differences for gradients, Jacobians and Hessians of
 * SmoothMap objects.
 *
 * First derivatives use h_i = eps^(1/3) max(|x_i|, 1), second derivatives
 * h_i = eps^(1/4) max(|x_i|, 1). When a central stencil leaves the domain the
 * routines switch to a one-sided stencil in whichever direction stays inside,
 * and only then start halving the step. Analytic derivatives attached to the
 * map are returned unchanged.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>
#include <string>

#include "invex/errors.hpp"
#include "invex/smooth_map.hpp"

namespace invex::numdiff {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

inline double first_order_step(double xi) { return std::cbrt(kEps) * std::max(std::abs(xi), 1.0); }
inline double second_order_step(double xi) {
  return std::sqrt(std::sqrt(kEps)) * std::max(std::abs(xi), 1.0);
}

/// Steps are never shrunk below this multiple of the coordinate scale.
inline constexpr double kMinStepFactor = 1e-12;

namespace detail {

// Stencil kinds for one coordinate.
enum class Stencil { central, forward, backward };

struct CoordinateStencil {
  Stencil kind;
  double h;
};

inline Vector shifted(const Vector& x, int i, double delta) {
  Vector y = x;
  y(i) += delta;
  return y;
}

// Chooses a stencil along coordinate i such that every point x + k*h*e_i with
// k in `reach` (central: -reach..reach, one-sided: 0..2*reach) is in-domain.
inline CoordinateStencil choose_stencil(const SmoothMap& f, const Vector& x, int i, double h0,
                                        int reach) {
  const double h_min = kMinStepFactor * std::max(std::abs(x(i)), 1.0);
  auto all_in = [&](double h, int lo, int hi) {
    for (int k = lo; k <= hi; ++k) {
      if (k != 0 && !f.contains(shifted(x, i, k * h))) return false;
    }
    return true;
  };
  for (double h = h0; h >= h_min; h *= 0.5) {
    if (all_in(h, -reach, reach)) return {Stencil::central, h};
    if (all_in(h, 0, 2 * reach)) return {Stencil::forward, h};
    if (all_in(-h, 0, 2 * reach)) return {Stencil::backward, h};
  }
  throw differentiation_failure(
      "finite-difference stencil leaves the domain along coordinate " + std::to_string(i) +
          " even at the minimum step",
      i);
}

// d/dx_i of the whole output vector, second-order accurate.
inline Vector partial(const SmoothMap& f, const Vector& x, const Vector& fx, int i) {
  const auto s = choose_stencil(f, x, i, first_order_step(x(i)), 1);
  switch (s.kind) {
    case Stencil::central: {
      // Use the representable step actually taken.
      const Vector xp = shifted(x, i, s.h);
      const Vector xm = shifted(x, i, -s.h);
      return (f.eval(xp) - f.eval(xm)) / (xp(i) - xm(i));
    }
    case Stencil::forward:
      return (-3.0 * fx + 4.0 * f.eval(shifted(x, i, s.h)) - f.eval(shifted(x, i, 2 * s.h))) /
             (2 * s.h);
    case Stencil::backward:
      return (3.0 * fx - 4.0 * f.eval(shifted(x, i, -s.h)) + f.eval(shifted(x, i, -2 * s.h))) /
             (2 * s.h);
  }
  return {};
}

inline void require_domain(const SmoothMap& f, const Vector& x) {
  if (x.size() != f.dim_in) throw contract_violation("point dimension does not match map input");
  if (!f.contains(x)) throw domain_error("derivative requested outside the map's domain");
}

}  // namespace detail

/// dim_out x dim_in Jacobian.
inline Matrix jacobian(const SmoothMap& f, const Vector& x) {
  detail::require_domain(f, x);
  if (f.has_jacobian()) return f.jacobian(x);
  const Vector fx = f.eval(x);
  Matrix jac(f.dim_out, f.dim_in);
  for (int i = 0; i < f.dim_in; ++i) jac.col(i) = detail::partial(f, x, fx, i);
  return jac;
}

inline Vector gradient(const SmoothMap& f, const Vector& x) {
  if (f.dim_out != 1) throw contract_violation("gradient requires a scalar-valued map");
  return jacobian(f, x).row(0).transpose();
}

/// Hessian of a scalar-valued map, symmetrized as (H + H^T)/2.
inline Matrix hessian(const SmoothMap& f, const Vector& x) {
  using detail::Stencil;
  if (f.dim_out != 1) throw contract_violation("hessian requires a scalar-valued map");
  detail::require_domain(f, x);
  const int n = f.dim_in;
  if (f.has_hessians()) {
    Matrix h = f.hessians(x).at(0);
    return 0.5 * (h + h.transpose());
  }
  const double f0 = f.eval(x)(0);

  // Mixed stencils touch corner points that the per-axis search does not
  // see, so the whole stencil is retried with smaller steps until it fits.
  auto attempt = [&](double scale) -> std::optional<Matrix> {
    std::vector<detail::CoordinateStencil> st;
    st.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      st.push_back(detail::choose_stencil(f, x, i, scale * second_order_step(x(i)), 1));
    }
    // Signed step; one-sided stencils march away from the boundary.
    auto dir = [&](int i) { return st[i].kind == Stencil::backward ? -st[i].h : st[i].h; };
    bool outside = false;
    auto at = [&](int i, double di, int j, double dj) {
      Vector y = x;
      y(i) += di;
      y(j) += dj;
      if (!f.contains(y)) {
        outside = true;
        return 0.0;
      }
      return f.eval(y)(0);
    };

    Matrix h(n, n);
    for (int i = 0; i < n; ++i) {
      const double hi = st[i].h;
      if (st[i].kind == Stencil::central) {
        h(i, i) = (at(i, hi, i, 0) - 2 * f0 + at(i, -hi, i, 0)) / (hi * hi);
      } else {
        const double d = dir(i);
        h(i, i) = (at(i, 2 * d, i, 0) - 2 * at(i, d, i, 0) + f0) / (hi * hi);
      }
      for (int j = 0; j < i; ++j) {
        const double hj = st[j].h;
        if (st[i].kind == Stencil::central && st[j].kind == Stencil::central) {
          h(i, j) =
              (at(i, hi, j, hj) - at(i, hi, j, -hj) - at(i, -hi, j, hj) + at(i, -hi, j, -hj)) /
              (4 * hi * hj);
        } else {
          const double di = dir(i);
          const double dj = dir(j);
          h(i, j) = (at(i, di, j, dj) - at(i, di, j, 0) - at(j, dj, j, 0) + f0) / (di * dj);
        }
        h(j, i) = h(i, j);
      }
    }
    if (outside) return std::nullopt;
    return h;
  };

  for (double scale = 1.0; scale >= kMinStepFactor; scale *= 0.5) {
    if (auto h = attempt(scale)) return *h;
  }
  throw differentiation_failure("mixed finite-difference stencil leaves the domain", 0);
}

}  // namespace invex::numdiff
