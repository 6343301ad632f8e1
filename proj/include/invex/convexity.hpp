#pragma once

/*
 * Sampled convexity certification for scalar functions on open domains.
 *
 * Two independent routes are provided: Hessian definiteness at sample points
 * and direct evaluation of the strong-convexity chord inequality
 *
 *   f((1-t)u + t v) <= (1-t) f(u) + t f(v) - sigma/2 t(1-t) |u - v|^2.
 *
 * A certificate only speaks for the points that were checked.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "invex/errors.hpp"
#include "invex/matcert.hpp"
#include "invex/numdiff.hpp"
#include "invex/sampling.hpp"
#include "invex/smooth_map.hpp"

namespace invex::convexity {

/// Relative tolerance for definiteness of finite-difference Hessians.
inline constexpr double kFdPdTolerance = 1e-4;

enum class CertificateStatus { certified_at_samples, counterexample_found, indeterminate };

constexpr std::string_view to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::certified_at_samples: return "certified_at_samples";
    case CertificateStatus::counterexample_found: return "counterexample_found";
    case CertificateStatus::indeterminate: return "indeterminate";
  }
  return "?";
}

struct ChordTriple {
  Vector u;
  Vector v;
  double t = 0.5;
  double sigma = 0.0;
};

/// Either a Hessian witness (point + direction with v^T H v <= tol) or a
/// chord witness (negative chord residual).
struct Witness {
  std::size_t sample_index = 0;
  Vector point;
  Vector direction;
  double value = 0.0;      // min eigenvalue, or chord residual
  double tolerance = 0.0;  // absolute PD tolerance used at `point`
  std::optional<ChordTriple> chord;
};

struct ConvexityCertificate {
  CertificateStatus status = CertificateStatus::indeterminate;
  double sigma_estimate = 0.0;
  std::size_t samples_checked = 0;
  std::optional<Witness> witness;
  std::vector<double> min_eigenvalues;  // by sample index

  bool certified() const { return status == CertificateStatus::certified_at_samples; }
};

/// Certifies the Hessian at each given point; the first non-PD sample by
/// index becomes the witness.
inline ConvexityCertificate certify_at_points(const SmoothMap& f, std::span<const Vector> points,
                                              double pd_rel_tolerance = kFdPdTolerance) {
  if (f.dim_out != 1) throw contract_violation("convexity certification needs a scalar map");
  if (points.empty()) throw contract_violation("no sample points to certify");

  std::vector<matcert::DefinitenessVerdict> verdicts(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Matrix h = numdiff::hessian(f, points[i]);
    verdicts[i] = matcert::certify_positive_definite(h, matcert::scaled_tolerance(h, pd_rel_tolerance));
  }

  ConvexityCertificate cert;
  cert.samples_checked = points.size();
  cert.sigma_estimate = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> first_fail;
  std::optional<std::size_t> first_unsure;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    cert.min_eigenvalues.push_back(verdicts[i].min_eigenvalue_estimate);
    cert.sigma_estimate = std::min(cert.sigma_estimate, verdicts[i].min_eigenvalue_estimate);
    if (verdicts[i].status == matcert::Definiteness::not_positive_definite && !first_fail) first_fail = i;
    if (verdicts[i].status == matcert::Definiteness::indeterminate && !first_unsure) first_unsure = i;
  }

  const auto make_witness = [&](std::size_t i) {
    Witness w;
    w.sample_index = i;
    w.point = points[i];
    w.direction = *verdicts[i].failing_direction;
    w.value = verdicts[i].min_eigenvalue_estimate;
    w.tolerance = verdicts[i].tolerance;
    return w;
  };
  if (first_fail) {
    cert.status = CertificateStatus::counterexample_found;
    cert.witness = make_witness(*first_fail);
  } else if (first_unsure) {
    cert.status = CertificateStatus::indeterminate;
    cert.witness = make_witness(*first_unsure);
  } else {
    cert.status = CertificateStatus::certified_at_samples;
  }
  return cert;
}

inline ConvexityCertificate certify_local_strong_convexity(const SmoothMap& f,
                                                           const DomainSampler& sampler,
                                                           double pd_rel_tolerance = kFdPdTolerance) {
  const auto points = sampler.sample_in(f);
  return certify_at_points(f, points, pd_rel_tolerance);
}

/// Per-component certificates of a vector-valued map. No common sigma is
/// formed across components.
inline std::vector<ConvexityCertificate> certify_components(const SmoothMap& f,
                                                            const DomainSampler& sampler,
                                                            double pd_rel_tolerance = kFdPdTolerance) {
  const auto points = sampler.sample_in(f);
  std::vector<ConvexityCertificate> out;
  for (int m = 0; m < f.dim_out; ++m) {
    out.push_back(certify_at_points(component(f, m), points, pd_rel_tolerance));
  }
  return out;
}

/// (1-t) f(u) + t f(v) - sigma/2 t(1-t)|u-v|^2 - f((1-t)u + tv).
inline double check_chord_inequality(const SmoothMap& f, const Vector& u, const Vector& v, double t,
                                     double sigma) {
  if (f.dim_out != 1) throw contract_violation("chord inequality needs a scalar map");
  if (!(t > 0.0 && t < 1.0)) throw contract_violation("chord parameter t must lie in (0, 1)");
  const Vector w = (1.0 - t) * u + t * v;
  if (!f.contains(u) || !f.contains(v) || !f.contains(w)) {
    throw contract_violation("chord endpoints and interior point must be in the domain");
  }
  return (1.0 - t) * f.scalar(u) + t * f.scalar(v) - 0.5 * sigma * t * (1.0 - t) * (u - v).squaredNorm() -
         f.scalar(w);
}

struct ChordScan {
  std::size_t triples_checked = 0;
  double min_residual = std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;  // first negative residual

  bool all_nonnegative() const { return !witness; }
};

/**
 * Evaluates the chord inequality on `sampler.count` seeded triples. Endpoints
 * are drawn from the sampler; t is uniform in (0.05, 0.95). With
 * `max_length` set, v is drawn within that distance of u instead, which
 * probes the inequality locally.
 */
inline ChordScan chord_scan(const SmoothMap& f, const DomainSampler& sampler, double sigma,
                            std::optional<double> max_length = std::nullopt) {
  sampler.validate();
  if (f.dim_in != sampler.dim()) throw contract_violation("sampler dimension does not match map input");
  Rng rng(sampler.seed);
  ChordScan scan;
  const long max_attempts = 1000L * sampler.count + 1000;
  for (long attempt = 0; static_cast<int>(scan.triples_checked) < sampler.count; ++attempt) {
    if (attempt >= max_attempts) throw contract_violation("could not draw in-domain chord triples");
    const Vector u = sampler.draw(rng);
    Vector v;
    if (max_length) {
      Vector d(u.size());
      for (int i = 0; i < d.size(); ++i) d(i) = rng.uniform(-1.0, 1.0);
      const double len = *max_length * rng.uniform01();
      v = u + (d.norm() > 0.0 ? d * (len / d.norm()) : d);
    } else {
      v = sampler.draw(rng);
    }
    const double t = rng.uniform(0.05, 0.95);
    const Vector w = (1.0 - t) * u + t * v;
    if (!f.contains(u) || !f.contains(v) || !f.contains(w)) continue;

    const double r = check_chord_inequality(f, u, v, t, sigma);
    if (r < scan.min_residual) scan.min_residual = r;
    if (r < 0.0 && !scan.witness) {
      Witness wit;
      wit.sample_index = scan.triples_checked;
      wit.point = w;
      wit.direction = v - u;
      wit.value = r;
      wit.chord = ChordTriple{u, v, t, sigma};
      scan.witness = wit;
    }
    ++scan.triples_checked;
  }
  return scan;
}

/// f'' > 0 at `count` equispaced interior points of `interval`.
inline ConvexityCertificate scalar_convexity_scan(const SmoothMap& f, Interval interval, int count,
                                                  double pd_rel_tolerance = kFdPdTolerance) {
  if (f.dim_in != 1 || f.dim_out != 1) throw contract_violation("scalar scan needs a map R -> R");
  if (count <= 0 || !(interval.lo < interval.hi)) throw contract_violation("invalid scan interval or count");
  std::vector<Vector> points;
  for (int k = 0; k < count; ++k) {
    const double x = interval.lo + (k + 1) * (interval.hi - interval.lo) / (count + 1);
    Vector p = Vector::Constant(1, x);
    if (!f.contains(p)) throw contract_violation("scan interval leaves the function's domain");
    points.push_back(std::move(p));
  }
  return certify_at_points(f, points, pd_rel_tolerance);
}

/// Re-evaluates a witness and reports whether the violation is reproduced.
inline bool reproduces(const SmoothMap& f, const Witness& w) {
  if (w.chord) {
    return check_chord_inequality(f, w.chord->u, w.chord->v, w.chord->t, w.chord->sigma) < 0.0;
  }
  const Matrix h = numdiff::hessian(f, w.point);
  const double q = w.direction.dot(h * w.direction);
  return q <= w.tolerance * w.direction.squaredNorm();
}

}  // namespace invex::convexity
