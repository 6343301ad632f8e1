#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <vector>

#include "invex/errors.hpp"
#include "invex/smooth_map.hpp"

namespace invex {

/// Seeded stream of doubles. The uniform draw is built from raw 64-bit
/// output so sequences are identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
  std::mt19937_64 engine_;
};

/// Open interval (lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double x) const { return lo < x && x < hi; }
};

enum class Distribution { uniform, log_uniform };

constexpr std::string_view to_string(Distribution d) {
  return d == Distribution::uniform ? "uniform" : "log_uniform";
}

/// Seeded rejection sampler over an axis-aligned open box.
struct DomainSampler {
  std::vector<Interval> box;
  Distribution distribution = Distribution::uniform;
  std::uint64_t seed = 0;
  int count = 100;

  int dim() const { return static_cast<int>(box.size()); }

  void validate() const {
    if (box.empty()) throw contract_violation("sampler box is empty");
    if (count <= 0) throw contract_violation("sampler count must be positive");
    for (const auto& iv : box) {
      if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
        throw contract_violation("sampler interval must satisfy lo < hi");
      }
      if (distribution == Distribution::log_uniform && !(iv.lo > 0.0)) {
        throw contract_violation("log-uniform sampling needs positive intervals");
      }
    }
  }

  /// One point strictly inside the box, drawn from `rng`.
  Vector draw(Rng& rng) const {
    Vector x(dim());
    for (;;) {
      bool inside = true;
      for (int i = 0; i < dim(); ++i) {
        const auto& iv = box[static_cast<std::size_t>(i)];
        x(i) = distribution == Distribution::uniform
                   ? rng.uniform(iv.lo, iv.hi)
                   : std::exp(rng.uniform(std::log(iv.lo), std::log(iv.hi)));
        inside = inside && iv.contains(x(i));
      }
      if (inside) return x;
    }
  }

  /// `count` points accepted by `accept` (all points when it is empty).
  std::vector<Vector> sample(const std::function<bool(const Vector&)>& accept = {}) const {
    validate();
    Rng rng(seed);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    const long max_attempts = 1000L * count + 1000;
    for (long attempt = 0; static_cast<int>(out.size()) < count; ++attempt) {
      if (attempt >= max_attempts) {
        throw contract_violation("sampler box lies (almost) entirely outside the target domain");
      }
      Vector x = draw(rng);
      if (!accept || accept(x)) out.push_back(std::move(x));
    }
    return out;
  }

  std::vector<Vector> sample_in(const SmoothMap& f) const {
    if (f.dim_in != dim()) throw contract_violation("sampler dimension does not match map input");
    return sample([&f](const Vector& x) { return f.contains(x); });
  }
};

}  // namespace invex
