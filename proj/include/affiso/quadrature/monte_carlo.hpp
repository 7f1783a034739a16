#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "affiso/error.hpp"
#include "affiso/linalg.hpp"
#include "affiso/parallel.hpp"
#include "affiso/quadrature/spec.hpp"

namespace affiso {

/// Counter-based SplitMix64: the k-th draw of a stream depends only on (seed, k).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x5851f42d4c957f2dULL)) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t key_;
};

/// Sampling distribution: standard Gaussian in R^n, or uniform on an axis box.
struct Sampler {
  enum class Kind { gaussian, uniform_box } kind = Kind::gaussian;
  int dimension = 1;
  Vector lower, upper;

  static Sampler gaussian(int n) { return {Kind::gaussian, n, {}, {}}; }
  static Sampler uniform(Vector lo, Vector hi) {
    const int n = static_cast<int>(lo.size());
    return {Kind::uniform_box, n, std::move(lo), std::move(hi)};
  }

  /// Sample i uses counters 2 n i + 2 j and 2 n i + 2 j + 1 for coordinate j.
  Vector draw(const CounterRng& rng, std::uint64_t i) const {
    Vector x(dimension);
    const std::uint64_t base = 2ULL * static_cast<std::uint64_t>(dimension) * i;
    for (int j = 0; j < dimension; ++j) {
      const double u1 = rng.uniform(base + 2 * j);
      const double u2 = rng.uniform(base + 2 * j + 1);
      if (kind == Kind::gaussian) {
        x(j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      } else {
        x(j) = lower(j) + (upper(j) - lower(j)) * u1;
      }
    }
    return x;
  }
};

/// Sample mean of F under the sampler with its standard error. Samples are
/// leapfrogged over workers and summed pairwise in sample order, so the value
/// does not depend on the worker count.
inline IntegralEstimate integrate_monte_carlo(const std::function<double(const Vector&)>& F, const Sampler& sampler,
                                              long samples, std::uint64_t seed, int jobs = 1) {
  if (samples < 2) fail(ErrorKind::domain, "monte carlo needs at least 2 samples");
  const CounterRng rng(seed);
  const std::size_t count = static_cast<std::size_t>(samples);
  std::vector<double> values(count);
  parallel_for(count, jobs, [&](std::size_t i) {
    const Vector x = sampler.draw(rng, i);
    const double v = F(x);
    if (!std::isfinite(v)) fail(ErrorKind::numeric, "non-finite sample value at " + format_point(x));
    values[i] = v;
  });
  const double mean = pairwise_sum(values) / static_cast<double>(count);
  std::vector<double> dev(count);
  for (std::size_t i = 0; i < count; ++i) dev[i] = (values[i] - mean) * (values[i] - mean);
  const double var = pairwise_sum(dev) / static_cast<double>(count - 1);
  IntegralEstimate est;
  est.value = mean;
  est.error = std::sqrt(var / static_cast<double>(count));
  est.evaluations = samples;
  est.method = "monte-carlo(" + std::to_string(samples) + ",seed=" + std::to_string(seed) + ")";
  return est;
}

}  // namespace affiso
