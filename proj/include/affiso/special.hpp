#pragma once

// Gamma, log-gamma, digamma and beta on the positive axis, plus unit-ball
// volumes. Lanczos (g = 7, 9 terms) for Gamma; digamma by upward recurrence
// to x >= 10 followed by the Bernoulli asymptotic series.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "affiso/error.hpp"

namespace affiso {

namespace detail {

inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// A(z) for Gamma(z + 1) = sqrt(2 pi) t^(z + 1/2) e^-t A(z), t = z + g + 1/2.
inline double lanczos_sum(double z) {
  double a = lanczos_coef[0];
  for (std::size_t i = 1; i < lanczos_coef.size(); ++i) a += lanczos_coef[i] / (z + static_cast<double>(i));
  return a;
}

inline void require_positive(double x, const char* fn) {
  if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorKind::domain, std::string(fn) + " requires a positive finite argument");
}

}  // namespace detail

inline double log_gamma(double x) {
  detail::require_positive(x, "log_gamma");
  if (x < 0.5) {
    // Gamma(x) = Gamma(x + 1) / x keeps accuracy near the pole at 0.
    return log_gamma(x + 1.0) - std::log(x);
  }
  const double z = x - 1.0;
  const double t = z + detail::lanczos_g + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(detail::lanczos_sum(z));
}

inline double gamma(double x) {
  detail::require_positive(x, "gamma");
  if (x < 0.5) return gamma(x + 1.0) / x;
  if (x > 140.0) return std::exp(log_gamma(x));
  const double z = x - 1.0;
  const double t = z + detail::lanczos_g + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * detail::lanczos_sum(z);
}

inline double digamma(double x) {
  detail::require_positive(x, "digamma");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // B_2k / (2k) for k = 1..6
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

struct GammaValues {
  double gamma;
  double log_gamma;
  double digamma;
};

inline GammaValues gamma_family(double x) { return {gamma(x), log_gamma(x), digamma(x)}; }

inline double log_beta(double x, double y) {
  detail::require_positive(x, "beta");
  detail::require_positive(y, "beta");
  return log_gamma(x) + log_gamma(y) - log_gamma(x + y);
}

inline double beta(double x, double y) {
  detail::require_positive(x, "beta");
  detail::require_positive(y, "beta");
  if (x + y < 140.0) return gamma(x) * gamma(y) / gamma(x + y);
  return std::exp(log_beta(x, y));
}

/// Volume of the k-dimensional Euclidean unit ball; vol_0 = 1.
inline double unit_ball_volume(int k) {
  if (k < 0) fail(ErrorKind::domain, "unit_ball_volume requires k >= 0");
  if (k == 0) return 1.0;
  const double half = 0.5 * k;
  return std::exp(half * std::log(std::numbers::pi) - log_gamma(half + 1.0));
}

}  // namespace affiso
