#pragma once

#include <cmath>

#include "affiso/potential.hpp"
#include "affiso/quadrature/adaptive.hpp"
#include "affiso/quadrature/gauss_hermite.hpp"
#include "affiso/quadrature/monte_carlo.hpp"
#include "affiso/quadrature/spec.hpp"

namespace affiso {

namespace detail {

inline IntegralEstimate integrate_compact(const Integrand& F, const SupportRegion& region, const QuadratureSpec& q) {
  const int n = region.dimension();
  const bool mc = q.method == Method::monte_carlo || (q.method == Method::automatic && n >= 5);
  if (q.method == Method::gauss_hermite)
    fail(ErrorKind::capability, "gauss-hermite integrates over all of R^n; this support is compact");
  if (mc) {
    const auto bb = region.bounding_box();
    const double vol = (bb->second - bb->first).prod();
    auto G = [&](const Vector& x) { return region.contains(x) ? F(x) : 0.0; };
    IntegralEstimate e = integrate_monte_carlo(G, Sampler::uniform(bb->first, bb->second), q.samples, q.seed, q.jobs);
    return e.scaled(vol);
  }
  return integrate_adaptive(F, region, AdaptiveOptions::from(q), q.endpoint_transform);
}

inline IntegralEstimate integrate_frame(const Integrand& F, const Frame& frame, const QuadratureSpec& q) {
  const int n = static_cast<int>(frame.center.size());
  Method m = q.method;
  if (m == Method::automatic) {
    if (frame.gaussian && n <= 4) m = Method::gauss_hermite;
    else if (n <= 3) m = Method::adaptive;
    else m = Method::monte_carlo;
  }
  const double vol = std::abs(determinant(frame.map)) * std::pow(2.0 * M_PI, 0.5 * n);
  auto G = [&](const Vector& y) {
    const double v = F(frame.center + frame.map * y);
    return v == 0.0 ? 0.0 : v * std::exp(0.5 * y.squaredNorm());
  };
  switch (m) {
    case Method::gauss_hermite: return integrate_gaussian(G, n, q.order_for(n), q.jobs).scaled(vol);
    case Method::monte_carlo: return integrate_monte_carlo(G, Sampler::gaussian(n), q.samples, q.seed, q.jobs).scaled(vol);
    default: return integrate_full_space(F, frame.center, frame.map, AdaptiveOptions::from(q));
  }
}

}  // namespace detail

/// Integral over the support of f of an integrand F that already carries its f factor.
inline IntegralEstimate integrate_over(const Potential& f, const Integrand& F, const QuadratureSpec& q = {}) {
  q.validate();
  if (f.support().compact()) return detail::integrate_compact(F, f.support(), q);
  return detail::integrate_frame(F, f.frame(), q);
}

inline IntegralEstimate integrate_over(const SConcaveProfile& f, const Integrand& F, const QuadratureSpec& q = {}) {
  q.validate();
  return detail::integrate_compact(F, f.support(), q);
}

}  // namespace affiso
