#pragma once

#include <atomic>
#include <cmath>
#include <string>
#include <utility>

#include "affiso/error.hpp"
#include "affiso/potential.hpp"
#include "affiso/quadrature/integrate.hpp"
#include "affiso/special.hpp"

namespace affiso {

inline constexpr double underflow_threshold = 1e-300;
inline constexpr double det_clamp = 1e-30;
inline constexpr double unit_mass_tolerance = 1e-6;

struct GrowthProbe {
  bool superlinear = true;
  std::string detail;
};

/// Along sample rays, the increment of psi over [R, 2R] must exceed 2.02 times
/// the increment over [R/2, R]; linear growth gives a ratio of 2.
inline GrowthProbe growth_probe(const Potential& f) {
  GrowthProbe g;
  if (f.support().compact()) return g;
  const int n = f.dimension();
  const Vector c = f.frame().center;
  const double R = 16.0 * std::max(1.0, f.frame().map.norm());
  for (const Vector& u : SupportRegion::sample_directions(n, 16)) {
    const double p1 = f.psi().value(c + 0.5 * R * u), p2 = f.psi().value(c + R * u), p4 = f.psi().value(c + 2.0 * R * u);
    if (!(p2 - p1 > 0.0) || !(p4 - p2 > 2.02 * (p2 - p1))) {
      g.superlinear = false;
      g.detail = "potential does not grow superlinearly along " + format_point(u) + "; integrals may diverge";
      return g;
    }
  }
  return g;
}

// ---- L1 norm ----------------------------------------------------------------

inline IntegralEstimate l1_norm(const Potential& f, const QuadratureSpec& q = {}) {
  IntegralEstimate e = integrate_over(f, [&f](const Vector& x) { return f.value(x); }, q);
  const GrowthProbe g = growth_probe(f);
  if (!g.superlinear) e.warnings.push_back("divergence: " + g.detail);
  return e;
}

inline IntegralEstimate l1_norm(const SConcaveProfile& f, const QuadratureSpec& q = {}) {
  return integrate_over(f, [&f](const Vector& x) { return f.value(x); }, q);
}

// ---- entropy ----------------------------------------------------------------

namespace detail {

inline IntegralEstimate assemble_entropy(const IntegralEstimate& flogf, const IntegralEstimate& mass) {
  if (!(mass.value > 0.0)) fail(ErrorKind::undefined, "entropy is undefined for a function of zero mass");
  IntegralEstimate e = flogf;
  const double M = mass.value;
  e.value = flogf.value - M * std::log(M);
  e.error = flogf.error + std::abs(std::log(M) + 1.0) * mass.error;
  e.evaluations += mass.evaluations;
  e.warnings.insert(e.warnings.end(), mass.warnings.begin(), mass.warnings.end());
  return e;
}

}  // namespace detail

/// Ent(f) = int f ln f - |f|_1 ln |f|_1.
inline IntegralEstimate entropy(const Potential& f, const QuadratureSpec& q = {}) {
  const IntegralEstimate mass = l1_norm(f, q);
  const IntegralEstimate flogf = integrate_over(
      f,
      [&f](const Vector& x) {
        if (!f.support().contains(x)) return 0.0;
        const double psi = f.psi().value(x);
        const double v = std::exp(-psi);
        return v < underflow_threshold ? 0.0 : -v * psi;
      },
      q);
  return detail::assemble_entropy(flogf, mass);
}

inline IntegralEstimate entropy(const SConcaveProfile& f, const QuadratureSpec& q = {}) {
  const IntegralEstimate mass = l1_norm(f, q);
  const int s = f.s();
  const IntegralEstimate flogf = integrate_over(
      f,
      [&f, s](const Vector& x) {
        const double g = f.g(x);
        const double v = std::pow(g, s);
        return v < underflow_threshold ? 0.0 : s * v * std::log(g);
      },
      q);
  return detail::assemble_entropy(flogf, mass);
}

// ---- Fisher information ------------------------------------------------------

namespace detail {

inline void note_skipped(IntegralEstimate& e, long skipped, const char* what) {
  if (skipped > 0) e.warnings.push_back(std::to_string(skipped) + " nodes skipped: " + what);
}

}  // namespace detail

/// int |grad f|^2 / f.
inline IntegralEstimate fisher_gradient_form(const Potential& f, const QuadratureSpec& q = {}) {
  const ScalarField F = f.f_field();
  std::atomic<long> skipped{0};
  IntegralEstimate e = integrate_over(
      f,
      [&](const Vector& x) {
        const double v = f.value(x);
        if (v < underflow_threshold) {
          if (v > 0.0) ++skipped;
          return 0.0;
        }
        const Vector g = F.gradient(x);
        return g.squaredNorm() / v;
      },
      q);
  detail::note_skipped(e, skipped, "f below underflow threshold");
  return e;
}

inline IntegralEstimate fisher_gradient_form(const SConcaveProfile& f, const QuadratureSpec& q = {}) {
  const ScalarField F = f.f_field();
  std::atomic<long> skipped{0};
  IntegralEstimate e = integrate_over(
      f,
      [&](const Vector& x) {
        const double v = f.value(x);
        if (v < underflow_threshold) {
          if (v > 0.0) ++skipped;
          return 0.0;
        }
        const Vector g = F.gradient(x);
        return g.squaredNorm() / v;
      },
      q);
  detail::note_skipped(e, skipped, "f below underflow threshold");
  return e;
}

/// int f tr Hess(-ln f).
inline IntegralEstimate fisher_hessian_form(const Potential& f, const QuadratureSpec& q = {}) {
  return integrate_over(
      f,
      [&f](const Vector& x) {
        const double v = f.value(x);
        if (v < underflow_threshold) return 0.0;
        return v * hessian(f.psi(), x).trace();
      },
      q);
}

namespace detail {

// Hess(-ln f) = s (grad g grad g^T / g^2 - Hess g / g) for f = g^s.
inline Matrix profile_log_hessian(const SConcaveProfile& f, const Vector& x, double g) {
  const Vector dg = gradient(f.profile(), x);
  const Matrix hg = hessian(f.profile(), x);
  return f.s() * (dg * dg.transpose() / (g * g) - hg / g);
}

}  // namespace detail

inline IntegralEstimate fisher_hessian_form(const SConcaveProfile& f, const QuadratureSpec& q = {}) {
  return integrate_over(
      f,
      [&f](const Vector& x) {
        const double g = f.g(x);
        const double v = std::pow(g, f.s());
        if (v < underflow_threshold) return 0.0;
        return v * detail::profile_log_hessian(f, x, g).trace();
      },
      q);
}

// ---- log-det functional ---------------------------------------------------

namespace detail {

inline void check_clamps(IntegralEstimate& e, long clamps, long nodes) {
  if (clamps == 0) return;
  e.warnings.push_back("determinant clamped at " + std::to_string(clamps) + " of " + std::to_string(nodes) + " nodes");
  if (static_cast<double>(clamps) > 0.01 * static_cast<double>(nodes))
    fail(ErrorKind::degenerate, "Hessian of -ln f is degenerate: determinant clamped at " + std::to_string(clamps) +
                                    " of " + std::to_string(nodes) + " nodes");
}

inline double clamped_log_det(const Matrix& H, std::atomic<long>& clamps) {
  const double d = determinant(H);
  if (!(d >= det_clamp)) {
    ++clamps;
    return std::log(det_clamp);
  }
  return std::log(d);
}

}  // namespace detail

/// int f ln det Hess(-ln f), determinant clamped below at 1e-30.
inline IntegralEstimate log_det_hessian_functional(const Potential& f, const QuadratureSpec& q = {}) {
  std::atomic<long> clamps{0}, nodes{0};
  IntegralEstimate e = integrate_over(
      f,
      [&](const Vector& x) {
        const double v = f.value(x);
        if (v < underflow_threshold) return 0.0;
        ++nodes;
        return v * detail::clamped_log_det(hessian(f.psi(), x), clamps);
      },
      q);
  detail::check_clamps(e, clamps, nodes);
  return e;
}

inline IntegralEstimate log_det_hessian_functional(const SConcaveProfile& f, const QuadratureSpec& q = {}) {
  std::atomic<long> clamps{0}, nodes{0};
  IntegralEstimate e = integrate_over(
      f,
      [&](const Vector& x) {
        const double g = f.g(x);
        const double v = std::pow(g, f.s());
        if (v < underflow_threshold) return 0.0;
        ++nodes;
        return v * detail::clamped_log_det(detail::profile_log_hessian(f, x, g), clamps);
      },
      q);
  detail::check_clamps(e, clamps, nodes);
  return e;
}

// ---- entropy gap --------------------------------------------------------------

/// Entropy of the standard Gaussian in R^n.
inline double gaussian_entropy(int n) { return -0.5 * n * std::log(2.0 * M_PI * M_E); }

struct EntropyGap {
  double value = 0.0;
  double error = 0.0;
  double mass = 0.0;
  IntegralEstimate entropy;
};

inline void require_unit_mass(const IntegralEstimate& mass) {
  if (std::abs(mass.value - 1.0) > unit_mass_tolerance)
    fail(ErrorKind::normalization, "function must have unit mass (|f|_1 = " + std::to_string(mass.value) +
                                       "); rescale it first");
}

/// Ent(f) - Ent(gamma) for unit-mass f.
inline EntropyGap entropy_gap(const Potential& f, const QuadratureSpec& q = {}) {
  const IntegralEstimate mass = l1_norm(f, q);
  require_unit_mass(mass);
  EntropyGap g;
  g.mass = mass.value;
  g.entropy = entropy(f, q);
  g.value = g.entropy.value - gaussian_entropy(f.dimension());
  g.error = g.entropy.error;
  return g;
}

// ---- Example closed forms -----------------------------------------------------

struct ClosedForm {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return rhs - lhs; }
};

/// Both sides of the inverse log-Sobolev bound for f = exp(-sum |x_i|^p) in R^n,
/// with M = (2/p) Gamma(1/p):
///   lhs = n M^n (ln(p(p-1)) + ((p-2)/p) psi(1/p))
///   rhs = n M^n (ln(pi e / (2 Gamma(1+1/p)^2)) - 2/p)
inline ClosedForm example31_closed_form(int n, double p) {
  if (!(p > 1.0)) fail(ErrorKind::domain, "closed form needs p > 1");
  if (n < 1) fail(ErrorKind::domain, "dimension must be positive");
  const double M = 2.0 / p * gamma(1.0 / p);
  const double pre = n * std::pow(M, n);
  ClosedForm c;
  c.lhs = pre * (std::log(p * (p - 1.0)) + (p - 2.0) / p * digamma(1.0 / p));
  const double g1 = gamma(1.0 + 1.0 / p);
  c.rhs = pre * (std::log(M_PI * M_E / (2.0 * g1 * g1)) - 2.0 / p);
  return c;
}

}  // namespace affiso
