#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "affiso/error.hpp"
#include "affiso/linalg.hpp"
#include "affiso/support.hpp"

namespace affiso {

/// Real-valued field on R^n with optional analytic derivative oracles.
/// Oracles must be pure: fields are shared read-only across workers.
struct ScalarField {
  int dimension = 1;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;  // optional
  std::function<Matrix(const Vector&)> hessian;   // optional, symmetric
  SupportRegion support = SupportRegion::full_space(1);

  double operator()(const Vector& x) const { return value(x); }
  bool has_gradient() const { return static_cast<bool>(gradient); }
  bool has_hessian() const { return static_cast<bool>(hessian); }
};

inline ScalarField make_field(int n, std::function<double(const Vector&)> value,
                              std::function<Vector(const Vector&)> gradient = {},
                              std::function<Matrix(const Vector&)> hessian = {},
                              std::optional<SupportRegion> support = std::nullopt) {
  ScalarField f;
  f.dimension = n;
  f.value = std::move(value);
  f.gradient = std::move(gradient);
  f.hessian = std::move(hessian);
  f.support = support.value_or(SupportRegion::full_space(n));
  return f;
}

namespace detail {

inline double gradient_step(const Vector& x) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, x.norm());
}

inline double hessian_step(const Vector& x) {
  return std::sqrt(std::sqrt(std::numeric_limits<double>::epsilon())) * std::max(1.0, x.norm());
}

inline void require_interior(const ScalarField& f, const Vector& x) {
  if (x.size() != f.dimension)
    fail(ErrorKind::domain, "point dimension " + std::to_string(x.size()) + " != field dimension " + std::to_string(f.dimension));
  if (!f.support.contains_interior(x)) fail(ErrorKind::domain, "point " + format_point(x) + " is not in the support interior");
}

// Every stencil point must be interior; points closer than h to the boundary are refused.
inline void require_stencil(const ScalarField& f, const Vector& x, double h, bool mixed) {
  if (!f.support.compact()) return;
  const int n = f.dimension;
  for (int i = 0; i < n; ++i) {
    for (double si : {-h, h}) {
      Vector y = x;
      y(i) += si;
      if (!f.support.contains_interior(y))
        fail(ErrorKind::domain, "point " + format_point(x) + " lies within the difference step of the support boundary");
      if (!mixed) continue;
      for (int j = i + 1; j < n; ++j) {
        for (double sj : {-h, h}) {
          Vector z = y;
          z(j) += sj;
          if (!f.support.contains_interior(z))
            fail(ErrorKind::domain, "point " + format_point(x) + " lies within the difference step of the support boundary");
        }
      }
    }
  }
}

inline double checked(double v, const Vector& x) {
  if (!std::isfinite(v)) fail(ErrorKind::numeric, "non-finite field value at " + format_point(x));
  return v;
}

}  // namespace detail

inline Vector finite_difference_gradient(const ScalarField& f, const Vector& x) {
  const double h = detail::gradient_step(x);
  detail::require_stencil(f, x, h, false);
  Vector g(f.dimension);
  for (int i = 0; i < f.dimension; ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (detail::checked(f.value(xp), xp) - detail::checked(f.value(xm), xm)) / (xp(i) - xm(i));
  }
  return g;
}

inline Matrix finite_difference_hessian(const ScalarField& f, const Vector& x) {
  const double h = detail::hessian_step(x);
  detail::require_stencil(f, x, h, true);
  const int n = f.dimension;
  auto at = [&](const Vector& y) { return detail::checked(f.value(y), y); };
  const double f0 = at(x);
  Matrix H(n, n);
  for (int i = 0; i < n; ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    H(i, i) = (at(xp) - 2.0 * f0 + at(xm)) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      Vector pp = xp, pm = xp, mp = xm, mm = xm;
      pp(j) += h;
      pm(j) -= h;
      mp(j) += h;
      mm(j) -= h;
      H(i, j) = H(j, i) = (at(pp) - at(pm) - at(mp) + at(mm)) / (4.0 * h * h);
    }
  }
  return H;
}

/// Analytic gradient if the field has one, central differences otherwise.
inline Vector gradient(const ScalarField& f, const Vector& x) {
  detail::require_interior(f, x);
  if (!f.has_gradient()) return finite_difference_gradient(f, x);
  Vector g = f.gradient(x);
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (!std::isfinite(g(i))) fail(ErrorKind::numeric, "non-finite gradient at " + format_point(x));
  return g;
}

/// Analytic Hessian if present, second-order central differences otherwise;
/// always returned symmetrised.
inline Matrix hessian(const ScalarField& f, const Vector& x) {
  detail::require_interior(f, x);
  Matrix H = f.has_hessian() ? f.hessian(x) : finite_difference_hessian(f, x);
  if (!H.allFinite()) fail(ErrorKind::numeric, "non-finite Hessian at " + format_point(x));
  return symmetrized(H);
}

/// Deterministic low-discrepancy points (Halton) in the box [lo, hi].
inline std::vector<Vector> halton_points(const Vector& lo, const Vector& hi, int count, int skip = 17) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  const int n = static_cast<int>(lo.size());
  std::vector<Vector> pts;
  pts.reserve(count);
  for (int k = skip; k < skip + count; ++k) {
    Vector v(n);
    for (int d = 0; d < n; ++d) {
      const int base = primes[d % 12];
      double f = 1.0, r = 0.0;
      for (int i = k; i > 0; i /= base) {
        f /= base;
        r += f * (i % base);
      }
      v(d) = lo(d) + (hi(d) - lo(d)) * r;
    }
    pts.push_back(std::move(v));
  }
  return pts;
}

struct OracleConsistency {
  double max_gradient_deviation = 0.0;  // relative to scale
  double max_hessian_deviation = 0.0;
  int points_checked = 0;
};

/// Compares analytic oracles with central differences at the given points;
/// points where the stencil leaves the support are skipped.
inline OracleConsistency check_oracle_consistency(const ScalarField& f, const std::vector<Vector>& points) {
  OracleConsistency out;
  for (const Vector& x : points) {
    if (!f.support.contains_interior(x)) continue;
    try {
      if (f.has_gradient()) {
        const Vector a = f.gradient(x);
        const Vector d = finite_difference_gradient(f, x);
        const double scale = std::max({1.0, a.lpNorm<Eigen::Infinity>(), std::abs(f.value(x))});
        out.max_gradient_deviation = std::max(out.max_gradient_deviation, (a - d).lpNorm<Eigen::Infinity>() / scale);
      }
      if (f.has_hessian()) {
        const Matrix a = f.hessian(x);
        const Matrix d = finite_difference_hessian(f, x);
        const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), std::abs(f.value(x))});
        out.max_hessian_deviation = std::max(out.max_hessian_deviation, (a - d).cwiseAbs().maxCoeff() / scale);
      }
      ++out.points_checked;
    } catch (const Error&) {
      // stencil too close to the boundary
    }
  }
  return out;
}

}  // namespace affiso
