#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "affiso/error.hpp"
#include "affiso/field.hpp"
#include "affiso/linalg.hpp"
#include "affiso/potential.hpp"
#include "affiso/quadrature/adaptive.hpp"
#include "affiso/quadrature/integrate.hpp"
#include "affiso/special.hpp"

namespace affiso {

/// |det Hess h| / (1 + |grad h|^2)^((n+2)/2): Gauss curvature of the graph of h at t.
inline double graph_curvature(const ScalarField& h, const Vector& t) {
  const Vector g = gradient(h, t);
  const Matrix H = hessian(h, t);
  return std::abs(determinant(H)) / std::pow(1.0 + g.squaredNorm(), 0.5 * (h.dimension + 2));
}

/// Membership in K_s(f) = {(x, y) in R^n x R^s : x in supp f, |y| <= f(x)^(1/s)}.
inline bool ksf_contains(const SConcaveProfile& f, const Vector& x, const Vector& y) {
  if (x.size() != f.dimension() || y.size() != f.s()) fail(ErrorKind::domain, "point has the wrong dimensions");
  return f.support().contains(x) && y.norm() <= f.g(x);
}

struct BoundaryPoint {
  Vector x;       // base point in R^n
  Vector y;       // fibre point, |y| = g(x)
  Vector normal;  // outer unit normal in R^(n+s)
  double curvature = 0.0;
};

namespace detail {

inline double interior_profile(const SConcaveProfile& f, const Vector& x, const char* what) {
  if (!f.support().contains_interior(x))
    fail(ErrorKind::undefined, std::string(what) + " is undefined on the support boundary (x = " + format_point(x) + ")");
  const double g = f.g(x);
  if (!(g > 0.0)) fail(ErrorKind::undefined, std::string(what) + " is undefined where the profile vanishes");
  return g;
}

}  // namespace detail

/// Outer unit normal at (x, y) on the boundary of K_s(f):
/// (-g grad g, y) / (g sqrt(1 + |grad g|^2)).
inline Vector ksf_normal(const SConcaveProfile& f, const Vector& x, const Vector& y) {
  const double g = detail::interior_profile(f, x, "the normal");
  if (y.size() != f.s()) fail(ErrorKind::domain, "fibre point must lie in R^s");
  if (std::abs(y.norm() - g) > 1e-10 * std::max(1.0, g)) fail(ErrorKind::domain, "point is not on the boundary of K_s(f)");
  const Vector dg = gradient(f.profile(), x);
  const int n = f.dimension();
  Vector N(n + f.s());
  N.head(n) = -g * dg;
  N.tail(f.s()) = y;
  return N / (g * std::sqrt(1.0 + dg.squaredNorm()));
}

/// |det Hess g| / (g^(s-1) (1 + |grad g|^2)^((n+s+1)/2)).
inline double ksf_curvature(const SConcaveProfile& f, const Vector& x) {
  const double g = detail::interior_profile(f, x, "the curvature");
  if (std::pow(g, f.s()) < 1e-300) fail(ErrorKind::degenerate, "profile underflows at " + format_point(x));
  const int n = f.dimension(), s = f.s();
  const Vector dg = gradient(f.profile(), x);
  const Matrix H = hessian(f.profile(), x);
  return std::abs(determinant(H)) / (std::pow(g, s - 1) * std::pow(1.0 + dg.squaredNorm(), 0.5 * (n + s + 1)));
}

/// Boundary point above x in fibre direction v (unit vector in R^s).
inline BoundaryPoint ksf_boundary_point(const SConcaveProfile& f, const Vector& x, const Vector& v) {
  BoundaryPoint p;
  p.x = x;
  p.y = f.g(x) * v.normalized();
  p.normal = ksf_normal(f, x, p.y);
  p.curvature = ksf_curvature(f, x);
  return p;
}

/// Curvature of the boundary of K_s(f) from profile values only: near (x, g(x) e_1)
/// the surface is the graph y_1 = sqrt(g(x)^2 - |y'|^2) over (x, y'), whose
/// Hessian is taken by central differences.
inline double ksf_curvature_geometric(const SConcaveProfile& f, const Vector& x) {
  const double g0 = detail::interior_profile(f, x, "the curvature");
  const int n = f.dimension(), s = f.s(), m = n + s - 1;
  auto H = [&](const Vector& z) {
    const double gz = f.g(z.head(n));
    return std::sqrt(std::max(0.0, gz * gz - z.tail(s - 1).squaredNorm()));
  };
  auto height = make_field(m, H);
  Vector z = Vector::Zero(m);
  z.head(n) = x;
  const double h = 1e-4 * std::max(1e-3, std::min(1.0, g0));
  Vector grad(m);
  Matrix hess(m, m);
  const double f0 = H(z);
  for (int i = 0; i < m; ++i) {
    Vector p = z, q = z;
    p(i) += h;
    q(i) -= h;
    grad(i) = (H(p) - H(q)) / (2.0 * h);
    hess(i, i) = (H(p) - 2.0 * f0 + H(q)) / (h * h);
    for (int j = i + 1; j < m; ++j) {
      Vector pp = p, pm = p, mp = q, mm = q;
      pp(j) += h;
      pm(j) -= h;
      mp(j) += h;
      mm(j) -= h;
      hess(i, j) = hess(j, i) = (H(pp) - H(pm) - H(mp) + H(mm)) / (4.0 * h * h);
    }
  }
  (void)height;
  return std::abs(determinant(hess)) / std::pow(1.0 + grad.squaredNorm(), 0.5 * (m + 2));
}

/// c_1 = 2; c_s = (s-1) vol_{s-1}(B^{s-1}) B((s-1)/2, 1/2) for s >= 2.
inline double c_s_constant(int s) {
  if (s <= 0) fail(ErrorKind::domain, "s must be a positive integer");
  if (s == 1) return 2.0;
  return (s - 1) * unit_ball_volume(s - 1) * beta(0.5 * (s - 1), 0.5);
}

/// d(n,s) = pi^(n/(n+s+1)) ((n+s)/s)^((n+s-1)/(n+s+1)) (Gamma(s/2)/Gamma((n+s)/2))^(2/(n+s+1)).
inline double d_ns_constant(int n, int s) {
  if (n < 1 || s < 1) fail(ErrorKind::domain, "n and s must be positive integers");
  const double N = n + s + 1;
  return std::pow(M_PI, n / N) * std::pow(static_cast<double>(n + s) / s, (n + s - 1) / N) *
         std::exp(2.0 / N * (log_gamma(0.5 * s) - log_gamma(0.5 * (n + s))));
}

/// (n+s) vol_{n+s} / c_s * (vol_s / vol_{n+s})^((n+s-1)/(n+s+1)).
inline double d_ns_alternative(int n, int s) {
  if (n < 1 || s < 1) fail(ErrorKind::domain, "n and s must be positive integers");
  const double N = n + s + 1;
  const double vns = unit_ball_volume(n + s);
  return (n + s) * vns / c_s_constant(s) * std::pow(unit_ball_volume(s) / vns, (n + s - 1) / N);
}

/// c_s int |det Hess g|^(1/(n+s+1)) g^((s-1)(n+s)/(n+s+1)) dx.
inline IntegralEstimate asa_profile_formula(const SConcaveProfile& f, const QuadratureSpec& q = {}) {
  const int n = f.dimension(), s = f.s();
  const double N = n + s + 1;
  const double e_det = 1.0 / N, e_g = (s - 1.0) * (n + s) / N;
  const double cs = c_s_constant(s);
  IntegralEstimate e = integrate_over(
      f,
      [&](const Vector& x) {
        const double g = f.g(x);
        if (!(g > 0.0)) return 0.0;
        const double d = std::abs(determinant(hessian(f.profile(), x)));
        return std::pow(d, e_det) * (s == 1 ? 1.0 : std::pow(g, e_g));
      },
      q);
  return e.scaled(cs);
}

namespace detail {

// Five-point derivatives of rho at phi, with the step kept inside (lo, hi).
inline void polar_derivatives(const std::function<double(double)>& rho, double phi, double lo, double hi, double& r0,
                              double& r1, double& r2) {
  const double h = std::min(1e-3, 0.4 * std::min(phi - lo, hi - phi));
  const double rm2 = rho(phi - 2 * h), rm1 = rho(phi - h), rp1 = rho(phi + h), rp2 = rho(phi + 2 * h);
  r0 = rho(phi);
  r1 = (rm2 - 8.0 * rm1 + 8.0 * rp1 - rp2) / (12.0 * h);
  r2 = (-rm2 + 16.0 * rm1 - 30.0 * r0 + 16.0 * rp1 - rp2) / (12.0 * h * h);
}

}  // namespace detail

/// Affine surface area of the planar body K_1(f) from its boundary curve:
/// radial function rho(phi) about (mid supp f, 0) by bisection on the membership
/// test, and int kappa^(1/3) ds = int |rho^2 + 2 rho'^2 - rho rho''|^(1/3) dphi.
/// The integral is split at the two points of the curve on the x-axis, where
/// the boundary may have corners.
inline IntegralEstimate asa_boundary_integral(const SConcaveProfile& f, const QuadratureSpec& q = {}) {
  if (f.dimension() != 1 || f.s() != 1) fail(ErrorKind::capability, "the boundary oracle is limited to n = 1, s = 1");
  const auto bb = f.support().bounding_box();
  const double xm = 0.5 * (bb->first(0) + bb->second(0));
  const double reach = 4.0 * (bb->second(0) - bb->first(0)) + 4.0 * f.g(Vector::Constant(1, xm)) + 1.0;
  auto inside = [&](double x, double y) {
    const Vector p = Vector::Constant(1, x);
    return f.support().contains(p) && std::abs(y) <= f.g(p);
  };
  if (!inside(xm, 0.0) || !(f.g(Vector::Constant(1, xm)) > 0.0))
    fail(ErrorKind::capability, "support midpoint is not interior to K_1(f)");
  auto rho = [&](double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    double lo = 0.0, hi = reach;
    while (hi - lo > 1e-16 * hi) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (inside(xm + mid * c, mid * s)) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  IntegralEstimate total;
  for (int half = 0; half < 2; ++half) {
    const double lo = half * M_PI, hi = (half + 1) * M_PI;
    auto F = [&](const Vector& t) {
      double r0, r1, r2;
      detail::polar_derivatives(rho, t(0), lo, hi, r0, r1, r2);
      return std::cbrt(std::abs(r0 * r0 + 2.0 * r1 * r1 - r0 * r2));
    };
    total += adaptive_box(F, Vector::Constant(1, lo), Vector::Constant(1, hi), AdaptiveOptions::from(q));
  }
  total.method = "boundary-polar";
  return total;
}

/// det(Id + y y^T) by LU; equals 1 + |y|^2.
inline double rank_one_det(const Vector& y) {
  if (y.size() == 0) return 1.0;
  const Matrix M = Matrix::Identity(y.size(), y.size()) + y * y.transpose();
  return determinant(M);
}

struct CovarianceReport {
  IntegralEstimate transformed;  // as((lambda f) o A)
  IntegralEstimate original;     // as(f)
  double predicted = 0.0;        // (lambda / |det A|)^((n+s-1)/(n+s+1)) as(f)
  double unimodular_form = 0.0;  // lambda^((n+s-1)/(n+s+1)) / |det A| as(f); equals predicted iff |det A| = 1
  double relative_gap = 0.0;     // against predicted
};

/// Compares as((lambda f) o A) with the scaling law. The Hessian of g o A picks
/// up |det A|^(2/(n+s+1)) under the determinant, so the exponent of |det A| is
/// -(n+s-1)/(n+s+1), the same as for K_s(f) under the block map diag(A^-1, Id).
inline CovarianceReport check_affine_covariance(const SConcaveProfile& f, const Matrix& A, double lambda,
                                                const QuadratureSpec& q = {}) {
  const double det = std::abs(determinant(A));
  if (det == 0.0) fail(ErrorKind::domain, "A must be invertible");
  if (!(lambda > 0.0)) fail(ErrorKind::domain, "lambda must be positive");
  const int n = f.dimension(), s = f.s();
  const double e = (n + s - 1.0) / (n + s + 1.0);
  CovarianceReport r;
  r.original = asa_profile_formula(f, q);
  r.transformed = asa_profile_formula(f.scaled(lambda).composed(A), q);
  r.predicted = std::pow(lambda / det, e) * r.original.value;
  r.unimodular_form = std::pow(lambda, e) / det * r.original.value;
  r.relative_gap = std::abs(r.transformed.value - r.predicted) / std::max(std::abs(r.predicted), 1e-300);
  return r;
}

struct ValuationReport {
  double as1 = 0.0, as2 = 0.0, as_max = 0.0, as_min = 0.0;
  double error = 0.0;
  double gap = 0.0;           // |as1 + as2 - as_max - as_min|
  double relative_gap = 0.0;  // gap / (|as1| + |as2| + |as_max| + |as_min|)
  std::vector<double> breakpoints;
};

namespace detail {

// Roots of g1 - g2 on (a, b) by sign scan and bisection.
inline std::vector<double> crossings(const std::function<double(double)>& diff, double a, double b, int scan = 4000) {
  std::vector<double> roots;
  // exact zeros inherit the previous sign, so coincident stretches are not cut
  double x0 = a, d0 = diff(a);
  for (int i = 1; i <= scan; ++i) {
    const double x1 = a + (b - a) * i / scan;
    const double d1 = diff(x1);
    if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
      double lo = x0, hi = x1, flo = d0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = diff(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    if (d1 != 0.0) d0 = d1;
  }
  return roots;
}

}  // namespace detail

/// Valuation identity as(f1) + as(f2) = as(max) + as(min) in one dimension.
/// Integrals are split where f1 = f2 and at the support endpoints, so every
/// piece has a C^2 integrand. The hypothesis that max(f1, f2) is s-concave is
/// probed by midpoint concavity of the profile on a grid.
inline ValuationReport check_valuation(const SConcaveProfile& f1, const SConcaveProfile& f2, const QuadratureSpec& q = {}) {
  if (f1.dimension() != 1 || f2.dimension() != 1) fail(ErrorKind::capability, "valuation check is one-dimensional");
  if (f1.s() != f2.s()) fail(ErrorKind::domain, "profiles must share s");
  const int s = f1.s();
  const auto b1 = f1.support().bounding_box(), b2 = f2.support().bounding_box();
  const double lo1 = b1->first(0), hi1 = b1->second(0), lo2 = b2->first(0), hi2 = b2->second(0);
  const double lo = std::min(lo1, lo2), hi = std::max(hi1, hi2);
  auto g1 = [&](double x) { return f1.g(Vector::Constant(1, x)); };
  auto g2 = [&](double x) { return f2.g(Vector::Constant(1, x)); };
  auto gmax = [&](double x) { return std::max(g1(x), g2(x)); };

  {
    const int m = 4000;
    const double h = (hi - lo) / m;
    for (int i = 1; i < m; ++i) {
      const double x = lo + i * h;
      const double tol = 1e-12 * std::max(1.0, gmax(x));
      if (gmax(x) + tol < 0.5 * (gmax(x - h) + gmax(x + h)))
        fail(ErrorKind::hypothesis, "max(f1, f2) is not s-concave near x = " + std::to_string(x));
    }
  }
  if (hi1 < lo2 || hi2 < lo1) fail(ErrorKind::hypothesis, "supports are disjoint; the union body is not convex");

  ValuationReport r;
  const double ilo = std::max(lo1, lo2), ihi = std::min(hi1, hi2);
  std::vector<double> cuts = {lo1, hi1, lo2, hi2};
  for (double x : detail::crossings([&](double x) { return g1(x) - g2(x); }, ilo, ihi)) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }), cuts.end());
  r.breakpoints = cuts;

  const double N = s + 2.0, e_g = (s - 1.0) * (1.0 + s) / N, cs = c_s_constant(s);
  auto piece = [&](const SConcaveProfile& f, double a, double b) {
    auto F = [&](const Vector& x) {
      const double g = f.g(x);
      if (!(g > 0.0)) return 0.0;
      const double d = std::abs(hessian(f.profile(), x)(0, 0));
      return cs * std::pow(d, 1.0 / N) * (s == 1 ? 1.0 : std::pow(g, e_g));
    };
    return adaptive_box_de(F, Vector::Constant(1, a), Vector::Constant(1, b), AdaptiveOptions::from(q));
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a < 1e-14) continue;
    const double m = 0.5 * (a + b);
    const Vector mv = Vector::Constant(1, m);
    const bool in1 = f1.support().contains_interior(mv), in2 = f2.support().contains_interior(mv);
    double e1 = 0.0, e2 = 0.0;
    if (in1) {
      const auto e = piece(f1, a, b);
      r.as1 += e.value;
      e1 = e.value;
      r.error += e.error;
    }
    if (in2) {
      const auto e = piece(f2, a, b);
      r.as2 += e.value;
      e2 = e.value;
      r.error += e.error;
    }
    // max takes the larger profile, min exists only where both supports do
    if (in1 && in2) {
      const bool first_larger = g1(m) >= g2(m);
      r.as_max += first_larger ? e1 : e2;
      r.as_min += first_larger ? e2 : e1;
    } else if (in1) {
      r.as_max += e1;
    } else if (in2) {
      r.as_max += e2;
    }
  }
  r.gap = std::abs(r.as1 + r.as2 - r.as_max - r.as_min);
  const double scale = std::abs(r.as1) + std::abs(r.as2) + std::abs(r.as_max) + std::abs(r.as_min);
  r.relative_gap = scale > 0.0 ? r.gap / scale : 0.0;
  return r;
}

}  // namespace affiso
