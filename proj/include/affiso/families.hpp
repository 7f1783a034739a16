#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "affiso/error.hpp"
#include "affiso/hermite.hpp"
#include "affiso/linalg.hpp"
#include "affiso/polynomial.hpp"
#include "affiso/potential.hpp"
#include "affiso/special.hpp"

namespace affiso {

/// Test function for the Gaussian-measure inequalities. Polynomial and Hermite
/// inputs keep their exact representation for the spectral path.
struct TestFunction {
  ScalarField phi;
  std::optional<Polynomial> polynomial;
  std::optional<int> hermite_index;
  std::string label;
  int dimension() const { return phi.dimension; }
};

using FamilyObject = std::variant<Potential, SConcaveProfile, TestFunction>;

struct Family {
  std::string label;
  FamilyObject object;

  bool is_potential() const { return std::holds_alternative<Potential>(object); }
  bool is_profile() const { return std::holds_alternative<SConcaveProfile>(object); }
  bool is_test_function() const { return std::holds_alternative<TestFunction>(object); }
  const Potential& potential() const;
  const SConcaveProfile& profile() const;
  const TestFunction& test_function() const;
};

inline const Potential& Family::potential() const {
  if (!is_potential()) fail(ErrorKind::usage, "family '" + label + "' is not a log-concave potential");
  return std::get<Potential>(object);
}
inline const SConcaveProfile& Family::profile() const {
  if (!is_profile()) fail(ErrorKind::usage, "family '" + label + "' is not an s-concave profile");
  return std::get<SConcaveProfile>(object);
}
inline const TestFunction& Family::test_function() const {
  if (!is_test_function()) fail(ErrorKind::usage, "family '" + label + "' is not a test function");
  return std::get<TestFunction>(object);
}

/// Tagged parameter record. Unused fields are ignored by kinds that do not need them.
///
///   standard-gaussian   n
///   gaussian-quadratic  n, A (SPD, default Id/2), b (center), C or normalize
///   pi-gaussian         n, A (SPD, default Id), C or normalize      f = C exp(-pi <Ax,x>)
///   product-power       n, p > 1, C or normalize                     f = C exp(-sum |x_i|^p)
///   double-well         n                                             non-convex, for guard paths
///   cap-gs              n, s                                          (1 - |x|^2)_+^{s/2}
///   quadratic-cap       n, a, b, A, s                                 (a + <b,x> - <Ax,x>)_+^{s/2}
///   power-cap           n, p >= 2, beta in (0,1], s                  (1 - |x|^p)_+^{beta s}
///   polynomial-cap      coeffs, s, b (anchor, default 0)             q(x)_+^s on the component of {q > 0} at b, n = 1
///   polynomial          coeffs (1D) or terms                          test function
///   random-polynomial   n, degree, seed                               test function
///   hermite-basis       k                                             h_k
///
/// Modifiers, applied in order: eps (regularise), scale, compose, translate, profile_s.
struct FamilyDescriptor {
  std::string kind;
  int n = 1;
  std::optional<double> C;
  std::optional<Matrix> A;
  std::optional<Vector> b;
  double a = 1.0;
  double p = 2.0;
  double beta = 1.0;
  int s = 1;
  int k = 0;
  int degree = 2;
  std::uint64_t seed = 0;
  std::vector<double> coeffs;
  std::vector<std::pair<MultiIndex, double>> terms;
  bool normalize = false;
  std::optional<double> eps;
  std::optional<double> scale;
  std::optional<Matrix> compose;
  std::optional<Vector> translate;
  std::optional<int> profile_s;
  std::string name;
};

namespace detail {

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline Matrix matrix_or(const FamilyDescriptor& d, double diag) {
  if (d.A) {
    if (d.A->rows() != d.n || d.A->cols() != d.n) fail(ErrorKind::construction, "A must be n x n");
    if (!is_symmetric(*d.A, 1e-12)) fail(ErrorKind::construction, "A must be symmetric");
    if (!is_spd(*d.A)) fail(ErrorKind::construction, "A must be positive definite");
    return symmetrized(*d.A);
  }
  return diag * Matrix::Identity(d.n, d.n);
}

inline Vector vector_or_zero(const std::optional<Vector>& v, int n) {
  if (!v) return Vector::Zero(n);
  if (v->size() != n) fail(ErrorKind::construction, "vector parameter must have length n");
  return *v;
}

// C exp(-(x-b)^T Q (x-b))
inline Potential quadratic_potential(int n, const Matrix& Q, const Vector& b, double C, std::string label) {
  if (!(C > 0.0)) fail(ErrorKind::construction, "C must be positive");
  const double lc = std::log(C);
  ScalarField psi = make_field(
      n, [Q, b, lc](const Vector& x) { const Vector d = x - b; return d.dot(Q * d) - lc; },
      [Q, b](const Vector& x) -> Vector { return 2.0 * Q * (x - b); },
      [Q](const Vector&) -> Matrix { return 2.0 * Q; });
  Frame fr{b, spd_inverse_sqrt(2.0 * Q), true};
  return Potential(std::move(psi), std::move(fr), std::move(label));
}

inline Potential product_power(int n, double p, double C, std::string label) {
  if (!(p > 1.0)) fail(ErrorKind::construction, "product-power needs p > 1");
  if (!(C > 0.0)) fail(ErrorKind::construction, "C must be positive");
  const double lc = std::log(C);
  ScalarField psi = make_field(
      n,
      [p, lc](const Vector& x) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)), p);
        return s - lc;
      },
      [p](const Vector& x) -> Vector {
        Vector g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
          g(i) = x(i) == 0.0 ? 0.0 : p * std::pow(std::abs(x(i)), p - 1.0) * (x(i) > 0 ? 1.0 : -1.0);
        return g;
      },
      [p](const Vector& x) -> Matrix {
        Matrix h = Matrix::Zero(x.size(), x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
          h(i, i) = p == 2.0 ? 2.0 : p * (p - 1.0) * std::pow(std::abs(x(i)), p - 2.0);
        return h;
      });
  Frame fr = Frame::identity(n);
  if (p == 2.0) {
    fr.map = Matrix::Identity(n, n) / std::sqrt(2.0);
    fr.gaussian = true;
  }
  return Potential(std::move(psi), std::move(fr), std::move(label));
}

// Profile sqrt(a + <b,x> - <Ax,x>) on its ellipsoidal support.
inline SConcaveProfile quadratic_cap(int n, double a, const Vector& b, const Matrix& A, int s, std::string label) {
  const Matrix Ainv = A.inverse();
  const Vector c = 0.5 * Ainv * b;
  const double R2 = a + c.dot(A * c);
  if (!(R2 > 0.0)) fail(ErrorKind::construction, "quadratic cap has empty support (a + <Ac,c> <= 0)");
  SupportRegion sup = SupportRegion::ellipsoid(A / R2, c);
  auto q = [a, b, A](const Vector& x) { return a + b.dot(x) - x.dot(A * x); };
  ScalarField g = make_field(
      n, [q](const Vector& x) { return std::sqrt(std::max(0.0, q(x))); },
      [q, b, A](const Vector& x) -> Vector { return (b - 2.0 * A * x) / (2.0 * std::sqrt(q(x))); },
      [q, b, A](const Vector& x) -> Matrix {
        const double g = std::sqrt(q(x));
        const Vector dq = b - 2.0 * A * x;
        return -A / g - dq * dq.transpose() / (4.0 * g * g * g);
      },
      sup);
  return SConcaveProfile(s, std::move(g), std::move(label));
}

// Profile (1 - |x|^p)^beta on the unit ball.
inline SConcaveProfile power_cap(int n, double p, double beta, int s, std::string label) {
  if (!(p >= 2.0)) fail(ErrorKind::construction, "power-cap needs p >= 2");
  if (!(beta > 0.0 && beta <= 1.0)) fail(ErrorKind::construction, "power-cap needs 0 < beta <= 1");
  auto u_of = [p](const Vector& x) { return 1.0 - std::pow(x.norm(), p); };
  auto du = [p](const Vector& x) -> Vector {
    const double r = x.norm();
    if (r == 0.0) return Vector::Zero(x.size());
    return -p * std::pow(r, p - 2.0) * x;
  };
  auto d2u = [p](const Vector& x) -> Matrix {
    const int m = static_cast<int>(x.size());
    const double r = x.norm();
    if (r == 0.0) return p == 2.0 ? Matrix(-2.0 * Matrix::Identity(m, m)) : Matrix(Matrix::Zero(m, m));
    const Vector e = x / r;
    return -p * std::pow(r, p - 2.0) * (Matrix::Identity(m, m) + (p - 2.0) * e * e.transpose());
  };
  ScalarField g = make_field(
      n, [u_of, beta](const Vector& x) { return std::pow(std::max(0.0, u_of(x)), beta); },
      [u_of, du, beta](const Vector& x) -> Vector { return beta * std::pow(u_of(x), beta - 1.0) * du(x); },
      [u_of, du, d2u, beta](const Vector& x) -> Matrix {
        const double u = u_of(x);
        const Vector d = du(x);
        Matrix h = beta * std::pow(u, beta - 1.0) * d2u(x);
        if (beta != 1.0) h += beta * (beta - 1.0) * std::pow(u, beta - 2.0) * d * d.transpose();
        return h;
      },
      SupportRegion::ball(n, 1.0));
  return SConcaveProfile(s, std::move(g), std::move(label));
}

// Profile q on the interval around the anchor where q > 0 (one dimension).
inline SConcaveProfile polynomial_cap(const std::vector<double>& coeffs, double anchor, int s, std::string label) {
  const Polynomial q = Polynomial::univariate(coeffs);
  auto qv = [q](double x) { return q(Vector::Constant(1, x)); };
  if (!(qv(anchor) > 0.0)) fail(ErrorKind::construction, "polynomial-cap needs q(anchor) > 0");
  auto root = [&](double dir) {
    double in = anchor, step = 1e-3;
    while (qv(anchor + dir * step) > 0.0) {
      in = anchor + dir * step;
      step *= 2.0;
      if (step > 1e6) fail(ErrorKind::construction, "polynomial-cap support is unbounded");
    }
    double out = anchor + dir * step;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (in + out);
      if (mid == in || mid == out) break;
      (qv(mid) > 0.0 ? in : out) = mid;
    }
    return in;
  };
  const double lo = root(-1.0), hi = root(1.0);
  const Polynomial d1 = q.derivative(0), d2 = d1.derivative(0);
  ScalarField g = make_field(
      1, [q](const Vector& x) { return q(x); }, [d1](const Vector& x) -> Vector { return Vector::Constant(1, d1(x)); },
      [d2](const Vector& x) -> Matrix { return Matrix::Constant(1, 1, d2(x)); },
      SupportRegion::box(Vector::Constant(1, lo), Vector::Constant(1, hi)));
  return SConcaveProfile(s, std::move(g), std::move(label));
}

inline Potential double_well(int n) {
  ScalarField psi = make_field(
      n, [](const Vector& x) { const double r2 = x.squaredNorm(); return 0.25 * r2 * r2 - r2; },
      [](const Vector& x) -> Vector { return (x.squaredNorm() - 2.0) * x; },
      [n](const Vector& x) -> Matrix {
        return (x.squaredNorm() - 2.0) * Matrix::Identity(n, n) + 2.0 * x * x.transpose();
      });
  return Potential(std::move(psi), Frame::identity(n), "double-well");
}

inline TestFunction polynomial_test(const Polynomial& p, std::string label) {
  return TestFunction{p.to_field(), p, std::nullopt, std::move(label)};
}

}  // namespace detail

inline Family make_family(const FamilyDescriptor& d) {
  if (d.n < 1) fail(ErrorKind::construction, "dimension must be positive");
  const int n = d.n;
  const std::string dims = "n=" + std::to_string(n);
  std::optional<Potential> pot;
  std::optional<SConcaveProfile> prof;
  std::optional<TestFunction> test;
  std::string label;

  if (d.kind == "standard-gaussian") {
    label = "standard-gaussian(" + dims + ")";
    pot = detail::quadratic_potential(n, 0.5 * Matrix::Identity(n, n), Vector::Zero(n), std::pow(2.0 * M_PI, -0.5 * n), label);
  } else if (d.kind == "gaussian-quadratic" || d.kind == "pi-gaussian") {
    const bool pi = d.kind == "pi-gaussian";
    const Matrix A = detail::matrix_or(d, pi ? 1.0 : 0.5);
    const Matrix Q = pi ? Matrix(M_PI * A) : A;
    const Vector b = detail::vector_or_zero(d.b, n);
    double C = d.C.value_or(1.0);
    if (d.normalize) C = std::sqrt(determinant(Q / M_PI));
    label = d.kind + "(" + dims + ",detA=" + detail::num(determinant(A)) + ")";
    pot = detail::quadratic_potential(n, Q, b, C, label);
  } else if (d.kind == "product-power") {
    double C = d.C.value_or(1.0);
    if (d.normalize) C = std::pow(2.0 / d.p * gamma(1.0 / d.p), -n);
    label = "product-power(p=" + detail::num(d.p) + "," + dims + (d.normalize ? ",unit" : "") + ")";
    pot = detail::product_power(n, d.p, C, label);
  } else if (d.kind == "double-well") {
    label = "double-well(" + dims + ")";
    pot = detail::double_well(n);
  } else if (d.kind == "cap-gs") {
    label = "cap-gs(s=" + std::to_string(d.s) + "," + dims + ")";
    prof = detail::quadratic_cap(n, 1.0, Vector::Zero(n), Matrix::Identity(n, n), d.s, label);
  } else if (d.kind == "quadratic-cap") {
    const Matrix A = detail::matrix_or(d, 1.0);
    const Vector b = detail::vector_or_zero(d.b, n);
    label = "quadratic-cap(a=" + detail::num(d.a) + ",s=" + std::to_string(d.s) + "," + dims + ")";
    prof = detail::quadratic_cap(n, d.a, b, A, d.s, label);
  } else if (d.kind == "power-cap") {
    label = "power-cap(p=" + detail::num(d.p) + ",beta=" + detail::num(d.beta) + ",s=" + std::to_string(d.s) + "," + dims + ")";
    prof = detail::power_cap(n, d.p, d.beta, d.s, label);
  } else if (d.kind == "polynomial-cap") {
    if (n != 1) fail(ErrorKind::construction, "polynomial-cap is one-dimensional");
    if (d.coeffs.empty()) fail(ErrorKind::construction, "polynomial-cap needs coeffs");
    const double anchor = d.b ? (*d.b)(0) : 0.0;
    label = "polynomial-cap(" + Polynomial::univariate(d.coeffs).to_string() + ",s=" + std::to_string(d.s) + ")";
    prof = detail::polynomial_cap(d.coeffs, anchor, d.s, label);
  } else if (d.kind == "polynomial") {
    Polynomial p(d.terms.empty() ? 1 : n);
    if (!d.terms.empty()) {
      for (const auto& [alpha, c] : d.terms) p.add(alpha, c);
    } else {
      if (d.coeffs.empty()) fail(ErrorKind::construction, "polynomial needs coeffs or terms");
      p = Polynomial::univariate(d.coeffs);
    }
    label = "polynomial(" + p.to_string() + ")";
    test = detail::polynomial_test(p, label);
  } else if (d.kind == "random-polynomial") {
    std::mt19937_64 rng(d.seed);
    const Polynomial p = random_polynomial(n, d.degree, rng);
    label = "random-polynomial(" + dims + ",degree=" + std::to_string(d.degree) + ",seed=" + std::to_string(d.seed) + ")";
    test = detail::polynomial_test(p, label);
  } else if (d.kind == "hermite-basis") {
    if (d.k < 0) fail(ErrorKind::construction, "hermite index must be >= 0");
    label = "hermite-basis(k=" + std::to_string(d.k) + ")";
    test = TestFunction{hermite_field(d.k), std::nullopt, d.k, label};
  } else {
    fail(ErrorKind::usage, "unknown family kind '" + d.kind + "'");
  }

  if (pot) {
    if (d.eps) {
      *pot = regularize(*pot, *d.eps);
      label += "|eps=" + detail::num(*d.eps);
    }
    if (d.scale) {
      *pot = pot->scaled(*d.scale);
      label += "|scale=" + detail::num(*d.scale);
    }
    if (d.compose) {
      *pot = pot->composed(*d.compose);
      label += "|compose";
    }
    if (d.translate) {
      *pot = pot->translated(*d.translate);
      label += "|translate";
    }
    if (d.profile_s) {
      prof = SConcaveProfile::from_potential(*pot, *d.profile_s);
      label += "|s=" + std::to_string(*d.profile_s);
      pot.reset();
    }
  } else if (prof) {
    if (d.eps || d.translate || d.profile_s) fail(ErrorKind::construction, "modifier not supported for s-concave profiles");
    if (d.scale) {
      *prof = prof->scaled(*d.scale);
      label += "|scale=" + detail::num(*d.scale);
    }
    if (d.compose) {
      *prof = prof->composed(*d.compose);
      label += "|compose";
    }
  } else if (d.eps || d.scale || d.compose || d.translate || d.profile_s) {
    fail(ErrorKind::construction, "modifiers do not apply to test functions");
  }

  if (!d.name.empty()) label = d.name;
  if (pot) {
    pot->set_label(label);
    return Family{label, *pot};
  }
  if (prof) {
    prof->set_label(label);
    return Family{label, *prof};
  }
  test->label = label;
  return Family{label, *test};
}

}  // namespace affiso
