#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "affiso/error.hpp"
#include "affiso/field.hpp"
#include "affiso/linalg.hpp"

namespace affiso {

/// Affine chart x = center + map * y in which integrands of a function are
/// well behaved (standardised for Gaussians, singular loci on coordinate
/// hyperplanes for product families). Integrators work in y.
struct Frame {
  Vector center;
  Matrix map;
  bool gaussian = false;  // f(center + map y) is proportional to exp(-|y|^2 / 2)

  static Frame identity(int n) { return {Vector::Zero(n), Matrix::Identity(n, n), false}; }
};

/// Log-concave function f = exp(-psi) with psi convex.
class Potential {
 public:
  Potential(ScalarField psi, Frame frame, std::string label = "potential")
      : psi_(std::move(psi)), frame_(std::move(frame)), label_(std::move(label)) {
    if (!psi_.value) fail(ErrorKind::construction, "potential needs a value oracle");
    if (frame_.center.size() != psi_.dimension || frame_.map.rows() != psi_.dimension)
      fail(ErrorKind::construction, "potential frame has wrong dimension");
  }

  int dimension() const { return psi_.dimension; }
  const ScalarField& psi() const { return psi_; }
  const SupportRegion& support() const { return psi_.support; }
  const Frame& frame() const { return frame_; }
  const std::string& label() const { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }

  double value(const Vector& x) const {
    if (!support().contains(x)) return 0.0;
    return std::exp(-psi_.value(x));
  }

  /// f = exp(-psi) as a field, with gradient -f grad psi and Hessian f (grad psi grad psi^T - hess psi).
  ScalarField f_field() const {
    ScalarField out;
    out.dimension = dimension();
    out.support = support();
    auto psi = psi_;
    out.value = [psi](const Vector& x) { return psi.support.contains(x) ? std::exp(-psi.value(x)) : 0.0; };
    out.gradient = [psi](const Vector& x) -> Vector {
      const double f = std::exp(-psi.value(x));
      return -f * affiso::gradient(psi, x);
    };
    out.hessian = [psi](const Vector& x) -> Matrix {
      const double f = std::exp(-psi.value(x));
      const Vector g = affiso::gradient(psi, x);
      return f * (g * g.transpose() - affiso::hessian(psi, x));
    };
    return out;
  }

  /// lambda * f.
  Potential scaled(double lambda) const {
    if (!(lambda > 0.0)) fail(ErrorKind::construction, "scale factor must be positive");
    ScalarField p = psi_;
    const double shift = std::log(lambda);
    p.value = [inner = psi_.value, shift](const Vector& x) { return inner(x) - shift; };
    return Potential(std::move(p), frame_, label_);
  }

  /// x -> f(A x); A invertible.
  Potential composed(const Matrix& A) const {
    const int n = dimension();
    if (A.rows() != n || A.cols() != n) fail(ErrorKind::construction, "composition matrix has wrong shape");
    if (std::abs(determinant(A)) == 0.0) fail(ErrorKind::construction, "composition matrix must be invertible");
    const Matrix inv = A.inverse();
    ScalarField p;
    p.dimension = n;
    p.support = support().preimage(A, Vector::Zero(n));
    auto inner = psi_;
    p.value = [inner, A](const Vector& x) { return inner.value(A * x); };
    p.gradient = [inner, A](const Vector& x) -> Vector { return A.transpose() * affiso::gradient(inner, A * x); };
    p.hessian = [inner, A](const Vector& x) -> Matrix {
      return symmetrized(A.transpose() * affiso::hessian(inner, A * x) * A);
    };
    Frame fr{inv * frame_.center, inv * frame_.map, frame_.gaussian};
    return Potential(std::move(p), std::move(fr), label_);
  }

  /// x -> f(x - b).
  Potential translated(const Vector& b) const {
    const int n = dimension();
    ScalarField p;
    p.dimension = n;
    p.support = support().preimage(Matrix::Identity(n, n), -b);
    auto inner = psi_;
    p.value = [inner, b](const Vector& x) { return inner.value(x - b); };
    p.gradient = [inner, b](const Vector& x) -> Vector { return affiso::gradient(inner, Vector(x - b)); };
    p.hessian = [inner, b](const Vector& x) -> Matrix { return affiso::hessian(inner, Vector(x - b)); };
    Frame fr{frame_.center + b, frame_.map, frame_.gaussian};
    return Potential(std::move(p), std::move(fr), label_);
  }

 private:
  ScalarField psi_;
  Frame frame_;
  std::string label_;
};

/// Minimiser of a convex potential by damped Newton from the frame center.
inline Vector potential_minimizer(const Potential& f) {
  Vector x = f.frame().center;
  const ScalarField& psi = f.psi();
  const int n = f.dimension();
  for (int it = 0; it < 200; ++it) {
    Vector g;
    try {
      g = gradient(psi, x);
    } catch (const Error&) {
      break;
    }
    if (g.norm() <= 1e-13 * std::max(1.0, std::abs(psi.value(x)))) break;
    Matrix H;
    try {
      H = hessian(psi, x);
    } catch (const Error&) {
      H = Matrix::Identity(n, n);
    }
    double mu = std::max(0.0, -min_eigenvalue(H)) + 1e-12;
    Vector step = -(H + mu * Matrix::Identity(n, n)).ldlt().solve(g);
    if (!step.allFinite()) step = -g;
    const double v0 = psi.value(x);
    double t = 1.0;
    while (t > 1e-20) {
      const Vector y = x + t * step;
      if (psi.support.contains_interior(y) && psi.value(y) <= v0) break;
      t *= 0.5;
    }
    if (t <= 1e-20) break;
    x += t * step;
  }
  return x;
}

struct ProbeReport {
  double extreme_eigenvalue = 0.0;  // min for convexity, max for concavity
  Vector worst_point;
  int points_checked = 0;
  bool pass = true;
};

namespace detail {
// Points on coordinate hyperplanes are nudged off them (oracles may be singular there).
inline Vector off_hyperplanes(Vector x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::abs(x(i)) < 1e-12) x(i) = hessian_step(x);
  return x;
}
}  // namespace detail

/// Deterministic probe points: Halton points in the frame box [-3, 3]^n (or the
/// bounding box of a compact support), kept if interior.
inline std::vector<Vector> default_probe_points(const Potential& f, int count = 200) {
  const int n = f.dimension();
  std::vector<Vector> out;
  if (auto bb = f.support().bounding_box()) {
    for (Vector x : halton_points(bb->first, bb->second, 4 * count)) {
      x = detail::off_hyperplanes(std::move(x));
      if (f.support().contains_interior(x) && static_cast<int>(out.size()) < count) out.push_back(x);
    }
    return out;
  }
  for (const Vector& y : halton_points(Vector::Constant(n, -3.0), Vector::Constant(n, 3.0), count))
    out.push_back(detail::off_hyperplanes(f.frame().center + f.frame().map * y));
  return out;
}

/// Minimum Hessian eigenvalue of psi over the sample; passes iff >= -tol.
inline ProbeReport convexity_probe(const Potential& f, const std::vector<Vector>& points, double tol = 1e-8) {
  ProbeReport r;
  r.extreme_eigenvalue = std::numeric_limits<double>::infinity();
  for (const Vector& x : points) {
    const double ev = min_eigenvalue(hessian(f.psi(), x));
    ++r.points_checked;
    if (ev < r.extreme_eigenvalue) {
      r.extreme_eigenvalue = ev;
      r.worst_point = x;
    }
  }
  r.pass = r.points_checked == 0 || r.extreme_eigenvalue >= -tol;
  return r;
}

inline ProbeReport convexity_probe(const Potential& f, double tol = 1e-8) {
  return convexity_probe(f, default_probe_points(f), tol);
}

/// f_eps(x) = f(x) exp(-eps |x|^2) on {f >= eps}.
inline Potential regularize(const Potential& f, double eps) {
  if (!(eps > 0.0)) fail(ErrorKind::construction, "regularisation parameter must be positive");
  const int n = f.dimension();
  const Vector xstar = potential_minimizer(f);
  const double level = -std::log(eps);
  const double psi_min = f.psi().value(xstar);
  if (!(psi_min < level)) fail(ErrorKind::empty_support, "{f >= eps} is empty: max f = " + std::to_string(std::exp(-psi_min)));
  ScalarField p;
  p.dimension = n;
  p.support = f.support().intersect_sublevel(f.psi().value, level, xstar);
  auto inner = f.psi();
  p.value = [inner, eps](const Vector& x) { return inner.value(x) + eps * x.squaredNorm(); };
  p.gradient = [inner, eps](const Vector& x) -> Vector { return gradient(inner, x) + 2.0 * eps * x; };
  p.hessian = [inner, eps, n](const Vector& x) -> Matrix {
    return hessian(inner, x) + 2.0 * eps * Matrix::Identity(n, n);
  };
  Frame fr = f.frame();
  fr.gaussian = false;
  return Potential(std::move(p), std::move(fr), f.label() + "|eps=" + std::to_string(eps));
}

/// s-concave function f = g^s with concave profile g >= 0 on a compact convex support.
class SConcaveProfile {
 public:
  SConcaveProfile(int s, ScalarField profile, std::string label = "profile")
      : s_(s), g_(std::move(profile)), label_(std::move(label)) {
    if (s_ < 1) fail(ErrorKind::construction, "s must be a positive integer");
    if (!g_.support.compact()) fail(ErrorKind::construction, "s-concave profile needs a compact support");
    if (!g_.value) fail(ErrorKind::construction, "profile needs a value oracle");
  }

  int s() const { return s_; }
  int dimension() const { return g_.dimension; }
  const ScalarField& profile() const { return g_; }
  const SupportRegion& support() const { return g_.support; }
  const std::string& label() const { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }

  double g(const Vector& x) const { return support().contains(x) ? std::max(0.0, g_.value(x)) : 0.0; }
  double value(const Vector& x) const { return std::pow(g(x), s_); }

  ScalarField f_field() const {
    auto g = g_;
    const int s = s_;
    ScalarField out;
    out.dimension = dimension();
    out.support = support();
    out.value = [g, s](const Vector& x) { return g.support.contains(x) ? std::pow(std::max(0.0, g.value(x)), s) : 0.0; };
    out.gradient = [g, s](const Vector& x) -> Vector {
      return s * std::pow(g.value(x), s - 1) * affiso::gradient(g, x);
    };
    out.hessian = [g, s](const Vector& x) -> Matrix {
      const double v = g.value(x);
      const Vector dg = affiso::gradient(g, x);
      Matrix h = s * std::pow(v, s - 1) * affiso::hessian(g, x);
      if (s > 1) h += s * (s - 1) * std::pow(v, s - 2) * dg * dg.transpose();
      return h;
    };
    return out;
  }

  /// lambda * f, i.e. profile scaled by lambda^(1/s).
  SConcaveProfile scaled(double lambda) const {
    if (!(lambda > 0.0)) fail(ErrorKind::construction, "scale factor must be positive");
    const double c = std::pow(lambda, 1.0 / s_);
    ScalarField p = g_;
    auto inner = g_;
    p.value = [inner, c](const Vector& x) { return c * inner.value(x); };
    p.gradient = [inner, c](const Vector& x) -> Vector { return c * affiso::gradient(inner, x); };
    p.hessian = [inner, c](const Vector& x) -> Matrix { return c * affiso::hessian(inner, x); };
    return SConcaveProfile(s_, std::move(p), label_);
  }

  /// x -> f(A x).
  SConcaveProfile composed(const Matrix& A) const {
    const int n = dimension();
    if (A.rows() != n || A.cols() != n) fail(ErrorKind::construction, "composition matrix has wrong shape");
    ScalarField p;
    p.dimension = n;
    p.support = support().preimage(A, Vector::Zero(n));
    auto inner = g_;
    p.value = [inner, A](const Vector& x) { return inner.value(A * x); };
    p.gradient = [inner, A](const Vector& x) -> Vector { return A.transpose() * affiso::gradient(inner, A * x); };
    p.hessian = [inner, A](const Vector& x) -> Matrix {
      return symmetrized(A.transpose() * affiso::hessian(inner, A * x) * A);
    };
    return SConcaveProfile(s_, std::move(p), label_);
  }

  /// Profile g = exp(-psi / s) of a compactly supported log-concave function.
  /// Concavity of g is not implied; probe it with concavity_probe.
  static SConcaveProfile from_potential(const Potential& f, int s) {
    if (!f.support().compact()) fail(ErrorKind::construction, "only compactly supported potentials have s-concave profiles");
    auto psi = f.psi();
    const double inv = 1.0 / s;
    ScalarField g;
    g.dimension = f.dimension();
    g.support = f.support();
    g.value = [psi, inv](const Vector& x) { return psi.support.contains(x) ? std::exp(-inv * psi.value(x)) : 0.0; };
    g.gradient = [psi, inv](const Vector& x) -> Vector {
      return -inv * std::exp(-inv * psi.value(x)) * affiso::gradient(psi, x);
    };
    g.hessian = [psi, inv](const Vector& x) -> Matrix {
      const double v = std::exp(-inv * psi.value(x));
      const Vector d = affiso::gradient(psi, x);
      return v * (inv * inv * d * d.transpose() - inv * affiso::hessian(psi, x));
    };
    return SConcaveProfile(s, std::move(g), f.label() + "|s=" + std::to_string(s));
  }

 private:
  int s_;
  ScalarField g_;
  std::string label_;
};

inline std::vector<Vector> default_probe_points(const SConcaveProfile& f, int count = 200) {
  std::vector<Vector> out;
  const auto bb = f.support().bounding_box();
  for (Vector x : halton_points(bb->first, bb->second, 6 * count)) {
    if (!f.support().contains_interior(x) || f.g(x) <= 1e-8) continue;
    if (static_cast<int>(out.size()) < count) out.push_back(std::move(x));
  }
  return out;
}

/// Maximum Hessian eigenvalue of the profile over the sample; passes iff <= tol.
inline ProbeReport concavity_probe(const SConcaveProfile& f, const std::vector<Vector>& points, double tol = 1e-8) {
  ProbeReport r;
  r.extreme_eigenvalue = -std::numeric_limits<double>::infinity();
  for (const Vector& x : points) {
    double ev;
    try {
      ev = max_eigenvalue(hessian(f.profile(), x));
    } catch (const Error&) {
      continue;
    }
    ++r.points_checked;
    if (ev > r.extreme_eigenvalue) {
      r.extreme_eigenvalue = ev;
      r.worst_point = x;
    }
  }
  const double scale = std::max(1.0, std::abs(r.extreme_eigenvalue));
  r.pass = r.points_checked == 0 || r.extreme_eigenvalue <= tol * scale;
  return r;
}

inline ProbeReport concavity_probe(const SConcaveProfile& f, double tol = 1e-8) {
  return concavity_probe(f, default_probe_points(f), tol);
}

}  // namespace affiso
