#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "affiso/error.hpp"
#include "affiso/field.hpp"

namespace affiso {

using MultiIndex = std::vector<int>;

/// Sparse multivariate polynomial with exact derivatives.
class Polynomial {
 public:
  explicit Polynomial(int n) : n_(n) {
    if (n < 1) fail(ErrorKind::construction, "polynomial dimension must be positive");
  }

  /// 1D polynomial c0 + c1 x + c2 x^2 + ...
  static Polynomial univariate(const std::vector<double>& coeffs) {
    Polynomial p(1);
    for (std::size_t k = 0; k < coeffs.size(); ++k) p.add({static_cast<int>(k)}, coeffs[k]);
    return p;
  }

  void add(const MultiIndex& alpha, double c) {
    if (static_cast<int>(alpha.size()) != n_) fail(ErrorKind::construction, "multi-index has wrong length");
    for (int a : alpha)
      if (a < 0) fail(ErrorKind::construction, "negative exponent");
    if (c == 0.0) return;
    terms_[alpha] += c;
  }

  int dimension() const { return n_; }
  const std::map<MultiIndex, double>& terms() const { return terms_; }

  int degree() const {
    int d = 0;
    for (const auto& [a, c] : terms_) {
      int k = 0;
      for (int e : a) k += e;
      d = std::max(d, k);
    }
    return d;
  }

  double operator()(const Vector& x) const {
    double s = 0.0;
    for (const auto& [a, c] : terms_) s += c * monomial(a, x);
    return s;
  }

  /// Partial derivative along coordinate i.
  Polynomial derivative(int i) const {
    Polynomial d(n_);
    for (const auto& [a, c] : terms_) {
      if (a[i] == 0) continue;
      MultiIndex b = a;
      --b[i];
      d.add(b, c * a[i]);
    }
    return d;
  }

  Vector gradient(const Vector& x) const {
    Vector g(n_);
    for (int i = 0; i < n_; ++i) g(i) = derivative(i)(x);
    return g;
  }

  Matrix hessian(const Vector& x) const {
    Matrix h(n_, n_);
    for (int i = 0; i < n_; ++i) {
      const Polynomial di = derivative(i);
      for (int j = i; j < n_; ++j) h(i, j) = h(j, i) = di.derivative(j)(x);
    }
    return h;
  }

  ScalarField to_field() const {
    const Polynomial p = *this;
    std::vector<Polynomial> d1;
    std::vector<std::vector<Polynomial>> d2(n_);
    for (int i = 0; i < n_; ++i) {
      d1.push_back(derivative(i));
      for (int j = 0; j < n_; ++j) d2[i].push_back(d1[i].derivative(j));
    }
    const int n = n_;
    return make_field(
        n, [p](const Vector& x) { return p(x); },
        [d1, n](const Vector& x) {
          Vector g(n);
          for (int i = 0; i < n; ++i) g(i) = d1[i](x);
          return g;
        },
        [d2, n](const Vector& x) {
          Matrix h(n, n);
          for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) h(i, j) = h(j, i) = d2[i][j](x);
          return h;
        });
  }

  std::string to_string() const {
    std::string out;
    for (const auto& [a, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += std::to_string(c);
      for (int i = 0; i < n_; ++i)
        if (a[i] > 0) out += "*x" + std::to_string(i + 1) + (a[i] > 1 ? "^" + std::to_string(a[i]) : "");
    }
    return out.empty() ? "0" : out;
  }

 private:
  static double monomial(const MultiIndex& a, const Vector& x) {
    double m = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (int e = 0; e < a[i]; ++e) m *= x(static_cast<Eigen::Index>(i));
    return m;
  }

  int n_;
  std::map<MultiIndex, double> terms_;
};

/// All multi-indices of length n with total degree <= d, in graded lexicographic order.
inline std::vector<MultiIndex> multi_indices(int n, int d) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= d; ++k) {
    MultiIndex a(n, 0);
    // enumerate compositions of k into n parts
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == n - 1) {
        a[pos] = left;
        out.push_back(a);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[pos] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, k);
  }
  return out;
}

/// Dense random polynomial with coefficients uniform in [-1, 1].
template <class Rng>
Polynomial random_polynomial(int n, int degree, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial p(n);
  for (const MultiIndex& a : multi_indices(n, degree)) p.add(a, u(rng));
  return p;
}

}  // namespace affiso
