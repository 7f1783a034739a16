#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "affiso/error.hpp"
#include "affiso/field.hpp"
#include "affiso/polynomial.hpp"
#include "affiso/quadrature/gauss_hermite.hpp"

namespace affiso {

/// h_0..h_d at x, normalised in L2 of the standard Gaussian:
/// h_{k+1} = (x h_k - sqrt(k) h_{k-1}) / sqrt(k + 1).
inline std::vector<double> hermite_all(int d, double x) {
  std::vector<double> h(d + 1);
  h[0] = 1.0;
  if (d >= 1) h[1] = x;
  for (int k = 1; k < d; ++k) h[k + 1] = (x * h[k] - std::sqrt(static_cast<double>(k)) * h[k - 1]) / std::sqrt(k + 1.0);
  return h;
}

inline double hermite_eval(int i, double x) {
  if (i < 0) fail(ErrorKind::domain, "hermite index must be >= 0");
  return hermite_all(i, x)[i];
}

/// h_i as a field on R with exact derivatives h_i' = sqrt(i) h_{i-1}.
inline ScalarField hermite_field(int i) {
  if (i < 0) fail(ErrorKind::domain, "hermite index must be >= 0");
  return make_field(
      1, [i](const Vector& x) { return hermite_eval(i, x(0)); },
      [i](const Vector& x) {
        return Vector::Constant(1, i >= 1 ? std::sqrt(static_cast<double>(i)) * hermite_eval(i - 1, x(0)) : 0.0);
      },
      [i](const Vector& x) {
        return Matrix::Constant(1, 1, i >= 2 ? std::sqrt(static_cast<double>(i) * (i - 1)) * hermite_eval(i - 2, x(0)) : 0.0);
      });
}

/// Coefficients a_alpha of phi = sum a_alpha prod_j h_{alpha_j}(x_j), |alpha| <= degree.
class HermiteExpansion {
 public:
  static constexpr double prune_threshold = 1e-14;

  HermiteExpansion(int n, int degree) : n_(n), degree_(degree) {
    if (n < 1 || degree < 0) fail(ErrorKind::construction, "invalid expansion shape");
  }

  /// Exact expansion of the basis element h_k in one dimension.
  static HermiteExpansion basis(int k) {
    HermiteExpansion e(1, k);
    e.coeffs_[{k}] = 1.0;
    e.norm_sq_ = 1.0;
    return e;
  }

  int dimension() const { return n_; }
  int degree() const { return degree_; }
  const std::map<MultiIndex, double>& coefficients() const { return coeffs_; }

  double coefficient(const MultiIndex& a) const {
    auto it = coeffs_.find(a);
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  void set(const MultiIndex& a, double c) {
    if (static_cast<int>(a.size()) != n_) fail(ErrorKind::construction, "multi-index has wrong length");
    if (std::abs(c) < prune_threshold) {
      coeffs_.erase(a);
      return;
    }
    if (!std::isfinite(c)) fail(ErrorKind::numeric, "non-finite Hermite coefficient");
    coeffs_[a] = c;
  }

  void set_norm_sq(double v) { norm_sq_ = v; }
  double norm_sq() const { return norm_sq_; }

  double coefficient_energy() const {
    double s = 0.0;
    for (const auto& [a, c] : coeffs_) s += c * c;
    return s;
  }

  /// ||phi||^2 - sum a^2; the mass beyond the truncation degree.
  double tail_energy() const { return norm_sq_ - coefficient_energy(); }
  double tail_bound() const { return std::max(0.0, tail_energy()); }

  double mean() const { return coefficient(MultiIndex(n_, 0)); }

  double operator()(const Vector& x) const {
    std::vector<std::vector<double>> h(n_);
    for (int j = 0; j < n_; ++j) h[j] = hermite_all(degree_, x(j));
    double s = 0.0;
    for (const auto& [a, c] : coeffs_) {
      double t = c;
      for (int j = 0; j < n_; ++j) t *= h[j][a[j]];
      s += t;
    }
    return s;
  }

 private:
  int n_;
  int degree_;
  std::map<MultiIndex, double> coeffs_;
  double norm_sq_ = 0.0;
};

inline int total_degree(const MultiIndex& a) {
  int k = 0;
  for (int e : a) k += e;
  return k;
}

/// Projection coefficients by tensor Gauss-Hermite of the given order.
inline HermiteExpansion expand(const std::function<double(const Vector&)>& phi, int n, int degree = 12, int order = 40) {
  if (std::pow(static_cast<double>(order), n) > 2e7) fail(ErrorKind::capability, "expansion grid exceeds the budget");
  const Rule1D& rule = gauss_hermite_rule(order);
  const std::vector<MultiIndex> idx = multi_indices(n, degree);
  std::vector<std::vector<double>> hv(order);
  for (int k = 0; k < order; ++k) hv[k] = hermite_all(degree, rule.nodes[k]);
  // Neumaier-compensated accumulation per coefficient
  std::vector<double> sum(idx.size() + 1, 0.0), comp(idx.size() + 1, 0.0);
  auto accumulate = [&](std::size_t a, double v) {
    const double t = sum[a] + v;
    comp[a] += std::abs(sum[a]) >= std::abs(v) ? (sum[a] - t) + v : (v - t) + sum[a];
    sum[a] = t;
  };
  const std::size_t count = static_cast<std::size_t>(std::pow(static_cast<double>(order), n));
  std::vector<int> node(n);
  Vector x(n);
  for (std::size_t id = 0; id < count; ++id) {
    std::size_t rem = id;
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      node[d] = static_cast<int>(rem % order);
      rem /= order;
      x(d) = rule.nodes[node[d]];
      w *= rule.weights[node[d]];
    }
    const double v = phi(x);
    if (!std::isfinite(v)) fail(ErrorKind::numeric, "non-finite test function at " + format_point(x));
    accumulate(idx.size(), w * v * v);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      double b = w * v;
      for (int d = 0; d < n; ++d) b *= hv[node[d]][idx[a][d]];
      accumulate(a, b);
    }
  }
  HermiteExpansion e(n, degree);
  for (std::size_t a = 0; a < idx.size(); ++a) e.set(idx[a], sum[a] + comp[a]);
  e.set_norm_sq(sum[idx.size()] + comp[idx.size()]);
  return e;
}

inline HermiteExpansion expand(const ScalarField& phi, int degree = 12, int order = 40) {
  return expand(phi.value, phi.dimension, degree, order);
}

/// Polynomial input: the rule order is chosen so that every coefficient and the norm are exact.
inline HermiteExpansion expand(const Polynomial& p, int degree = -1) {
  const int d = p.degree();
  if (degree < 0) degree = d;
  const int order = std::max(d + 1, (d + degree) / 2 + 1) + 1;
  return expand([p](const Vector& x) { return p(x); }, p.dimension(), degree, order);
}

/// Sum of a^2 over non-zero multi-indices.
inline double spectral_variance(const HermiteExpansion& e) {
  double s = 0.0;
  for (const auto& [a, c] : e.coefficients())
    if (total_degree(a) > 0) s += c * c;
  return s;
}

/// Sum of (3k/2 - k^2/2) a^2 with k = |alpha|.
inline double spectral_reverse_poincare_lhs(const HermiteExpansion& e) {
  double s = 0.0;
  for (const auto& [a, c] : e.coefficients()) {
    const double k = total_degree(a);
    s += (1.5 * k - 0.5 * k * k) * c * c;
  }
  return s;
}

/// k (3 - k) / 2, the spectral weight that is at most 1 on positive integers.
inline double reverse_poincare_weight(int k) { return 0.5 * k * (3 - k); }

/// Falling factorial k (k-1) ... (k-j+1).
inline double falling_factorial(int k, int j) {
  if (j > k) return 0.0;
  double r = 1.0;
  for (int i = 0; i < j; ++i) r *= (k - i);
  return r;
}

/// Integral of (phi^(j))^2 against the Gaussian: sum a_k^2 k!/(k-j)!.
inline double derivative_energy(const HermiteExpansion& e, int j) {
  if (e.dimension() != 1) fail(ErrorKind::domain, "derivative_energy is one-dimensional");
  if (j < 0) fail(ErrorKind::domain, "derivative order must be >= 0");
  double s = 0.0;
  for (const auto& [a, c] : e.coefficients()) s += c * c * falling_factorial(a[0], j);
  return s;
}

struct ChainSums {
  double left = 0.0, middle = 0.0, right = 0.0;
};

inline double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

/// left = sum_{j<m} E(2j+1)/(2j+1)!, middle = sum_{j<=m} E(2j)/(2j)!, right = sum_{j<=m} E(2j+1)/(2j+1)!.
inline ChainSums theorem14_sums(const HermiteExpansion& e, int m, double mean_tol = 1e-10) {
  if (e.dimension() != 1) fail(ErrorKind::domain, "the derivative chain is one-dimensional");
  if (m < 1) fail(ErrorKind::domain, "m must be >= 1");
  const double scale = std::max(1.0, std::sqrt(e.coefficient_energy()));
  if (std::abs(e.mean()) > mean_tol * scale)
    fail(ErrorKind::mean_not_zero, "test function has mean " + std::to_string(e.mean()));
  ChainSums s;
  for (int j = 0; j <= m; ++j) {
    const double odd = derivative_energy(e, 2 * j + 1) / factorial(2 * j + 1);
    if (j < m) s.left += odd;
    s.right += odd;
    s.middle += derivative_energy(e, 2 * j) / factorial(2 * j);
  }
  // the j = 0 even term includes a_0^2; it is zero for mean-zero input
  return s;
}

/// Binomial coefficient as an exact integer.
inline long long binomial(int k, int j) {
  if (j < 0 || j > k) return 0;
  long long r = 1;
  for (int i = 1; i <= j; ++i) r = r * (k - j + i) / i;
  return r;
}

struct IntegerChain {
  long long left = 0, middle = 0, right = 0;
};

/// Chain sums for h_k in closed form: sums of C(k, 2j+1) and C(k, 2j).
inline IntegerChain theorem14_binomial(int k, int m) {
  IntegerChain c;
  for (int j = 0; j <= m; ++j) {
    if (j < m) c.left += binomial(k, 2 * j + 1);
    c.right += binomial(k, 2 * j + 1);
    c.middle += binomial(k, 2 * j);
  }
  return c;
}

}  // namespace affiso
