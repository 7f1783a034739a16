#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "affiso/error.hpp"
#include "affiso/linalg.hpp"
#include "affiso/parallel.hpp"
#include "affiso/quadrature/spec.hpp"

namespace affiso {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Probabilists' rule: Jacobi-matrix eigenvalues as starting points, Newton on the
// orthonormal h_n (h_n' = sqrt(n) h_{n-1}), Christoffel weights 1 / sum_k h_k(x)^2.
inline Rule1D probabilists_hermite(int n) {
  Rule1D r;
  if (n == 1) {
    r.nodes = {0.0};
    r.weights = {1.0};
    return r;
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), sub(n - 1);
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  auto recur = [n](double x, double& hn, double& hn1, double& sumsq) {
    double a = 1.0, b = 0.0;  // h_k, h_{k-1}
    sumsq = 1.0;
    for (int k = 0; k < n - 1; ++k) {
      const double c = (x * a - std::sqrt(static_cast<double>(k)) * b) / std::sqrt(k + 1.0);
      b = a;
      a = c;
      if (k < n - 2) sumsq += a * a;
    }
    // a = h_{n-1}, b = h_{n-2}
    hn1 = a;
    hn = (x * a - std::sqrt(n - 1.0) * b) / std::sqrt(static_cast<double>(n));
  };
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    double hn, hn1, sumsq;
    for (int it = 0; it < 8; ++it) {
      recur(x, hn, hn1, sumsq);
      const double dx = hn / (std::sqrt(static_cast<double>(n)) * hn1);
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    recur(x, hn, hn1, sumsq);
    r.nodes[i] = x;
    r.weights[i] = 1.0 / (sumsq + hn1 * hn1);
  }
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (r.nodes[j] - r.nodes[i]);
    const double w = 0.5 * (r.weights[i] + r.weights[j]);
    r.nodes[i] = -x;
    r.nodes[j] = x;
    r.weights[i] = r.weights[j] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace detail

/// Nodes and weights for the standard normal density; weights sum to 1.
inline const Rule1D& gauss_hermite_rule(int order) {
  if (order < 1) fail(ErrorKind::domain, "Gauss-Hermite order must be >= 1");
  if (order > 200) fail(ErrorKind::capability, "Gauss-Hermite order above 200 is not supported");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Rule1D>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) {
    slot = std::make_unique<Rule1D>(detail::probabilists_hermite(order));
  }
  return *slot;
}

inline constexpr double gauss_hermite_budget = 5e7;

namespace detail {

inline double tensor_gh(const std::function<double(const Vector&)>& F, int n, int order, int jobs, long& evals) {
  const Rule1D& rule = gauss_hermite_rule(order);
  const double total = std::pow(static_cast<double>(order), n);
  if (total > gauss_hermite_budget)
    fail(ErrorKind::capability, "tensor Gauss-Hermite grid of " + std::to_string(order) + "^" + std::to_string(n) +
                                    " nodes exceeds the budget; use monte-carlo");
  const std::size_t count = static_cast<std::size_t>(total);
  std::vector<double> terms(count);
  parallel_for(count, jobs, [&](std::size_t idx) {
    Vector y(n);
    double w = 1.0;
    std::size_t rem = idx;
    for (int d = 0; d < n; ++d) {
      const std::size_t k = rem % order;
      rem /= order;
      y(d) = rule.nodes[k];
      w *= rule.weights[k];
    }
    const double v = F(y);
    if (!std::isfinite(v)) fail(ErrorKind::numeric, "non-finite integrand at y=" + format_point(y));
    terms[idx] = w * v;
  });
  evals += static_cast<long>(count);
  return pairwise_sum(terms);
}

}  // namespace detail

/// E[F(Y)] for Y standard normal in R^n by a tensor rule.
/// Error estimate |Q(order) - Q(order - 5)| when that rule exists and fits the budget.
inline IntegralEstimate integrate_gaussian(const std::function<double(const Vector&)>& F, int n, int order,
                                           int jobs = 1) {
  if (n < 1) fail(ErrorKind::domain, "dimension must be positive");
  IntegralEstimate est;
  est.method = "gauss-hermite(" + std::to_string(order) + ")";
  est.value = detail::tensor_gh(F, n, order, jobs, est.evaluations);
  if (order > 5) {
    const double coarse = detail::tensor_gh(F, n, order - 5, jobs, est.evaluations);
    est.error = std::abs(est.value - coarse);
  } else {
    est.error = 0.0;
    est.error_available = false;
    est.warnings.push_back("error estimate unavailable for order <= 5");
  }
  return est;
}

}  // namespace affiso
