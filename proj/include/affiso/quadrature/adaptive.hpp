#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <vector>

#include "affiso/error.hpp"
#include "affiso/linalg.hpp"
#include "affiso/parallel.hpp"
#include "affiso/quadrature/gauss_hermite.hpp"
#include "affiso/quadrature/spec.hpp"
#include "affiso/support.hpp"

namespace affiso {

using Integrand = std::function<double(const Vector&)>;

/// Gauss-Legendre rule on [-1, 1], ascending nodes.
inline const Rule1D& gauss_legendre_rule(int points) {
  if (points < 1 || points > 64) fail(ErrorKind::domain, "Gauss-Legendre rule size out of range");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Rule1D>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[points];
  if (!slot) {
    auto r = std::make_unique<Rule1D>();
    r->nodes.assign(points, 0.0);
    r->weights.assign(points, 0.0);
    const int m = (points + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (points + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 0; j < points; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
        }
        pp = points * (z * p1 - p2) / (z * z - 1.0);
        const double z1 = z;
        z = z1 - p1 / pp;
        if (std::abs(z - z1) <= 1e-16) break;
      }
      r->nodes[i] = -z;
      r->nodes[points - 1 - i] = z;
      r->weights[i] = r->weights[points - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    if (points % 2 == 1) r->nodes[m - 1] = 0.0;
    slot = std::move(r);
  }
  return *slot;
}

struct AdaptiveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-13;
  long max_subdivisions = 200000;

  static AdaptiveOptions from(const QuadratureSpec& q) { return {q.rel_tol, q.abs_tol, q.max_subdivisions}; }
};

namespace detail {

using TaggedIntegrand = std::function<double(const Vector&, int)>;

struct Cell {
  Vector lo, hi;
  int tag = 0;
  double value = 0.0;
  double error = 0.0;
  int split_axis = 0;
};

struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const { return a.error < b.error; }
};

// Tensor Gauss-Legendre with per-axis rule choice; axis 0 varies fastest.
inline double tensor_gl(const TaggedIntegrand& F, const Cell& c, const std::vector<const Rule1D*>& rules, long& evals) {
  const int n = static_cast<int>(c.lo.size());
  const Vector mid = 0.5 * (c.lo + c.hi);
  const Vector half = 0.5 * (c.hi - c.lo);
  std::size_t count = 1;
  for (const Rule1D* r : rules) count *= r->nodes.size();
  std::vector<double> terms(count);
  Vector x(n);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rem = idx;
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      const std::size_t k = rem % rules[d]->nodes.size();
      rem /= rules[d]->nodes.size();
      x(d) = mid(d) + half(d) * rules[d]->nodes[k];
      w *= rules[d]->weights[k];
    }
    const double v = F(x, c.tag);
    if (!std::isfinite(v)) fail(ErrorKind::numeric, "non-finite integrand at " + format_point(x));
    terms[idx] = w * v;
  }
  evals += static_cast<long>(count);
  return half.prod() * pairwise_sum(terms);
}

inline void evaluate_cell(const TaggedIntegrand& F, Cell& c, long& evals) {
  const int n = static_cast<int>(c.lo.size());
  const Rule1D& g7 = gauss_legendre_rule(7);
  const Rule1D& g5 = gauss_legendre_rule(5);
  std::vector<const Rule1D*> rules(n, &g7);
  c.value = tensor_gl(F, c, rules, evals);
  c.error = 0.0;
  double worst = -1.0;
  for (int i = 0; i < n; ++i) {
    rules[i] = &g5;
    const double e = std::abs(c.value - tensor_gl(F, c, rules, evals));
    rules[i] = &g7;
    c.error += e;
    if (e > worst) {
      worst = e;
      c.split_axis = i;
    }
  }
}

// Global adaptive subdivision over a list of initial cells.
inline IntegralEstimate adaptive_cells(const TaggedIntegrand& F, std::vector<Cell> initial, const AdaptiveOptions& opt) {
  IntegralEstimate est;
  est.method = "adaptive";
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;
  std::vector<Cell> frozen;
  double total = 0.0, total_err = 0.0;
  for (Cell& c : initial) {
    evaluate_cell(F, c, est.evaluations);
    total += c.value;
    total_err += c.error;
    heap.push(std::move(c));
  }
  long splits = 0;
  bool warned_width = false;
  auto resum = [&] {
    std::vector<double> v, e;
    auto copy = heap;
    while (!copy.empty()) {
      v.push_back(copy.top().value);
      e.push_back(copy.top().error);
      copy.pop();
    }
    for (const Cell& c : frozen) {
      v.push_back(c.value);
      e.push_back(c.error);
    }
    total = pairwise_sum(v);
    total_err = pairwise_sum(e);
  };
  while (!heap.empty()) {
    if (total_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) break;
    if (splits >= opt.max_subdivisions) {
      resum();
      throw NonConvergenceError("adaptive cubature exceeded " + std::to_string(opt.max_subdivisions) +
                                    " subdivisions (value " + std::to_string(total) + ", error " +
                                    std::to_string(total_err) + ")",
                                total, total_err, static_cast<std::size_t>(est.evaluations));
    }
    Cell c = heap.top();
    heap.pop();
    const int ax = c.split_axis;
    const double width = c.hi(ax) - c.lo(ax);
    if (width <= 1e-13 * (1.0 + std::abs(c.lo(ax)) + std::abs(c.hi(ax)))) {
      if (!warned_width) {
        est.warnings.push_back("cell width limit reached; residual error kept");
        warned_width = true;
      }
      frozen.push_back(std::move(c));
      if (heap.empty()) break;
      continue;
    }
    Cell a = c, b = c;
    const double cut = c.lo(ax) + 0.5 * width;
    a.hi(ax) = cut;
    b.lo(ax) = cut;
    evaluate_cell(F, a, est.evaluations);
    evaluate_cell(F, b, est.evaluations);
    total += a.value + b.value - c.value;
    total_err += a.error + b.error - c.error;
    heap.push(std::move(a));
    heap.push(std::move(b));
    ++splits;
    if (splits % 512 == 0) resum();
  }
  resum();
  est.value = total;
  est.error = total_err;
  return est;
}

inline std::vector<Cell> grid_cells(const Vector& lo, const Vector& hi, int per_axis, int tag = 0) {
  const int n = static_cast<int>(lo.size());
  std::vector<Cell> out;
  std::size_t count = 1;
  for (int d = 0; d < n; ++d) count *= per_axis;
  for (std::size_t idx = 0; idx < count; ++idx) {
    Cell c;
    c.lo = lo;
    c.hi = hi;
    c.tag = tag;
    std::size_t rem = idx;
    for (int d = 0; d < n; ++d) {
      const int k = static_cast<int>(rem % per_axis);
      rem /= per_axis;
      const double w = (hi(d) - lo(d)) / per_axis;
      c.lo(d) = lo(d) + k * w;
      c.hi(d) = (k + 1 == per_axis) ? hi(d) : lo(d) + (k + 1) * w;
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline int initial_splits(int n) { return n == 1 ? 4 : (n == 2 ? 3 : 2); }

// Double-exponential map of [-T, T] onto (a, b); nodes that round onto an endpoint are moved inward.
inline constexpr double de_range = 3.2;

inline double de_point(double t, double a, double b, double& jac) {
  const double u = 0.5 * M_PI * std::sinh(t);
  const double th = std::tanh(u);
  const double ch = std::cosh(u);
  jac = 0.5 * (b - a) * 0.5 * M_PI * std::cosh(t) / (ch * ch);
  double x = 0.5 * (a + b) + 0.5 * (b - a) * th;
  if (x <= a) x = std::nextafter(a, b);
  if (x >= b) x = std::nextafter(b, a);
  return x;
}

}  // namespace detail

/// Integral of F over the axis box [lo, hi] by (7,5) embedded Gauss-Legendre subdivision.
inline IntegralEstimate adaptive_box(const Integrand& F, const Vector& lo, const Vector& hi,
                                     const AdaptiveOptions& opt = {}) {
  if (lo.size() != hi.size() || lo.size() == 0) fail(ErrorKind::domain, "box bounds have mismatched dimension");
  const int n = static_cast<int>(lo.size());
  auto G = [&F](const Vector& x, int) { return F(x); };
  return detail::adaptive_cells(G, detail::grid_cells(lo, hi, detail::initial_splits(n)), opt);
}

/// As adaptive_box, after a tanh-sinh change of variables on every axis; suited to
/// integrable endpoint singularities. The truncated tails are added to the error.
inline IntegralEstimate adaptive_box_de(const Integrand& F, const Vector& lo, const Vector& hi,
                                        const AdaptiveOptions& opt = {}) {
  const int n = static_cast<int>(lo.size());
  auto mapped = [&](const Vector& t) {
    Vector x(n);
    double jac = 1.0;
    for (int d = 0; d < n; ++d) {
      double j;
      x(d) = detail::de_point(t(d), lo(d), hi(d), j);
      jac *= j;
    }
    return jac == 0.0 ? 0.0 : jac * F(x);
  };
  const Vector T = Vector::Constant(n, detail::de_range);
  IntegralEstimate est = adaptive_box(mapped, -T, T, opt);
  double tail = 0.0;
  for (int d = 0; d < n; ++d)
    for (double side : {-1.0, 1.0}) {
      Vector t = Vector::Zero(n);
      t(d) = side * detail::de_range;
      tail += std::abs(mapped(t)) * std::pow(2.0 * detail::de_range, n - 1);
    }
  est.error += tail;
  est.method = "adaptive-de";
  return est;
}

/// Unit direction and surface-measure density for hyperspherical angles
/// (theta_1..theta_{n-2} in [0, pi], phi in [0, 2 pi]).
inline Vector sphere_direction(const Vector& angles, double& jac) {
  const int n = static_cast<int>(angles.size()) + 1;
  Vector w(n);
  double s = 1.0;
  jac = 1.0;
  for (int k = 0; k < n - 2; ++k) {
    w(k) = s * std::cos(angles(k));
    jac *= std::pow(std::sin(angles(k)), n - 2 - k);
    s *= std::sin(angles(k));
  }
  w(n - 2) = s * std::cos(angles(n - 2));
  w(n - 1) = s * std::sin(angles(n - 2));
  return w;
}

namespace detail {

// Star-shaped integration: x = c + T (rho(w) sin(theta) w), theta in [0, pi/2].
inline IntegralEstimate integrate_star(const Integrand& F, const Vector& c, const Matrix& T,
                                       const std::function<double(const Vector&)>& rho, const AdaptiveOptions& opt) {
  const int n = static_cast<int>(c.size());
  const double detT = std::abs(determinant(T));
  if (n == 1) {
    auto G = [&](const Vector& t, int tag) {
      const Vector w = Vector::Constant(1, tag == 0 ? 1.0 : -1.0);
      const double r = rho(w);
      const double th = t(0);
      return detT * r * std::cos(th) * F(c + T * (r * std::sin(th) * w));
    };
    std::vector<Cell> cells;
    for (int tag = 0; tag < 2; ++tag)
      for (Cell& cell : grid_cells(Vector::Zero(1), Vector::Constant(1, 0.5 * M_PI), 4, tag)) cells.push_back(cell);
    IntegralEstimate e = adaptive_cells(G, std::move(cells), opt);
    e.method = "adaptive-polar";
    return e;
  }
  // axis 0 is theta (fastest), then the n-1 angles
  Vector lo = Vector::Zero(n), hi(n);
  hi(0) = 0.5 * M_PI;
  for (int k = 1; k < n - 1; ++k) hi(k) = M_PI;
  hi(n - 1) = 2.0 * M_PI;
  Vector last_angles = Vector::Constant(n - 1, std::nan(""));
  Vector last_w;
  double last_rho = 0.0, last_jac = 0.0;
  auto G = [&](const Vector& t, int) {
    const Vector angles = t.tail(n - 1);
    if (!(angles.array() == last_angles.array()).all()) {
      last_angles = angles;
      last_w = sphere_direction(angles, last_jac);
      last_rho = rho(last_w);
    }
    if (last_jac == 0.0) return 0.0;
    const double th = t(0);
    const double s = std::sin(th);
    const double jac = detT * last_jac * std::pow(last_rho, n) * std::pow(s, n - 1) * std::cos(th);
    if (jac == 0.0) return 0.0;
    return jac * F(c + T * (last_rho * s * last_w));
  };
  IntegralEstimate e = adaptive_cells(G, grid_cells(lo, hi, initial_splits(n)), opt);
  e.method = "adaptive-polar";
  return e;
}

}  // namespace detail

/// Integral of F over a compact support region. Boxes are integrated directly
/// (optionally with endpoint transforms); balls, ellipsoids and sublevel sets in
/// polar form with radial variable r = sin(theta).
inline IntegralEstimate integrate_adaptive(const Integrand& F, const SupportRegion& region, const AdaptiveOptions& opt = {},
                                           bool endpoint_transform = false) {
  const int n = region.dimension();
  using K = SupportRegion::Kind;
  switch (region.kind()) {
    case K::full_space:
      fail(ErrorKind::capability, "integrate_adaptive needs a compact region");
    case K::box: {
      const auto& b = std::get<SupportRegion::Box>(region.data());
      if (!b.mapped) return endpoint_transform ? adaptive_box_de(F, b.lower, b.upper, opt) : adaptive_box(F, b.lower, b.upper, opt);
      const Matrix inv = b.map.inverse();
      const double jac = std::abs(determinant(inv));
      auto G = [&](const Vector& z) { return jac * F(inv * (z - b.shift)); };
      return endpoint_transform ? adaptive_box_de(G, b.lower, b.upper, opt) : adaptive_box(G, b.lower, b.upper, opt);
    }
    case K::ball: {
      const auto& b = std::get<SupportRegion::Ball>(region.data());
      const Matrix T = b.radius * Matrix::Identity(n, n);
      return detail::integrate_star(F, b.center, T, [](const Vector&) { return 1.0; }, opt);
    }
    case K::ellipsoid: {
      const auto& e = std::get<SupportRegion::Ellipsoid>(region.data());
      return detail::integrate_star(F, e.center, spd_inverse_sqrt(e.shape), [](const Vector&) { return 1.0; }, opt);
    }
    case K::sublevel: {
      const Vector c = region.star_center();
      return detail::integrate_star(F, c, Matrix::Identity(n, n),
                                    [&region](const Vector& w) { return region.radial_extent(w); }, opt);
    }
  }
  fail(ErrorKind::capability, "unsupported region");
}

/// Lower and upper radius of the exp-sinh map used on each half-axis.
inline constexpr double full_space_y_min = 1e-14;
inline constexpr double full_space_y_max = 1e3;

/// Integral of F over R^n in the chart x = center + L y. Each orthant of y is
/// mapped with y_i = +-exp((pi/2) sinh t_i), so coordinate hyperplanes of y are
/// never sampled and the tails decay double exponentially.
inline IntegralEstimate integrate_full_space(const Integrand& F, const Vector& center, const Matrix& L,
                                             const AdaptiveOptions& opt = {}) {
  const int n = static_cast<int>(center.size());
  if (n > 3) fail(ErrorKind::capability, "full-space adaptive cubature is limited to n <= 3; use monte-carlo");
  const double detL = std::abs(determinant(L));
  const double tlo = std::asinh(std::log(full_space_y_min) / (0.5 * M_PI));
  const double thi = std::asinh(std::log(full_space_y_max) / (0.5 * M_PI));
  auto G = [&](const Vector& t, int tag) {
    Vector y(n);
    double jac = detL;
    for (int d = 0; d < n; ++d) {
      const double sign = (tag >> d) & 1 ? -1.0 : 1.0;
      const double mag = std::exp(0.5 * M_PI * std::sinh(t(d)));
      y(d) = sign * mag;
      jac *= mag * 0.5 * M_PI * std::cosh(t(d));
    }
    const double v = F(center + L * y);
    return v == 0.0 ? 0.0 : jac * v;
  };
  std::vector<detail::Cell> cells;
  const int splits = n == 1 ? 6 : (n == 2 ? 3 : 2);
  for (int tag = 0; tag < (1 << n); ++tag)
    for (auto& c : detail::grid_cells(Vector::Constant(n, tlo), Vector::Constant(n, thi), splits, tag))
      cells.push_back(std::move(c));
  IntegralEstimate e = detail::adaptive_cells(G, std::move(cells), opt);
  e.method = "adaptive-exp-sinh";
  return e;
}

}  // namespace affiso
