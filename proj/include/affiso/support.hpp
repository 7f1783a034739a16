#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "affiso/error.hpp"
#include "affiso/linalg.hpp"

namespace affiso {

/// Support of a field: full space, a ball, a (possibly linearly mapped) box,
/// an ellipsoid, or a convex sublevel set {x : fn(x) <= level}.
class SupportRegion {
 public:
  enum class Kind { full_space, ball, box, ellipsoid, sublevel };

  struct FullSpace {};
  struct Ball {
    Vector center;
    double radius;
  };
  // {x : map * x + shift in [lower, upper]}
  struct Box {
    Vector lower, upper;
    Matrix map;
    Vector shift;
    bool mapped = false;
  };
  // {x : (x - c)^T M (x - c) <= 1}
  struct Ellipsoid {
    Matrix shape;
    Vector center;
  };
  struct Sublevel {
    std::function<double(const Vector&)> fn;
    double level;
    Vector center;  // strictly interior point; the set is star-shaped about it
  };

  static SupportRegion full_space(int n) { return SupportRegion(n, FullSpace{}); }

  static SupportRegion ball(int n, double radius, std::optional<Vector> center = std::nullopt) {
    if (!(radius > 0.0)) fail(ErrorKind::construction, "ball radius must be positive");
    Vector c = center.value_or(Vector::Zero(n));
    check_dim(n, c);
    return SupportRegion(n, Ball{std::move(c), radius});
  }

  static SupportRegion box(Vector lower, Vector upper) {
    if (lower.size() != upper.size() || lower.size() == 0) fail(ErrorKind::construction, "box bounds mismatch");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
      if (!(lower(i) < upper(i))) fail(ErrorKind::construction, "box requires lower < upper on every axis");
    const int n = static_cast<int>(lower.size());
    return SupportRegion(n, Box{std::move(lower), std::move(upper), Matrix::Identity(n, n), Vector::Zero(n), false});
  }

  static SupportRegion ellipsoid(Matrix shape, std::optional<Vector> center = std::nullopt) {
    const int n = static_cast<int>(shape.rows());
    if (!is_spd(shape)) fail(ErrorKind::construction, "ellipsoid matrix must be symmetric positive definite");
    Vector c = center.value_or(Vector::Zero(n));
    check_dim(n, c);
    return SupportRegion(n, Ellipsoid{std::move(shape), std::move(c)});
  }

  static SupportRegion sublevel(int n, std::function<double(const Vector&)> fn, double level, Vector center) {
    check_dim(n, center);
    if (!(fn(center) < level)) fail(ErrorKind::empty_support, "sublevel set has no interior around the given center");
    return SupportRegion(n, Sublevel{std::move(fn), level, std::move(center)});
  }

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  int dimension() const { return n_; }
  bool compact() const { return kind() != Kind::full_space; }

  /// Star-shaped parametrisation is available for balls, ellipsoids and sublevel sets.
  bool star_shaped() const {
    return kind() == Kind::ball || kind() == Kind::ellipsoid || kind() == Kind::sublevel;
  }

  const auto& data() const { return data_; }

  bool contains(const Vector& x) const { return margin(x) >= 0.0; }
  bool contains_interior(const Vector& x) const { return margin(x) > 0.0; }

  /// Positive inside, zero on the boundary, negative outside. Not a distance
  /// in general, only a consistent sign.
  double margin(const Vector& x) const {
    check_dim(n_, x);
    return std::visit(
        [&](const auto& r) -> double {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, FullSpace>) {
            return std::numeric_limits<double>::infinity();
          } else if constexpr (std::is_same_v<T, Ball>) {
            return r.radius - (x - r.center).norm();
          } else if constexpr (std::is_same_v<T, Box>) {
            const Vector y = r.mapped ? Vector(r.map * x + r.shift) : x;
            double m = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < y.size(); ++i) m = std::min({m, y(i) - r.lower(i), r.upper(i) - y(i)});
            return m;
          } else if constexpr (std::is_same_v<T, Ellipsoid>) {
            const Vector d = x - r.center;
            return 1.0 - d.dot(r.shape * d);
          } else {
            return r.level - r.fn(x);
          }
        },
        data_);
  }

  Vector star_center() const {
    switch (kind()) {
      case Kind::ball: return std::get<Ball>(data_).center;
      case Kind::ellipsoid: return std::get<Ellipsoid>(data_).center;
      case Kind::sublevel: return std::get<Sublevel>(data_).center;
      default: fail(ErrorKind::capability, "region has no star parametrisation");
    }
  }

  /// Distance from star_center() to the boundary along the unit direction u.
  double radial_extent(const Vector& u) const {
    switch (kind()) {
      case Kind::ball: return std::get<Ball>(data_).radius;
      case Kind::ellipsoid: {
        const auto& e = std::get<Ellipsoid>(data_);
        return 1.0 / std::sqrt(u.dot(e.shape * u));
      }
      case Kind::sublevel: return sublevel_extent(std::get<Sublevel>(data_), u);
      default: fail(ErrorKind::capability, "region has no star parametrisation");
    }
  }

  /// Axis-aligned bounding box. For sublevel sets this is estimated from
  /// radial extents over a direction sample and inflated by 10%.
  std::optional<std::pair<Vector, Vector>> bounding_box() const {
    switch (kind()) {
      case Kind::full_space: return std::nullopt;
      case Kind::ball: {
        const auto& b = std::get<Ball>(data_);
        const Vector r = Vector::Constant(n_, b.radius);
        return std::make_pair(Vector(b.center - r), Vector(b.center + r));
      }
      case Kind::ellipsoid: {
        const auto& e = std::get<Ellipsoid>(data_);
        const Vector half = e.shape.inverse().diagonal().cwiseSqrt();
        return std::make_pair(Vector(e.center - half), Vector(e.center + half));
      }
      case Kind::box: {
        const auto& b = std::get<Box>(data_);
        if (!b.mapped) return std::make_pair(b.lower, b.upper);
        const Matrix inv = b.map.inverse();
        Vector lo = Vector::Constant(n_, std::numeric_limits<double>::infinity());
        Vector hi = -lo;
        for (unsigned mask = 0; mask < (1u << n_); ++mask) {
          Vector corner(n_);
          for (int i = 0; i < n_; ++i) corner(i) = (mask >> i) & 1u ? b.upper(i) : b.lower(i);
          const Vector x = inv * (corner - b.shift);
          lo = lo.cwiseMin(x);
          hi = hi.cwiseMax(x);
        }
        return std::make_pair(lo, hi);
      }
      case Kind::sublevel: {
        const auto& s = std::get<Sublevel>(data_);
        double r = 0.0;
        for (const Vector& u : sample_directions(n_, 64 * n_)) r = std::max(r, sublevel_extent(s, u));
        const Vector half = Vector::Constant(n_, 1.1 * r);
        return std::make_pair(Vector(s.center - half), Vector(s.center + half));
      }
    }
    return std::nullopt;
  }

  /// {x : map * x + shift in this region}; map must be invertible.
  SupportRegion preimage(const Matrix& map, const Vector& shift) const {
    if (map.rows() != n_ || map.cols() != n_ || shift.size() != n_)
      fail(ErrorKind::construction, "preimage map has wrong shape");
    if (std::abs(determinant(map)) == 0.0) fail(ErrorKind::construction, "preimage map must be invertible");
    const Matrix inv = map.inverse();
    switch (kind()) {
      case Kind::full_space: return *this;
      case Kind::ball: {
        const auto& b = std::get<Ball>(data_);
        Matrix shape = symmetrized(map.transpose() * map / (b.radius * b.radius));
        return SupportRegion(n_, Ellipsoid{std::move(shape), inv * (b.center - shift)});
      }
      case Kind::ellipsoid: {
        const auto& e = std::get<Ellipsoid>(data_);
        Matrix shape = symmetrized(map.transpose() * e.shape * map);
        return SupportRegion(n_, Ellipsoid{std::move(shape), inv * (e.center - shift)});
      }
      case Kind::box: {
        const auto& b = std::get<Box>(data_);
        Box out = b;
        out.map = b.map * map;
        out.shift = b.map * shift + b.shift;
        out.mapped = true;
        return SupportRegion(n_, std::move(out));
      }
      case Kind::sublevel: {
        const auto& s = std::get<Sublevel>(data_);
        auto fn = [inner = s.fn, map, shift](const Vector& x) -> double { return inner(map * x + shift); };
        return SupportRegion(n_, Sublevel{std::move(fn), s.level, inv * (s.center - shift)});
      }
    }
    return *this;
  }

  /// Intersection with a sublevel set; only full space and sublevel sets combine.
  SupportRegion intersect_sublevel(std::function<double(const Vector&)> fn, double level, const Vector& center) const {
    switch (kind()) {
      case Kind::full_space: return sublevel(n_, std::move(fn), level, center);
      case Kind::sublevel: {
        const auto& s = std::get<Sublevel>(data_);
        // max of the two normalised constraints; both sets are convex so the result is too
        auto both = [a = s.fn, la = s.level, b = std::move(fn), lb = level](const Vector& x) {
          return std::max(a(x) - la, b(x) - lb);
        };
        return sublevel(n_, std::move(both), 0.0, center);
      }
      default: {
        auto inside = *this;
        auto both = [inside, b = std::move(fn), lb = level](const Vector& x) {
          return std::max(-inside.margin(x), b(x) - lb);
        };
        return sublevel(n_, std::move(both), 0.0, center);
      }
    }
  }

  static std::vector<Vector> sample_directions(int n, int count) {
    std::vector<Vector> dirs;
    if (n == 1) {
      dirs.push_back(Vector::Constant(1, 1.0));
      dirs.push_back(Vector::Constant(1, -1.0));
      return dirs;
    }
    for (int i = 0; i < n; ++i) {
      dirs.push_back(unit_vector(n, i));
      dirs.push_back(-unit_vector(n, i));
    }
    // deterministic quasi-random directions from a Halton-style sequence
    static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    for (int k = 1; k <= count; ++k) {
      Vector v(n);
      for (int d = 0; d < n; ++d) {
        double f = 1.0, r = 0.0;
        int i = k;
        const int base = primes[d % 8];
        while (i > 0) {
          f /= base;
          r += f * (i % base);
          i /= base;
        }
        v(d) = 2.0 * r - 1.0;
      }
      if (v.norm() > 1e-3) dirs.push_back(v.normalized());
    }
    return dirs;
  }

 private:
  SupportRegion(int n, std::variant<FullSpace, Ball, Box, Ellipsoid, Sublevel> d) : n_(n), data_(std::move(d)) {}

  static void check_dim(int n, const Vector& x) {
    if (x.size() != n) fail(ErrorKind::domain, "point has dimension " + std::to_string(x.size()) + ", expected " + std::to_string(n));
  }

  static double sublevel_extent(const Sublevel& s, const Vector& u) {
    auto excess = [&](double t) { return s.fn(s.center + t * u) - s.level; };
    double lo = 0.0, hi = 1.0;
    int grow = 0;
    while (!(excess(hi) >= 0.0)) {
      lo = hi;
      hi *= 2.0;
      if (++grow > 80) fail(ErrorKind::capability, "sublevel set is not bounded along a probe direction");
    }
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (excess(mid) >= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    return lo;  // inside the set
  }

  int n_;
  std::variant<FullSpace, Ball, Box, Ellipsoid, Sublevel> data_;
};

}  // namespace affiso
