#include <gtest/gtest.h>

#include <cmath>

#include "affiso/quadrature/adaptive.hpp"
#include "affiso/quadrature/gauss_hermite.hpp"
#include "affiso/quadrature/monte_carlo.hpp"
#include "affiso/special.hpp"
#include "affiso/support.hpp"

using affiso::Vector;

namespace {

double double_factorial(int k) {
  double r = 1.0;
  for (int i = k; i > 1; i -= 2) r *= i;
  return r;
}

TEST(GaussHermiteRule, OrderOne) {
  const auto& r = affiso::gauss_hermite_rule(1);
  ASSERT_EQ(r.nodes.size(), 1u);
  EXPECT_NEAR(r.nodes[0], 0.0, 1e-15);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
}

TEST(GaussHermiteRule, OrderTwo) {
  const auto& r = affiso::gauss_hermite_rule(2);
  EXPECT_NEAR(r.nodes[0], -1.0, 1e-15);
  EXPECT_NEAR(r.nodes[1], 1.0, 1e-15);
  EXPECT_NEAR(r.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(r.weights[1], 0.5, 1e-15);
}

TEST(GaussHermiteRule, ThreePointFourthMoment) {
  const auto e = affiso::integrate_gaussian([](const Vector& x) { return std::pow(x(0), 4); }, 1, 3);
  EXPECT_NEAR(e.value, 3.0, 1e-13);
}

TEST(GaussHermiteRule, WeightsSumToOne) {
  for (int order : {1, 5, 17, 60, 120, 200}) {
    double s = 0.0;
    for (double w : affiso::gauss_hermite_rule(order).weights) s += w;
    EXPECT_NEAR(s, 1.0, 1e-13) << order;
  }
}

TEST(GaussHermiteRule, TooLargeIsCapabilityError) {
  try {
    affiso::gauss_hermite_rule(201);
    FAIL();
  } catch (const affiso::Error& e) {
    EXPECT_EQ(e.kind(), affiso::ErrorKind::capability);
  }
}

// Exact on monomials of degree <= 2 order - 1.
TEST(GaussHermiteRule, MomentExactness) {
  for (int order = 1; order <= 20; ++order) {
    const auto& r = affiso::gauss_hermite_rule(order);
    for (int k = 0; k <= 2 * order - 1; ++k) {
      double q = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        q += r.weights[i] * std::pow(r.nodes[i], k);
        scale += r.weights[i] * std::pow(std::abs(r.nodes[i]), k);
      }
      const double exact = k % 2 ? 0.0 : double_factorial(k - 1);
      EXPECT_NEAR(q, exact, 1e-12 * std::max(1.0, scale)) << "order " << order << " k " << k;
    }
  }
}

TEST(IntegrateGaussian, ConstantIsOne) {
  for (int n = 1; n <= 3; ++n) {
    const auto e = affiso::integrate_gaussian([](const Vector&) { return 1.0; }, n, 12);
    EXPECT_NEAR(e.value, 1.0, 1e-13);
  }
}

TEST(IntegrateGaussian, SquaredNormIsDimension) {
  const auto e = affiso::integrate_gaussian([](const Vector& x) { return x.squaredNorm(); }, 2, 7);
  EXPECT_NEAR(e.value, 2.0, 1e-13);
  EXPECT_NEAR(e.error, 0.0, 1e-13);
}

TEST(IntegrateGaussian, SixthMoment) {
  const auto e = affiso::integrate_gaussian([](const Vector& x) { return std::pow(x(0), 6); }, 1, 4);
  EXPECT_NEAR(e.value, 15.0, 1e-12);
  EXPECT_FALSE(e.error_available);
}

TEST(IntegrateGaussian, BudgetExceeded) {
  EXPECT_THROW(affiso::integrate_gaussian([](const Vector&) { return 1.0; }, 6, 40), affiso::Error);
}

TEST(IntegrateGaussian, JobsDoNotChangeValue) {
  auto F = [](const Vector& x) { return std::cos(x(0)) * std::exp(0.3 * x(1)); };
  const auto a = affiso::integrate_gaussian(F, 2, 30, 1);
  const auto b = affiso::integrate_gaussian(F, 2, 30, 3);
  EXPECT_EQ(a.value, b.value);
  EXPECT_NEAR(a.value, std::exp(-0.5) * std::exp(0.045), 1e-13);
}

TEST(GaussLegendre, ExactOnPolynomials) {
  for (int m : {5, 7}) {
    const auto& r = affiso::gauss_legendre_rule(m);
    for (int k = 0; k <= 2 * m - 1; ++k) {
      double q = 0.0;
      for (int i = 0; i < m; ++i) q += r.weights[i] * std::pow(r.nodes[i], k);
      EXPECT_NEAR(q, k % 2 ? 0.0 : 2.0 / (k + 1), 1e-15) << m << " " << k;
    }
  }
}

TEST(Adaptive, HalfDiscArea) {
  const auto ball = affiso::SupportRegion::ball(1, 1.0);
  const auto e = affiso::integrate_adaptive([](const Vector& x) { return std::sqrt(std::max(0.0, 1.0 - x.squaredNorm())); }, ball);
  EXPECT_NEAR(e.value, M_PI / 2.0, 1e-10);
}

TEST(Adaptive, BetaIntegralWithSingularEndpoint) {
  // int_0^1 r (1 - r^2)^(-1/2) dr = 1
  const auto box = affiso::SupportRegion::box(Vector::Zero(1), Vector::Ones(1));
  const auto e = affiso::integrate_adaptive([](const Vector& r) { return r(0) / std::sqrt(1.0 - r(0) * r(0)); }, box, {}, true);
  EXPECT_NEAR(e.value, 0.5 * affiso::beta(1.0, 0.5), std::max(e.error, 1e-9));
  EXPECT_NEAR(e.value, 1.0, 1e-7);
}

TEST(Adaptive, ArcsineIntegral) {
  const auto box = affiso::SupportRegion::box(-Vector::Ones(1), Vector::Ones(1));
  const auto e = affiso::integrate_adaptive([](const Vector& x) { return 1.0 / std::sqrt(1.0 - x(0) * x(0)); }, box, {}, true);
  EXPECT_NEAR(e.value, M_PI, std::max(e.error, 1e-9));
  EXPECT_NEAR(e.value, M_PI, 1e-7);
  // in polar form on the ball the same integrand is smooth
  const auto ball = affiso::SupportRegion::ball(1, 1.0);
  const auto p = affiso::integrate_adaptive([](const Vector& x) { return 1.0 / std::sqrt(1.0 - x(0) * x(0)); }, ball);
  EXPECT_NEAR(p.value, M_PI, 1e-10);
}

TEST(Adaptive, NonConvergenceCarriesEstimate) {
  affiso::AdaptiveOptions opt;
  opt.max_subdivisions = 3;
  opt.rel_tol = 1e-14;
  try {
    affiso::adaptive_box([](const Vector& x) { return std::sqrt(std::abs(x(0) - 0.3)); }, Vector::Zero(1), Vector::Ones(1), opt);
    FAIL();
  } catch (const affiso::NonConvergenceError& e) {
    EXPECT_EQ(e.kind(), affiso::ErrorKind::non_convergence);
    EXPECT_NEAR(e.value(), (2.0 / 3.0) * (std::pow(0.3, 1.5) + std::pow(0.7, 1.5)), 1e-2);
    EXPECT_GT(e.error(), 0.0);
  }
}

struct Golden {
  const char* name;
  affiso::SupportRegion region;
  affiso::Integrand f;
  double exact;
  bool transform = false;
};

// Ten integrals with known values; each estimate is within its reported error.
TEST(Adaptive, GoldenSetWithinReportedError) {
  Eigen::Matrix2d M;
  M << 0.25, 0.0, 0.0, 1.0;
  std::vector<Golden> set = {
      {"disc area", affiso::SupportRegion::ball(2, 1.0), [](const Vector&) { return 1.0; }, M_PI},
      {"ball volume", affiso::SupportRegion::ball(3, 1.0), [](const Vector&) { return 1.0; }, 4.0 * M_PI / 3.0},
      {"ellipse area", affiso::SupportRegion::ellipsoid(M), [](const Vector&) { return 1.0; }, 2.0 * M_PI},
      {"disc second moment", affiso::SupportRegion::ball(2, 1.0), [](const Vector& x) { return x.squaredNorm(); }, M_PI / 2.0},
      {"hemisphere volume", affiso::SupportRegion::ball(2, 1.0),
       [](const Vector& x) { return std::sqrt(std::max(0.0, 1.0 - x.squaredNorm())); }, 2.0 * M_PI / 3.0},
      {"exp on square", affiso::SupportRegion::box(Vector::Zero(2), Vector::Ones(2)),
       [](const Vector& x) { return std::exp(x(0) + x(1)); }, (M_E - 1.0) * (M_E - 1.0)},
      {"cos on pi box", affiso::SupportRegion::box(Vector::Zero(1), Vector::Constant(1, M_PI / 2)),
       [](const Vector& x) { return std::cos(x(0)); }, 1.0},
      {"log singularity", affiso::SupportRegion::box(Vector::Zero(1), Vector::Ones(1)),
       [](const Vector& x) { return std::log(x(0)); }, -1.0, true},
      {"inverse sqrt", affiso::SupportRegion::box(Vector::Zero(1), Vector::Ones(1)),
       [](const Vector& x) { return 1.0 / std::sqrt(x(0)); }, 2.0, true},
      {"cube polynomial", affiso::SupportRegion::box(-Vector::Ones(3), Vector::Ones(3)),
       [](const Vector& x) { return x(0) * x(0) * x(1) * x(1) + x(2); }, 8.0 / 9.0},
  };
  for (const auto& g : set) {
    const auto e = affiso::integrate_adaptive(g.f, g.region, {}, g.transform);
    EXPECT_LE(std::abs(e.value - g.exact), std::max(e.error, 1e-14 * std::abs(g.exact)))
        << g.name << " value " << e.value << " error " << e.error;
    EXPECT_NEAR(e.value, g.exact, 1e-7 * std::max(1.0, std::abs(g.exact))) << g.name;
  }
}

TEST(FullSpace, GaussianMassInFrame) {
  Eigen::Matrix2d L;
  L << 1.0, 0.3, 0.0, 0.7;
  const Vector c = (Vector(2) << 0.5, -1.0).finished();
  auto F = [&](const Vector& x) {
    const Vector y = L.inverse() * (x - c);
    return std::exp(-0.5 * y.squaredNorm());
  };
  const auto e = affiso::integrate_full_space(F, c, L);
  EXPECT_NEAR(e.value, 2.0 * M_PI * 0.7, 1e-8 * 2.0 * M_PI);
}

TEST(FullSpace, NonSmoothProductPower) {
  // int exp(-|x|^1.5) dx = (2/1.5) Gamma(1/1.5)
  const auto e = affiso::integrate_full_space([](const Vector& x) { return std::exp(-std::pow(std::abs(x(0)), 1.5)); },
                                              Vector::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  EXPECT_NEAR(e.value, 2.0 / 1.5 * affiso::gamma(1.0 / 1.5), 1e-9);
}

TEST(MonteCarlo, ConstantHasZeroError) {
  const auto e = affiso::integrate_monte_carlo([](const Vector&) { return 3.0; }, affiso::Sampler::gaussian(2), 1000, 0);
  EXPECT_EQ(e.value, 3.0);
  EXPECT_EQ(e.error, 0.0);
}

TEST(MonteCarlo, GaussianSecondMoment) {
  const auto e = affiso::integrate_monte_carlo([](const Vector& x) { return x(0) * x(0); }, affiso::Sampler::gaussian(1), 1000000, 0);
  EXPECT_LE(std::abs(e.value - 1.0), 3.0 * e.error);
  EXPECT_LT(e.error, 2e-3);
}

TEST(MonteCarlo, QuarterDiscRatio) {
  const auto e = affiso::integrate_monte_carlo([](const Vector& x) { return x.squaredNorm() <= 1.0 ? 1.0 : 0.0; },
                                               affiso::Sampler::uniform(-Vector::Ones(2), Vector::Ones(2)), 200000, 3);
  EXPECT_LE(std::abs(e.value - M_PI / 4.0), 3.0 * e.error);
}

TEST(MonteCarlo, CoverageOverFiftySeeds) {
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto e = affiso::integrate_monte_carlo([](const Vector& x) { return std::exp(x(0)); }, affiso::Sampler::gaussian(1), 20000, seed);
    if (std::abs(e.value - std::exp(0.5)) <= 3.0 * e.error) ++covered;
  }
  EXPECT_GE(covered, 47);
}

TEST(MonteCarlo, ReproducibleAndJobIndependent) {
  auto F = [](const Vector& x) { return std::sin(x(0)) + x(1) * x(1); };
  const auto a = affiso::integrate_monte_carlo(F, affiso::Sampler::gaussian(2), 50000, 11, 1);
  const auto b = affiso::integrate_monte_carlo(F, affiso::Sampler::gaussian(2), 50000, 11, 1);
  const auto c = affiso::integrate_monte_carlo(F, affiso::Sampler::gaussian(2), 50000, 11, 4);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.value, c.value);
  EXPECT_EQ(a.error, c.error);
  const auto d = affiso::integrate_monte_carlo(F, affiso::Sampler::gaussian(2), 50000, 12, 1);
  EXPECT_NE(a.value, d.value);
}

TEST(MonteCarlo, NonFiniteSampleNamesPoint) {
  try {
    affiso::integrate_monte_carlo([](const Vector& x) { return x(0) > 0 ? std::nan("") : 0.0; }, affiso::Sampler::gaussian(1), 100, 0);
    FAIL();
  } catch (const affiso::Error& e) {
    EXPECT_EQ(e.kind(), affiso::ErrorKind::numeric);
    EXPECT_NE(std::string(e.what()).find("("), std::string::npos);
  }
}

}  // namespace
