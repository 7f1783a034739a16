#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "affiso/families.hpp"
#include "affiso/field.hpp"
#include "affiso/potential.hpp"

using affiso::Matrix;
using affiso::Vector;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

affiso::FamilyDescriptor desc(const std::string& kind, int n = 1) {
  affiso::FamilyDescriptor d;
  d.kind = kind;
  d.n = n;
  return d;
}

TEST(Gradient, HalfSquaredNorm) {
  auto f = affiso::make_field(2, [](const Vector& x) { return 0.5 * x.squaredNorm(); });
  const Vector g = affiso::gradient(f, vec({1, 2}));
  EXPECT_NEAR(g(0), 1.0, 1e-9);
  EXPECT_NEAR(g(1), 2.0, 1e-9);
}

TEST(Gradient, QuarticPowerRule) {
  auto f = affiso::make_field(1, [](const Vector& x) { return std::pow(x(0), 4); });
  EXPECT_NEAR(affiso::gradient(f, vec({1}))(0), 4.0, 1e-8);
}

TEST(Gradient, GaussianDensityMatchesAnalytic) {
  const auto g = affiso::Potential(affiso::make_family(desc("standard-gaussian")).potential()).f_field();
  const Vector x = vec({1.0});
  const double expected = -std::exp(-0.5) / std::sqrt(2.0 * M_PI);
  EXPECT_NEAR(g.gradient(x)(0), expected, 1e-15);
  EXPECT_NEAR(affiso::finite_difference_gradient(g, x)(0), expected, 1e-9);
  EXPECT_NEAR(expected, -0.24197, 1e-5);
}

TEST(Hessian, IdentityForHalfSquaredNorm) {
  auto f = affiso::make_field(3, [](const Vector& x) { return 0.5 * x.squaredNorm(); });
  const Matrix H = affiso::hessian(f, vec({0.3, -1.0, 2.0}));
  EXPECT_LT((H - Matrix::Identity(3, 3)).norm(), 1e-6);
}

TEST(Hessian, CircleProfileAtOrigin) {
  const affiso::SConcaveProfile prof = affiso::make_family(desc("cap-gs")).profile();
  EXPECT_NEAR(affiso::hessian(prof.profile(), vec({0.0}))(0, 0), -1.0, 1e-15);
  auto fd_only = prof.profile();
  fd_only.hessian = nullptr;
  EXPECT_NEAR(affiso::hessian(fd_only, vec({0.0}))(0, 0), -1.0, 1e-6);
}

TEST(Hessian, QuadraticForm) {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 2.0;
  A(1, 1) = 0.5;
  auto f = affiso::make_field(2, [A](const Vector& x) { return x.dot(A * x); });
  const Matrix H = affiso::hessian(f, vec({0.7, -0.2}));
  EXPECT_NEAR(H(0, 0), 4.0, 1e-6);
  EXPECT_NEAR(H(1, 1), 1.0, 1e-6);
  EXPECT_NEAR(H(0, 1), 0.0, 1e-6);
  EXPECT_EQ(H(0, 1), H(1, 0));
}

TEST(Hessian, OutputIsExactlySymmetric) {
  auto f = affiso::make_field(
      2, [](const Vector& x) { return x(0) * x(0) * x(1); }, {},
      [](const Vector&) {
        Matrix m(2, 2);
        m << 1.0, 2.0, 2.5, 3.0;
        return m;
      });
  const Matrix H = affiso::hessian(f, vec({0.1, 0.1}));
  EXPECT_EQ(H(0, 1), H(1, 0));
}

TEST(Oracle, OutsideSupportIsDomainError) {
  const affiso::SConcaveProfile prof = affiso::make_family(desc("cap-gs")).profile();
  try {
    affiso::gradient(prof.profile(), vec({1.5}));
    FAIL() << "expected domain error";
  } catch (const affiso::Error& e) {
    EXPECT_EQ(e.kind(), affiso::ErrorKind::domain);
  }
}

TEST(Oracle, FiniteDifferencesRefuseNearBoundary) {
  auto prof = affiso::SConcaveProfile(affiso::make_family(desc("cap-gs")).profile()).profile();
  prof.gradient = nullptr;
  EXPECT_THROW(affiso::gradient(prof, vec({1.0 - 1e-7})), affiso::Error);
  EXPECT_NO_THROW(affiso::gradient(prof, vec({0.5})));
}

TEST(Oracle, NonFiniteValueIsNumericError) {
  auto f = affiso::make_field(1, [](const Vector& x) { return x(0) > 0 ? std::log(x(0)) : std::nan(""); });
  try {
    affiso::gradient(f, vec({0.0}));
    FAIL();
  } catch (const affiso::Error& e) {
    EXPECT_EQ(e.kind(), affiso::ErrorKind::numeric);
  }
}

// Analytic oracles of every family agree with central differences.
TEST(Oracle, FamiliesMatchFiniteDifferences) {
  std::vector<affiso::FamilyDescriptor> ds;
  ds.push_back(desc("standard-gaussian", 2));
  auto gq = desc("gaussian-quadratic", 2);
  gq.A = Matrix(2, 2);
  *gq.A << 1.3, 0.4, 0.4, 0.9;
  gq.b = vec({0.2, -0.5});
  ds.push_back(gq);
  auto pp = desc("product-power", 2);
  pp.p = 3.0;
  ds.push_back(pp);
  auto pp4 = desc("product-power", 1);
  pp4.p = 4.0;
  ds.push_back(pp4);
  for (const auto& d : ds) {
    const affiso::Potential f = affiso::make_family(d).potential();
    const auto pts = affiso::default_probe_points(f, 100);
    const auto r = affiso::check_oracle_consistency(f.psi(), pts);
    EXPECT_EQ(r.points_checked, 100) << d.kind;
    EXPECT_LT(r.max_gradient_deviation, 1e-6) << d.kind;
    EXPECT_LT(r.max_hessian_deviation, 1e-4) << d.kind;
  }
  std::vector<affiso::FamilyDescriptor> ps;
  auto cap = desc("cap-gs", 2);
  cap.s = 2;
  ps.push_back(cap);
  auto qc = desc("quadratic-cap", 1);
  qc.b = vec({0.3});
  ps.push_back(qc);
  auto pc = desc("power-cap", 1);
  pc.p = 4.0;
  ps.push_back(pc);
  auto pc2 = desc("power-cap", 2);
  pc2.beta = 0.75;
  ps.push_back(pc2);
  for (const auto& d : ps) {
    const affiso::SConcaveProfile f = affiso::make_family(d).profile();
    std::vector<Vector> pts;
    for (const Vector& x : affiso::default_probe_points(f, 100))
      if (f.support().margin(x) > 0.05) pts.push_back(x);
    const auto r = affiso::check_oracle_consistency(f.profile(), pts);
    EXPECT_GT(r.points_checked, 30) << d.kind;
    EXPECT_LT(r.max_gradient_deviation, 1e-6) << d.kind;
    EXPECT_LT(r.max_hessian_deviation, 1e-4) << d.kind;
  }
}

TEST(Families, StandardGaussianIsNormalisedDensity) {
  const affiso::Potential f = affiso::make_family(desc("standard-gaussian", 2)).potential();
  EXPECT_NEAR(f.value(Vector::Zero(2)), 1.0 / (2.0 * M_PI), 1e-15);
  EXPECT_TRUE(f.frame().gaussian);
}

TEST(Families, GaussianQuadraticWithHalfIdentityIsStandard) {
  auto d = desc("gaussian-quadratic", 1);
  d.C = 1.0 / std::sqrt(2.0 * M_PI);
  const affiso::Potential f = affiso::make_family(d).potential();
  const affiso::Potential g = affiso::make_family(desc("standard-gaussian", 1)).potential();
  for (double x : {-2.0, 0.0, 0.7}) EXPECT_NEAR(f.value(vec({x})), g.value(vec({x})), 1e-16);
}

TEST(Families, ProductPowerTwoIsGaussianKernel) {
  auto d = desc("product-power");
  d.p = 2.0;
  const affiso::Potential f = affiso::make_family(d).potential();
  for (double x : {-1.5, 0.0, 0.3}) EXPECT_NEAR(f.value(vec({x})), std::exp(-x * x), 1e-16);
}

TEST(Families, CapProfileIsSquareRootOfOneMinusNormSquared) {
  auto d = desc("cap-gs", 2);
  d.s = 3;
  const affiso::SConcaveProfile f = affiso::make_family(d).profile();
  for (const Vector& x : affiso::default_probe_points(f, 50)) {
    EXPECT_EQ(f.g(x), std::sqrt(1.0 - x.squaredNorm()));
    EXPECT_NEAR(f.value(x), std::pow(1.0 - x.squaredNorm(), 1.5), 1e-15);
  }
}

TEST(Families, InvalidParametersAreConstructionErrors) {
  auto d = desc("product-power");
  d.p = 1.0;
  EXPECT_THROW(affiso::make_family(d), affiso::Error);
  auto g = desc("gaussian-quadratic", 2);
  g.A = Matrix::Identity(2, 2);
  (*g.A)(1, 1) = -1.0;
  EXPECT_THROW(affiso::make_family(g), affiso::Error);
  auto q = desc("quadratic-cap");
  q.a = -2.0;
  EXPECT_THROW(affiso::make_family(q), affiso::Error);
  EXPECT_THROW(affiso::make_family(desc("no-such-family")), affiso::Error);
}

TEST(Convexity, QuadraticPasses) {
  const affiso::Potential f = affiso::make_family(desc("standard-gaussian", 2)).potential();
  const auto r = affiso::convexity_probe(f);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.extreme_eigenvalue, 1.0, 1e-12);
}

TEST(Convexity, ConcaveFails) {
  auto psi = affiso::make_field(
      2, [](const Vector& x) { return -0.5 * x.squaredNorm(); }, {}, [](const Vector&) -> Matrix { return -Matrix::Identity(2, 2); });
  affiso::Potential f(psi, affiso::Frame::identity(2), "concave");
  const auto r = affiso::convexity_probe(f);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.extreme_eigenvalue, -1.0, 1e-12);
}

TEST(Convexity, QuarticMinimumAtSmallestSample) {
  auto d = desc("product-power");
  d.p = 4.0;
  const affiso::Potential f = affiso::make_family(d).potential();
  std::vector<Vector> pts;
  for (double x : {0.5, -0.25, 1.0, 2.0}) pts.push_back(vec({x}));
  const auto r = affiso::convexity_probe(f, pts);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.extreme_eigenvalue, 12.0 * 0.25 * 0.25, 1e-12);
}

TEST(Regularize, GaussianPotentialIsShifted) {
  const affiso::Potential g = affiso::make_family(desc("standard-gaussian", 2)).potential();
  const auto fe = affiso::regularize(g, 0.1);
  const Vector x = vec({0.4, -0.3});
  EXPECT_NEAR(fe.psi().value(x), 0.6 * x.squaredNorm() + std::log(2.0 * M_PI), 1e-14);
  EXPECT_TRUE(fe.support().contains(x));
  // f >= 0.1 fails far out, but the standard Gaussian of n = 2 never reaches 0.1
}

TEST(Regularize, EmptySupportWhenMaxBelowEps) {
  const affiso::Potential g = affiso::make_family(desc("standard-gaussian", 2)).potential();
  try {
    affiso::regularize(g, 0.5);
    FAIL();
  } catch (const affiso::Error& e) {
    EXPECT_EQ(e.kind(), affiso::ErrorKind::empty_support);
  }
}

TEST(Regularize, MonotoneInEpsAndBelowF) {
  auto d = desc("product-power", 2);
  d.p = 3.0;
  const affiso::Potential f = affiso::make_family(d).potential();
  const double eps[] = {0.3, 0.1, 0.01, 1e-4};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    const Vector x = vec({u(rng), u(rng)});
    double prev = 0.0;
    for (double e : eps) {
      const double v = affiso::regularize(f, e).value(x);
      EXPECT_LE(v, f.value(x));
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Regularize, ConvergesPointwise) {
  const affiso::Potential f = affiso::make_family(desc("standard-gaussian", 1)).potential();
  const Vector x = vec({0.8});
  const double fx = f.value(x);
  const double err2 = std::abs(affiso::regularize(f, 1e-2).value(x) - fx);
  const double err4 = std::abs(affiso::regularize(f, 1e-4).value(x) - fx);
  EXPECT_LT(err4, err2);
  EXPECT_LT(err4, 1e-4);
}

TEST(Transforms, ScaleComposeTranslate) {
  auto d = desc("gaussian-quadratic", 2);
  const affiso::Potential f = affiso::make_family(d).potential();
  Matrix A(2, 2);
  A << 2.0, 1.0, 0.0, 0.5;
  const Vector b = vec({0.3, -0.1});
  const Vector x = vec({0.2, 0.9});
  EXPECT_NEAR(f.scaled(3.0).value(x), 3.0 * f.value(x), 1e-15);
  EXPECT_NEAR(f.composed(A).value(x), f.value(A * x), 1e-15);
  EXPECT_NEAR(f.translated(b).value(x), f.value(x - b), 1e-15);
  const Vector g = affiso::gradient(f.composed(A).psi(), x);
  const Vector gfd = affiso::finite_difference_gradient(f.composed(A).psi(), x);
  EXPECT_LT((g - gfd).norm(), 1e-8);
}

TEST(Profiles, FromPotentialMatchesRoot) {
  const affiso::Potential g = affiso::make_family(desc("standard-gaussian", 1)).potential();
  const auto fe = affiso::regularize(g, 0.01);
  const auto prof = affiso::SConcaveProfile::from_potential(fe, 10);
  const Vector x = vec({0.5});
  EXPECT_NEAR(prof.value(x), fe.value(x), 1e-15);
  EXPECT_NEAR(prof.g(x), std::pow(fe.value(x), 0.1), 1e-15);
  auto fd = prof.profile();
  fd.hessian = nullptr;
  EXPECT_NEAR(affiso::hessian(prof.profile(), x)(0, 0), affiso::hessian(fd, x)(0, 0), 1e-6);
}

TEST(Profiles, ConcavityProbe) {
  auto d = desc("cap-gs", 2);
  EXPECT_TRUE(affiso::concavity_probe(affiso::make_family(d).profile()).pass);
  const affiso::Potential g = affiso::make_family(desc("standard-gaussian", 1)).potential();
  const auto fe = affiso::regularize(g, 0.01);
  // exp(-psi/s) is concave on {f >= eps} only for s large enough
  EXPECT_FALSE(affiso::concavity_probe(affiso::SConcaveProfile::from_potential(fe, 2)).pass);
  EXPECT_TRUE(affiso::concavity_probe(affiso::SConcaveProfile::from_potential(fe, 16)).pass);
}

TEST(Support, MembershipAndBoundingBoxes) {
  const auto ball = affiso::SupportRegion::ball(2, 2.0);
  EXPECT_TRUE(ball.contains(vec({1.0, 1.0})));
  EXPECT_FALSE(ball.contains(vec({2.0, 1.0})));
  Matrix M = Matrix::Identity(2, 2);
  M(0, 0) = 4.0;
  const auto ell = affiso::SupportRegion::ellipsoid(M);
  EXPECT_TRUE(ell.contains(vec({0.49, 0.0})));
  EXPECT_FALSE(ell.contains(vec({0.51, 0.0})));
  for (const auto& r : {ball, ell}) {
    const auto bb = r.bounding_box();
    ASSERT_TRUE(bb.has_value());
    for (const Vector& x : affiso::halton_points(bb->first - Vector::Ones(2), bb->second + Vector::Ones(2), 400))
      if (r.contains(x)) {
        EXPECT_TRUE((x.array() >= bb->first.array()).all() && (x.array() <= bb->second.array()).all());
      }
  }
  const auto sub = affiso::SupportRegion::sublevel(2, [](const Vector& x) { return x.squaredNorm(); }, 1.0, Vector::Zero(2));
  EXPECT_NEAR(sub.radial_extent(vec({0.6, 0.8})), 1.0, 1e-12);
  EXPECT_FALSE(affiso::SupportRegion::full_space(3).bounding_box().has_value());
}

}  // namespace
