#include <gtest/gtest.h>

#include <cmath>

#include "curvglue/collar.hpp"
#include "curvglue/curvature.hpp"
#include "curvglue/scenarios.hpp"
#include "support.hpp"

using namespace curvglue;
using namespace curvglue::testing;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

// dt^2 + a(t)^2 dx^2 with polynomial a, analytic jets.
MetricField warped2(double c0, double c1, double c2, std::pair<double, double> tbox = {-0.6, 0.6}) {
  auto a = [=](double t) { return c0 + c1 * t + c2 * t * t; };
  auto da = [=](double t) { return c1 + 2 * c2 * t; };
  auto coeff = [a](const Vec& x) {
    Mat g = Mat::Identity(2, 2);
    g(0, 0) = a(x(1)) * a(x(1));
    return g;
  };
  auto jet = [a, da, c2](const Vec& x) {
    MetricJet J(2);
    const double t = x(1), av = a(t), d = da(t);
    J.g = Mat::Identity(2, 2);
    J.g(0, 0) = av * av;
    J.dg[1](0, 0) = 2 * av * d;
    J.dd(1, 1)(0, 0) = 2 * d * d + 4 * av * c2;
    return J;
  };
  return MetricField::analytic(ChartDomain(2, {{-1, 1}, tbox}), coeff, jet, true);
}

// Product collar: coefficients independent of x^n.
MetricField product3() {
  auto coeff = [](const Vec& x) {
    Mat g = Mat::Identity(3, 3);
    g(0, 0) = 1.0 + 0.2 * x(0) * x(0);
    g(0, 1) = g(1, 0) = 0.1 * x(1);
    g(1, 1) = 1.5;
    return g;
  };
  return MetricField::finite_difference(ChartDomain(3, {{-1, 1}, {-1, 1}, {-0.6, 0.6}}), coeff, FdConfig{}, true);
}

}  // namespace

TEST(SecondFF, DoubledDisk) {
  const Scenario s = builtin("doubled-disk-2d");
  const Vec u = v1(0.3);
  EXPECT_NEAR(second_ff(Side::M0, *s.collar, u)(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(second_ff(Side::M1, *s.collar, u)(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(combined_L(*s.collar, u)(0, 0), 2.0, 1e-12);
}

TEST(SecondFF, EquatorIsTotallyGeodesic) {
  for (const char* name : {"doubled-hemisphere-2d", "doubled-hemisphere-3d"}) {
    const Scenario s = builtin(name);
    for (const Vec& u : s.collar->boundary_samples) {
      EXPECT_LE(second_ff(Side::M0, *s.collar, u).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LE(second_ff(Side::M1, *s.collar, u).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Collar, ValidationRejectsBadInput) {
  EXPECT_THROW(make_collar(warped2(1, -1, 0), warped2(1.01, 1, 0), 0.5), DomainError);
  auto coeff = [](const Vec& x) {
    Mat g = Mat::Identity(2, 2);
    g(0, 1) = g(1, 0) = 0.1 * (1 + x(1));
    return g;
  };
  const MetricField tilted = MetricField::finite_difference(ChartDomain(2, {{-1, 1}, {-0.6, 0.6}}), coeff);
  EXPECT_THROW(make_collar(tilted, tilted, 0.5), DomainError);
  const CollarData ok = make_collar(warped2(1, -1, 0), warped2(1, 1, 0), 0.5);
  const CollarValidation v = validate_collar(ok);
  EXPECT_LE(v.isometry_defect, 1e-10);
  EXPECT_LE(v.fermi_defect, 1e-12);
}

TEST(Collar, NormalLinesAreGeodesics) {
  for (const auto& name : builtin_names()) {
    const Scenario s = builtin(name);
    const int n = s.n, k = n - 1;
    for (const Vec& u : s.collar->boundary_samples)
      for (double t : {0.0, 0.2, 0.4}) {
        const Christoffel G = christoffels(s.collar->g0, s.collar->point(u, t));
        for (int a = 0; a < n; ++a) EXPECT_LE(std::abs(G(a, k, k)), 1e-10) << name;
      }
  }
}

TEST(ExtendL, ConstantOnProductCollar) {
  const CollarData c = make_collar(product3(), product3(), 0.5, 3);
  Mat L0 = Mat::Zero(2, 2);
  L0 << 2.0, 0.3, 0.3, -0.5;
  const auto L = extend_L(c, [L0](const Vec&) { return L0; });
  Vec u(2);
  u << 0.2, -0.4;
  for (double t : {0.0, 0.1, 0.37, 0.5}) {
    const Mat v = L->value(c.point(u, t));
    EXPECT_LE((v.topLeftCorner(2, 2) - L0).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(v.row(2).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(v.col(2).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(ExtendL, DiskEigenvalueAndTraceConstantAlongNormals) {
  const Scenario s = builtin("doubled-disk-2d");
  const auto L = extend_L(*s.collar);
  for (double t : {0.0, 0.05, 0.13, 0.3, 0.5}) {
    const Mat E = L->endomorphism(s.collar->point(v1(0.1), t));
    EXPECT_NEAR(E(0, 0), 2.0, 1e-8);
  }
  const Scenario b = builtin("doubled-ball-3d");
  const auto Lb = extend_L(*b.collar);
  Vec u(2);
  u << 1.4, 0.2;
  const double tr0 = Lb->endomorphism(b.collar->point(u, 0.0)).trace();
  for (double t : {0.1, 0.25, 0.45}) EXPECT_NEAR(Lb->endomorphism(b.collar->point(u, t)).trace(), tr0, 1e-8);
}

TEST(ExtendL, PositiveSemidefinitePreserved) {
  std::mt19937_64 rng(21);
  const Scenario b = builtin("doubled-ball-3d");
  for (int trial = 0; trial < 5; ++trial) {
    const Mat P = random_psd(2, 1, rng);
    const auto L = extend_L(*b.collar, [P](const Vec&) { return P; });
    for (const Vec& u : b.collar->boundary_samples)
      for (double t : {0.1, 0.3, 0.5}) {
        Eigen::SelfAdjointEigenSolver<Mat> es(L->value(b.collar->point(u, t)));
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
      }
  }
}

TEST(ExtendL, DomainLimits) {
  const Scenario s = builtin("doubled-disk-2d");
  const auto L = extend_L(*s.collar);
  EXPECT_THROW(L->value(v2(0.0, -0.1)), DomainError);
  EXPECT_THROW(L->value(v2(0.0, 0.61)), DomainError);
  EXPECT_NO_THROW(L->value(v2(0.0, 0.6)));
  EXPECT_NO_THROW(L->value(v2(0.0, -1e-15)));
}

TEST(ExtendL, NormalDerivativesMatchDifferences) {
  const Scenario s = builtin("cap-on-disk-2d");
  const auto L = extend_L(*s.collar);
  const Vec x = v2(0.2, 0.21);
  const double h = 1e-4;
  const ShapeNormalJet J = L->normal_jet(x);
  const Mat p = L->value(v2(0.2, 0.21 + h)), m = L->value(v2(0.2, 0.21 - h));
  EXPECT_LE((J.dn - (p - m) / (2 * h)).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LE((J.dnn - (p - 2 * J.L + m) / (h * h)).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(G1Prime, PolynomialContinuationIsExact) {
  const Scenario s = builtin("doubled-disk-2d");
  const MetricField g1p = extend_g1_prime(*s.collar);
  for (double t : {0.0, 0.1, 0.25, 0.5}) {
    EXPECT_NEAR(g1p.value(v2(0.3, t))(0, 0), (1 + t) * (1 + t), 1e-10);
    EXPECT_EQ(g1p.value(v2(0.3, t))(1, 1), 1.0);
    EXPECT_EQ(g1p.value(v2(0.3, t))(0, 1), 0.0);
  }
  EXPECT_NEAR(g1p.normal_jet(v2(0.3, 0.0)).dnn(0, 0), 2.0, 1e-8);
  EXPECT_NEAR(g1p.normal_jet(v2(0.3, 0.2)).dnn(0, 0), 2.0, 1e-8);
}

TEST(G1Prime, ConstantWhenIndependentOfNormal) {
  const CollarData c = make_collar(product3(), product3(), 0.5, 3);
  const MetricField g1p = extend_g1_prime(c);
  Vec x(3), y(3);
  x << 0.3, -0.2, 0.0;
  y << 0.3, -0.2, 0.4;
  EXPECT_LE((g1p.value(x) - g1p.value(y)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(G1Prime, TaylorMatchesSmoothContinuation) {
  // cos(t)^2 is smooth across the equator; the order-4 continuation agrees to O(t^5).
  const Scenario s = builtin("doubled-hemisphere-2d");
  const MetricField g1p = extend_g1_prime(*s.collar);
  const TaylorCoefficients T = g1_taylor(*s.collar, v1(0.0));
  EXPECT_NEAR(T.a[0](0, 0), 1.0, 1e-12);
  EXPECT_NEAR(T.a[1](0, 0), 0.0, 1e-10);
  EXPECT_NEAR(T.a[2](0, 0), -1.0, 1e-7);
  for (double t : {0.05, 0.1, 0.2}) {
    const double err = std::abs(g1p.value(v2(0.0, t))(0, 0) - std::pow(std::cos(t), 2));
    EXPECT_LE(err, 0.05 * std::pow(t, 3)) << t;
  }
}

TEST(FermiFromGeneral, AlreadyFermiIsIdentity) {
  const MetricField g = warped2(1, -1, 0.0, {-0.6, 0.9});
  const BoundaryEmbedding b{[](const Vec& u) { return Vec(v2(u(0), 0.0)); }, +1};
  const FermiChart F = fermi_from_general(g, b, {{-0.8, 0.8}}, 0.5);
  EXPECT_FALSE(F.shrunk);
  EXPECT_LE(F.raw_fermi_defect, 1e-8);
  for (double t : {0.0, 0.2, 0.45}) {
    const Vec x = v2(0.1, t);
    EXPECT_LE((F.metric.value(x) - g.value(x)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((F.to_original(x) - x).norm(), 1e-10);
  }
}

TEST(FermiFromGeneral, TiltedLineInThePlane) {
  const double a = 0.4;
  const Vec dir = v2(std::cos(a), std::sin(a)), nrm = v2(-std::sin(a), std::cos(a));
  const MetricField g = flat(2);
  const BoundaryEmbedding b{[dir](const Vec& u) { return Vec(u(0) * dir); }, +1};
  const FermiChart F = fermi_from_general(g, b, {{-0.5, 0.5}}, 0.4);
  EXPECT_LE(F.raw_fermi_defect, 1e-8);
  for (double u : {-0.3, 0.1})
    for (double t : {0.0, 0.15, 0.35}) {
      const Vec x = v2(u, t);
      EXPECT_LE((F.metric.value(x) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_LE((F.to_original(x) - (u * dir + t * nrm)).norm(), 1e-8);
    }
}

TEST(FermiFromGeneral, UnitDiskFromCartesian) {
  const MetricField g = MetricField::finite_difference(ChartDomain(2, {{-2, 2}, {-2, 2}}),
                                                       [](const Vec&) { return Mat(Mat::Identity(2, 2)); });
  const BoundaryEmbedding b{[](const Vec& u) { return Vec(v2(std::cos(u(0)), std::sin(u(0)))); }, +1};
  const FermiChart F = fermi_from_general(g, b, {{-1.0, 1.0}}, 0.5);
  EXPECT_FALSE(F.shrunk);
  EXPECT_LE(F.raw_fermi_defect, 1e-8);
  for (double t : {0.0, 0.1, 0.3, 0.45}) {
    const Mat G = F.metric.value(v2(0.2, t));
    EXPECT_NEAR(G(0, 0), (1 - t) * (1 - t), 1e-6);
    EXPECT_NEAR(G(1, 1), 1.0, 1e-12);
    EXPECT_NEAR(F.to_original(v2(0.2, t)).norm(), 1 - t, 1e-8);
  }
  // Normal geodesics focus at the center; the monitor shrinks the width.
  const FermiChart deep = fermi_from_general(g, b, {{-1.0, 1.0}}, 1.5);
  EXPECT_TRUE(deep.shrunk);
  EXPECT_LT(deep.width, 1.0);
}
