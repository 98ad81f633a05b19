#include <gtest/gtest.h>

#include <cmath>

#include "curvglue/lambda2.hpp"
#include "curvglue/profile.hpp"

using namespace curvglue;

namespace {

const double kDeltas[] = {0.4, 0.2, 0.1};

// Composite Simpson on each polynomial piece of [0, delta].
double simpson_integral(const BumpProfile& p, double a, double b, int per_piece = 2000) {
  std::vector<double> cuts{a};
  for (double x : p.breakpoints())
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  double s = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1], h = (hi - lo) / per_piece;
    double acc = p.f(lo) + p.f(hi);
    for (int k = 1; k < per_piece; ++k) acc += (k % 2 ? 4.0 : 2.0) * p.f(lo + k * h);
    s += acc * h / 3.0;
  }
  return s;
}

}  // namespace

TEST(Profile, EndpointValues) {
  for (double d : kDeltas) {
    const BumpProfile p = build_bump(d);
    EXPECT_EQ(p.f(0.0), 1.0);
    EXPECT_EQ(p.f(d), 0.0);
    EXPECT_EQ(p.f(2.0 * d), 0.0);
    EXPECT_LE(std::abs(p.F(d)), 1e-12);
    EXPECT_EQ(p.F(0.0), 0.0);
    EXPECT_EQ(p.FF(0.0), 0.0);
    EXPECT_NEAR(p.FF(3.0 * d), p.FF(d), 1e-15 * p.FF(d));
  }
}

TEST(Profile, LinearRampBeforeBlend) {
  for (double d : kDeltas) {
    const BumpProfile p = build_bump(d);
    const double d4 = std::pow(d, 4), end = (1.0 - p.blend_width()) * d4;
    for (int i = 0; i <= 100; ++i) {
      const double x = end * i / 100.0;
      EXPECT_NEAR(p.f(x), 1.0 - x / d4, 1e-12);
    }
  }
}

TEST(Profile, WellBoundsAndSlope) {
  for (double d : kDeltas) {
    const BumpProfile p = build_bump(d);
    const double lo = p.well_start();
    for (int i = 0; i <= 10000; ++i) {
      const double x = lo + (d - lo) * i / 10000.0;
      EXPECT_GE(p.f(x), -d * d - 1e-15);
      EXPECT_LE(p.f(x), 1e-15);
      EXPECT_LE(p.df(x), d + 1e-12);
    }
    EXPECT_LE(p.amplitude(), d * d * d);
  }
}

TEST(Profile, GlobalRangeAndUniformSmallness) {
  for (double d : kDeltas) {
    const BumpProfile p = build_bump(d);
    double supF = 0.0, supFF = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      const double x = 1.2 * d * i / 20000.0;
      EXPECT_GE(p.f(x), -d * d);
      EXPECT_LE(p.f(x), 1.0);
      supF = std::max(supF, std::abs(p.F(x)));
      supFF = std::max(supFF, std::abs(p.FF(x)));
    }
    EXPECT_LE(supF, std::pow(d, 4));
    EXPECT_LE(supFF, std::pow(d, 5));
  }
}

TEST(Profile, IntegralVanishesByQuadrature) {
  for (double d : kDeltas) {
    const BumpProfile p = build_bump(d);
    EXPECT_LE(std::abs(simpson_integral(p, 0.0, d)), 1e-12);
    // The reservoir balances the ramp area delta^4/2 over an effective well width.
    const double d4 = std::pow(d, 4);
    const double width = (0.5 * d4) / p.amplitude();
    EXPECT_GT(width, 0.2 * (d - d4));
    EXPECT_LT(width, d - d4);
  }
}

TEST(Profile, AntiderivativesConsistent) {
  for (double d : kDeltas) {
    const BumpProfile p = build_bump(d);
    std::vector<double> cuts{0.0};
    for (double x : p.breakpoints()) cuts.push_back(x);
    cuts.push_back(1.2 * d);
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double len = cuts[i + 1] - cuts[i];
      if (len <= 0) continue;
      const double x = cuts[i] + 0.5 * len, h = 1e-4 * len;
      EXPECT_NEAR((p.F(x + h) - p.F(x - h)) / (2 * h), p.f(x), 1e-9);
      EXPECT_NEAR((p.FF(x + h) - p.FF(x - h)) / (2 * h), p.F(x), 1e-9);
      EXPECT_NEAR((p.f(x + h) - p.f(x - h)) / (2 * h), p.df(x), 1e-6 * std::max(1.0, std::abs(p.df(x))));
    }
  }
}

TEST(Profile, ContinuousThroughBreakpoints) {
  for (double d : kDeltas) {
    const BumpProfile p = build_bump(d);
    for (double b : p.breakpoints()) {
      const double e = 1e-12 * std::max(1.0, b);
      EXPECT_NEAR(p.f(b - e), p.f(b + e), 2.5 * e * std::abs(p.df(b)) + 1e-12);
      EXPECT_NEAR(p.df(b - e), p.df(b + e), 1e-6 * std::max(1.0, std::abs(p.df(b))));
    }
  }
}

TEST(Profile, RampAreaAndMonotoneSecondAntiderivative) {
  for (double d : kDeltas) {
    const BumpProfile p = build_bump(d);
    const double d4 = std::pow(d, 4);
    EXPECT_NEAR(p.F(d4), 0.5 * d4, 0.05 * d4);
    double prev = 0.0;
    for (int i = 0; i <= 5000; ++i) {
      const double x = d * i / 5000.0;
      EXPECT_GE(p.F(x), -1e-15);
      EXPECT_GE(p.FF(x), prev - 1e-18);
      prev = p.FF(x);
    }
  }
}

TEST(Profile, CertifyReportsTinyViolations) {
  for (double d : {0.5, 0.4, 0.3, 0.2, 0.1, 0.05}) {
    const ProfileReport r = certify(build_bump(d));
    EXPECT_LE(r.max_violation(), 1e-10) << "delta = " << d;
    // F peaks at the far end of the blend, where f first reaches zero.
    EXPECT_NEAR(r.argsup_F, 1.05 * std::pow(d, 4), 0.01 * std::pow(d, 4));
    EXPECT_LE(r.sup_abs_FF, std::pow(d, 4) * d / 2);
    EXPECT_FALSE(r.lines().empty());
  }
}

TEST(Profile, InfeasibleDeltaRejected) {
  EXPECT_THROW(build_bump(0.6), DomainError);
  EXPECT_THROW(build_bump(0.0), DomainError);
  EXPECT_THROW(build_bump(-0.1), DomainError);
  EXPECT_NO_THROW(build_bump(0.5));
}
