#include <gtest/gtest.h>

#include <cmath>

#include "curvglue/lambda2.hpp"
#include "support.hpp"

using namespace curvglue;
using namespace curvglue::testing;

namespace {

// Antisymmetric expansion alpha^{ij} of basis-pair coordinates.
Mat expand(const Lambda2Basis& b, const Vec& a) {
  Mat m = Mat::Zero(b.n(), b.n());
  for (int p = 0; p < b.size(); ++p) {
    auto [i, j] = b.pairs()[p];
    m(i, j) = a(p);
    m(j, i) = -a(p);
  }
  return m;
}

Tensor4 random_curvature_like(int n, std::mt19937_64& rng) {
  const Lambda2Basis b(n);
  return tensor_from_form(Lambda2Form(b, random_symmetric(b.size(), rng), Mat::Identity(b.size(), b.size())));
}

}  // namespace

TEST(Lambda2Basis, PairsAreLexicographicAndExhaustive) {
  const Lambda2Basis b(4);
  ASSERT_EQ(b.size(), 6);
  std::vector<std::pair<int, int>> want = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  EXPECT_EQ(b.pairs(), want);
  for (int p = 0; p < b.size(); ++p) EXPECT_EQ(b.index(b.pairs()[p].first, b.pairs()[p].second), p);
  EXPECT_THROW(Lambda2Basis(1), DomainError);
}

TEST(InducedGram, IdentityAndDiagonal) {
  EXPECT_EQ((induced_gram(Mat::Identity(3, 3)) - Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.0);
  Mat g = Mat::Identity(3, 3);
  g(0, 0) = 4.0;
  const Mat G = induced_gram(g);
  EXPECT_DOUBLE_EQ(G(Lambda2Basis(3).index(0, 1), Lambda2Basis(3).index(0, 1)), 4.0);
  EXPECT_DOUBLE_EQ(G(Lambda2Basis(3).index(1, 2), Lambda2Basis(3).index(1, 2)), 1.0);
}

TEST(InducedGram, RandomSpdGivesPositiveDefinite) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 4;
    const Mat g = random_spd(n, rng);
    Eigen::SelfAdjointEigenSolver<Mat> es(induced_gram(g));
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(InducedGram, RejectsIndefiniteMetric) {
  Mat g = Mat::Identity(3, 3);
  g(2, 2) = -1.0;
  try {
    induced_gram(g);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("-1"), std::string::npos) << e.what();
  }
}

TEST(KulkarniNomizu, IdentityWedgeIdentityIsIdentity) {
  for (int n = 2; n <= 5; ++n) {
    const Lambda2Form f = kn_product(Mat::Identity(n, n), Mat::Identity(n, n));
    const int N = f.basis.size();
    EXPECT_LE((f.entries - Mat::Identity(N, N)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(KulkarniNomizu, DiagonalAgainstIdentityInTwoDimensions) {
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 3.0;
  A(1, 1) = 5.0;
  const Lambda2Form f = kn_product(A, Mat::Identity(2, 2));
  EXPECT_DOUBLE_EQ(f.entries(0, 0), 4.0);
}

TEST(KulkarniNomizu, SymmetricBilinearAndCurvatureSymmetries) {
  std::mt19937_64 rng(2);
  const int n = 4;
  const Mat A = random_symmetric(n, rng), B = random_symmetric(n, rng), C = random_symmetric(n, rng);
  EXPECT_LE((kn_product(A, B).entries - kn_product(B, A).entries).cwiseAbs().maxCoeff(), 1e-14);
  const Mat lhs = kn_product(2.0 * A + C, B).entries;
  const Mat rhs = 2.0 * kn_product(A, B).entries + kn_product(C, B).entries;
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-13);
  const Tensor4 T = kn_tensor(A, B);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          EXPECT_NEAR(T(i, j, k, l), -T(j, i, k, l), 1e-14);
          EXPECT_NEAR(T(i, j, k, l), T(k, l, i, j), 1e-14);
          const double want = 0.5 * (A(i, k) * B(j, l) - A(j, k) * B(i, l) + B(i, k) * A(j, l) - B(j, k) * A(i, l));
          EXPECT_NEAR(T(i, j, k, l), want, 1e-14);
        }
}

TEST(KulkarniNomizu, PsdFactorsGivePsdProduct) {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3;
    const Mat g = random_spd(n, rng);
    const Mat A = random_psd(n, 1 + trial % n, rng), B = random_psd(n, 1 + (trial / 3) % n, rng);
    worst = std::min(worst, generalized_eigenvalues(kn_product(A, B, g).entries, induced_gram(g)).minCoeff());
  }
  EXPECT_GE(worst, -1e-10);
}

TEST(FormTensor, ZeroAndOneDimensional) {
  const Lambda2Form z = form_from_tensor(Tensor4(3), Mat::Identity(3, 3));
  EXPECT_EQ(z.entries.cwiseAbs().maxCoeff(), 0.0);
  Tensor4 T(2);
  T(0, 1, 0, 1) = T(1, 0, 1, 0) = 2.5;
  T(0, 1, 1, 0) = T(1, 0, 0, 1) = -2.5;
  const Lambda2Form f = form_from_tensor(T, Mat::Identity(2, 2));
  EXPECT_DOUBLE_EQ(f.entries(0, 0), 2.5);
}

TEST(FormTensor, RoundTripAndQuarterPairing) {
  std::mt19937_64 rng(4);
  for (int n = 2; n <= 4; ++n) {
    const Tensor4 T = random_curvature_like(n, rng);
    const Lambda2Form f = form_from_tensor(T, Mat::Identity(n, n));
    Tensor4 back = tensor_from_form(f);
    back *= -1.0;
    back += T;
    EXPECT_LE(back.max_abs(), 1e-13);
    const Vec a = random_matrix(f.basis.size(), 1, rng), c = random_matrix(f.basis.size(), 1, rng);
    const Mat A = expand(f.basis, a), C = expand(f.basis, c);
    double q = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) q += 0.25 * T(i, j, k, l) * A(i, j) * C(k, l);
    EXPECT_NEAR(q, f(a, c), 1e-12);
  }
}

TEST(FormTensor, RejectsBrokenAntisymmetry) {
  Tensor4 T(3);
  T(0, 1, 0, 1) = 1.0;
  EXPECT_THROW(form_from_tensor(T, Mat::Identity(3, 3)), DomainError);
}

TEST(Traces, IdentityForm) {
  for (int n = 2; n <= 5; ++n) {
    const Mat I = Mat::Identity(n, n);
    const Lambda2Form id = kn_product(I, I);
    EXPECT_LE((ricci_trace(id, I) - (n - 1) * I).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(scalar_trace(id, I), n * (n - 1.0), 1e-13);
    const Lambda2Form zero(id.basis, Mat::Zero(id.basis.size(), id.basis.size()), id.gram);
    EXPECT_EQ(ricci_trace(zero, I).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(scalar_trace(zero, I), 0.0);
  }
}

TEST(Traces, PsdFormHasPsdRicciTrace) {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3;
    const Lambda2Basis b(n);
    const Mat g = random_spd(n, rng);
    const Lambda2Form T(b, random_psd(b.size(), 1 + trial % b.size(), rng), induced_gram(g));
    Eigen::SelfAdjointEigenSolver<Mat> es(ricci_trace(T, g));
    worst = std::min(worst, es.eigenvalues().minCoeff());
  }
  EXPECT_GE(worst, -1e-10);
}

TEST(Traces, ScalarIsMetricTraceOfRicci) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 4;
    const Mat g = random_spd(n, rng);
    const Tensor4 T = random_curvature_like(n, rng);
    EXPECT_NEAR(scalar_trace(T, g), g.ldlt().solve(ricci_trace(T, g)).trace(), 1e-12);
  }
}

TEST(Eigen, IdentityPencilAndDiagonal) {
  std::mt19937_64 rng(7);
  const Mat g = random_spd(3, rng);
  const Lambda2Form f(Lambda2Basis(3), induced_gram(g), induced_gram(g));
  EXPECT_NEAR(min_eig(f), 1.0, 1e-12);
  EXPECT_NEAR(two_smallest_sum(f), 2.0, 1e-12);
  Mat d = Mat::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, 2.0;
  const Lambda2Form h(Lambda2Basis(3), d, Mat::Identity(3, 3));
  EXPECT_NEAR(min_eig(h), 1.0, 1e-14);
  EXPECT_NEAR(two_smallest_sum(h), 3.0, 1e-14);
}

TEST(Eigen, TwoSmallestSumMatchesPairSearch) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat g = random_spd(3, rng);
    const Mat gram = induced_gram(g);
    const Lambda2Form T(Lambda2Basis(3), random_symmetric(3, rng), gram);
    const double s = two_smallest_sum(T);
    // gram-orthonormal pairs via the whitening W with W^T gram W = I.
    const Mat W = Mat(gram.llt().matrixL()).transpose().inverse();
    const Mat S = W.transpose() * T.entries * W;
    double best = 1e300;
    std::normal_distribution<double> N(0, 1);
    for (int k = 0; k < 10000; ++k) {
      const Mat Q = random_orthonormal(3, 2, rng);
      best = std::min(best, Q.col(0).dot(S * Q.col(0)) + Q.col(1).dot(S * Q.col(1)));
    }
    EXPECT_LE(s, best + 1e-12);
    // The pair minimum is tr S - max Rayleigh quotient of the complement; refine by ascent.
    Vec gamma = random_matrix(3, 1, rng);
    gamma.normalize();
    for (int it = 0; it < 20000; ++it) {
      const double r = gamma.dot(S * gamma);
      gamma += 0.05 * (S * gamma - r * gamma);
      gamma.normalize();
    }
    EXPECT_NEAR(s, S.trace() - gamma.dot(S * gamma), 1e-6);
    EXPECT_NEAR(s, best, 5e-2);
  }
}

TEST(Eigen, FormEigenvaluesSortedAndMatchPencil) {
  std::mt19937_64 rng(9);
  const Mat g = random_spd(4, rng);
  const Lambda2Form T(Lambda2Basis(4), random_symmetric(6, rng), induced_gram(g));
  const Vec ev = form_eigenvalues(T);
  for (int i = 1; i < ev.size(); ++i) EXPECT_LE(ev(i - 1), ev(i));
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(T.entries, T.gram);
  EXPECT_LE((ev - ges.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_DOUBLE_EQ(min_eig(T), ev(0));
}

TEST(Eigen, NonSpdGramRejected) {
  const Lambda2Form T(Lambda2Basis(3), Mat::Identity(3, 3), -Mat::Identity(3, 3));
  EXPECT_THROW(min_eig(T), DomainError);
  EXPECT_THROW(two_smallest_sum(Lambda2Form(Lambda2Basis(2), Mat::Identity(1, 1), Mat::Identity(1, 1))),
               DomainError);
}
