#include "curvglue/frames.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <random>

#include "curvglue/curvature.hpp"

namespace curvglue {

namespace {

// r_i = R_ijkl b^j c^k d^l
Vec contract3(const Tensor4& R, const Vec& b, const Vec& c, const Vec& d) {
  const int n = R.n();
  Vec r = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double bc = b(j) * c(k);
        if (bc == 0.0) continue;
        for (int l = 0; l < n; ++l) s += R(i, j, k, l) * bc * d(l);
      }
    r(i) = s;
  }
  return r;
}

Mat random_frame(std::mt19937_64& rng, int n, int k) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat A(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) A(i, j) = nd(rng);
  Eigen::HouseholderQR<Mat> qr(A);
  return qr.householderQ() * Mat::Identity(n, k);
}

Mat retract(const Mat& Y) {
  Eigen::HouseholderQR<Mat> qr(Y);
  Mat Q = qr.householderQ() * Mat::Identity(Y.rows(), Y.cols());
  // Fix column signs so the retraction is continuous.
  const Mat Rm = qr.matrixQR().topRows(Y.cols()).triangularView<Eigen::Upper>();
  for (int j = 0; j < Y.cols(); ++j)
    if (Rm(j, j) < 0) Q.col(j) *= -1.0;
  return Q;
}

using Objective = std::function<double(const Mat&)>;
using Gradient = std::function<Mat(const Mat&)>;

// Projected gradient descent on the Stiefel set with Armijo backtracking.
Mat stiefel_descent(Mat Q, const Objective& f, const Gradient& grad, int iterations) {
  double fq = f(Q);
  double step = 0.5;
  for (int it = 0; it < iterations; ++it) {
    const Mat G = grad(Q);
    const Mat QtG = Q.transpose() * G;
    const Mat RG = G - Q * (0.5 * (QtG + QtG.transpose()));
    const double gn2 = RG.squaredNorm();
    if (gn2 < 1e-28) break;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Mat cand = retract(Q - step * RG);
      const double fc = f(cand);
      if (fc <= fq - 1e-4 * step * gn2) {
        Q = cand;
        fq = fc;
        moved = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return Q;
}

double best_of_refined(std::vector<std::pair<double, Mat>> seeds, const Objective& f, const Gradient& grad,
                       const FrameSearchConfig& cfg) {
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double best = std::numeric_limits<double>::infinity();
  for (auto& s : seeds) best = std::min(best, s.first);
  const int starts = std::min<int>(cfg.refine_starts, static_cast<int>(seeds.size()));
  for (int s = 0; s < starts; ++s) {
    const Mat Q = stiefel_descent(seeds[s].second, f, grad, cfg.iterations);
    best = std::min(best, f(Q));
  }
  return best;
}

}  // namespace

double isotropic_value(const Tensor4& R, const Vec& X, const Vec& Y, const Vec& U, const Vec& V) {
  return riemann_eval(R, X, U, X, U) + riemann_eval(R, X, V, X, V) + riemann_eval(R, Y, U, Y, U) +
         riemann_eval(R, Y, V, Y, V) - 2.0 * riemann_eval(R, X, Y, U, V);
}

double flag_value(const Tensor4& R, const Vec& e1, const Vec& e2, const Vec& e3) {
  return riemann_eval(R, e1, e3, e1, e3) + riemann_eval(R, e2, e3, e2, e3);
}

Tensor4 orthonormalize(const Tensor4& R, const Mat& g) {
  const int n = R.n();
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw DomainError("orthonormalize: metric is not SPD");
  const Mat M = llt.matrixL().transpose().solve(Mat::Identity(n, n));  // columns: orthonormal frame
  // Contract one slot at a time.
  Tensor4 A = R, B(n);
  for (int slot = 0; slot < 4; ++slot) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int p = 0; p < n; ++p) {
              switch (slot) {
                case 0: s += M(p, i) * A(p, j, k, l); break;
                case 1: s += M(p, j) * A(i, p, k, l); break;
                case 2: s += M(p, k) * A(i, j, p, l); break;
                default: s += M(p, l) * A(i, j, k, p); break;
              }
            }
            B(i, j, k, l) = s;
          }
    std::swap(A, B);
  }
  return A;
}

double isotropic_min(const Tensor4& R0, const Mat& g0, IsotropicVariant variant, const FrameSearchConfig& cfg) {
  const int extra = variant == IsotropicVariant::plain ? 0 : (variant == IsotropicVariant::plus_R ? 1 : 2);
  const Tensor4 R = orthonormalize(with_flat_factors(R0, extra), with_flat_factors(g0, extra));
  const int m = R.n();
  if (m < 4) throw DomainError("isotropic_min: effective dimension must be at least 4");
  auto f = [&](const Mat& Q) {
    return isotropic_value(R, Q.col(0), Q.col(1), Q.col(2), Q.col(3));
  };
  auto grad = [&](const Mat& Q) {
    const Vec X = Q.col(0), Y = Q.col(1), U = Q.col(2), V = Q.col(3);
    Mat G(m, 4);
    G.col(0) = 2 * (contract3(R, U, X, U) + contract3(R, V, X, V) - contract3(R, Y, U, V));
    G.col(1) = 2 * (contract3(R, U, Y, U) + contract3(R, V, Y, V) + contract3(R, X, U, V));
    G.col(2) = 2 * (contract3(R, X, U, X) + contract3(R, Y, U, Y) - contract3(R, V, X, Y));
    G.col(3) = 2 * (contract3(R, X, V, X) + contract3(R, Y, V, Y) + contract3(R, U, X, Y));
    return G;
  };
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::pair<double, Mat>> seeds;
  seeds.reserve(cfg.samples);
  for (int s = 0; s < cfg.samples; ++s) {
    Mat Q = random_frame(rng, m, 4);
    seeds.emplace_back(f(Q), std::move(Q));
  }
  return best_of_refined(std::move(seeds), f, grad, cfg);
}

namespace {

// For fixed unit e3 the optimal (e1, e2) span the two lowest eigenvectors of
// v -> R(v, e3, v, e3) on the orthogonal complement of e3.
Mat best_flag_frame(const Tensor4& R, const Vec& e3, double* value) {
  const int m = R.n();
  Mat J(m, m);
  for (int i = 0; i < m; ++i) {
    Vec ei = Vec::Unit(m, i);
    J.col(i) = contract3(R, e3, ei, e3);
  }
  J = 0.5 * (J + J.transpose());
  const Mat e3m = e3;
  Eigen::HouseholderQR<Mat> qr(e3m);
  const Mat B = Mat(qr.householderQ()).rightCols(m - 1);
  Eigen::SelfAdjointEigenSolver<Mat> es(B.transpose() * J * B);
  Mat Q(m, 3);
  Q.col(0) = B * es.eigenvectors().col(0);
  Q.col(1) = B * es.eigenvectors().col(1);
  Q.col(2) = e3;
  if (value) *value = es.eigenvalues()(0) + es.eigenvalues()(1);
  return Q;
}

}  // namespace

double flag_min(const Tensor4& R0, const Mat& g, const FrameSearchConfig& cfg) {
  if (R0.n() < 3) throw DomainError("flag_min: dimension must be at least 3");
  const Tensor4 R = orthonormalize(R0, g);
  const int m = R.n();
  auto f = [&](const Mat& Q) { return flag_value(R, Q.col(0), Q.col(1), Q.col(2)); };
  auto grad = [&](const Mat& Q) {
    const Vec a = Q.col(0), b = Q.col(1), c = Q.col(2);
    Mat G(m, 3);
    G.col(0) = 2 * contract3(R, c, a, c);
    G.col(1) = 2 * contract3(R, c, b, c);
    G.col(2) = 2 * (contract3(R, a, c, a) + contract3(R, b, c, b));
    return G;
  };
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::pair<double, Mat>> seeds;
  seeds.reserve(cfg.samples);
  for (int s = 0; s < cfg.samples; ++s) {
    const Vec e3 = random_frame(rng, m, 1).col(0);
    double v = 0.0;
    Mat Q = best_flag_frame(R, e3, &v);
    seeds.emplace_back(v, std::move(Q));
  }
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double best = seeds.front().first;
  const int starts = std::min<int>(cfg.refine_starts, static_cast<int>(seeds.size()));
  for (int s = 0; s < starts; ++s) {
    const Mat Q = stiefel_descent(seeds[s].second, f, grad, cfg.iterations);
    double v = 0.0;
    Vec e3 = Q.col(2);
    best_flag_frame(R, e3.normalized(), &v);
    best = std::min({best, f(Q), v});
  }
  return best;
}

double isotropic_min(const MetricField& g, const Vec& x, IsotropicVariant variant, const FrameSearchConfig& cfg) {
  const MetricJet J = g.jet(x);
  return isotropic_min(riemann_tensor(J), J.g, variant, cfg);
}

double flag_min(const MetricField& g, const Vec& x, const FrameSearchConfig& cfg) {
  const MetricJet J = g.jet(x);
  return flag_min(riemann_tensor(J), J.g, cfg);
}

}  // namespace curvglue
