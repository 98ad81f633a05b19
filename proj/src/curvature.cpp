#include "curvglue/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace curvglue {

namespace {

Mat sym_inverse(const Mat& g) {
  const Mat gi = g.ldlt().solve(Mat::Identity(g.rows(), g.cols()));
  return 0.5 * (gi + gi.transpose());
}

// Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij).
std::vector<double> lowered(const MetricJet& J) {
  const int n = J.n();
  std::vector<double> low(static_cast<size_t>(n) * n * n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        low[(static_cast<size_t>(l) * n + i) * n + j] =
            0.5 * (J.dg[i](j, l) + J.dg[j](i, l) - J.dg[l](i, j));
  return low;
}

}  // namespace

Christoffel christoffels(const MetricJet& J) {
  const int n = J.n();
  const Mat gi = sym_inverse(J.g);
  const auto low = lowered(J);
  Christoffel G(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += gi(k, l) * low[(static_cast<size_t>(l) * n + i) * n + j];
        G(k, i, j) = s;
        G(k, j, i) = s;
      }
  return G;
}

Christoffel christoffels(const MetricField& g, const Vec& x) { return christoffels(g.jet(x)); }

double metric_compatibility_residual(const MetricJet& J, const Christoffel& G) {
  const int n = J.n();
  double r = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = J.dg[k](i, j);
        for (int l = 0; l < n; ++l) s -= G(l, k, i) * J.g(l, j) + G(l, k, j) * J.g(i, l);
        r = std::max(r, std::abs(s));
      }
  return r;
}

Tensor4 riemann_tensor(const MetricJet& J) {
  const int n = J.n();
  const Mat gi = sym_inverse(J.g);
  const auto low = lowered(J);
  auto L = [&](int l, int i, int j) { return low[(static_cast<size_t>(l) * n + i) * n + j]; };
  Tensor4 R(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double lin = 0.5 * (J.dd(b, c)(a, d) + J.dd(a, d)(b, c) - J.dd(a, c)(b, d) - J.dd(b, d)(a, c));
          double quad = 0.0;
          for (int e = 0; e < n; ++e)
            for (int f = 0; f < n; ++f) quad += gi(e, f) * (L(f, b, c) * L(e, a, d) - L(f, b, d) * L(e, a, c));
          R(a, b, c, d) = lin + quad;
        }
  return R;
}

Tensor4 riemann_tensor(const MetricField& g, const Vec& x) { return riemann_tensor(g.jet(x)); }

Lambda2Form curvature_operator(const MetricJet& J) {
  const Tensor4 R = riemann_tensor(J);
  Lambda2Basis b(J.n());
  Mat e(b.size(), b.size());
  for (int p = 0; p < b.size(); ++p) {
    auto [i, j] = b.pairs()[p];
    for (int q = 0; q < b.size(); ++q) {
      auto [k, l] = b.pairs()[q];
      e(p, q) = R(i, j, k, l);
    }
  }
  e = 0.5 * (e + e.transpose());
  return Lambda2Form(b, e, induced_gram(J.g));
}

Lambda2Form curvature_operator(const MetricField& g, const Vec& x) { return curvature_operator(g.jet(x)); }

SymmetryResiduals riemann_symmetry_residuals(const Tensor4& R) {
  const int n = R.n();
  SymmetryResiduals s;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          s.antisymmetry = std::max({s.antisymmetry, std::abs(R(i, j, k, l) + R(j, i, k, l)),
                                     std::abs(R(i, j, k, l) + R(i, j, l, k))});
          s.pair_exchange = std::max(s.pair_exchange, std::abs(R(i, j, k, l) - R(k, l, i, j)));
          s.bianchi = std::max(s.bianchi, std::abs(R(i, j, k, l) + R(i, k, l, j) + R(i, l, j, k)));
        }
  return s;
}

double riemann_eval(const Tensor4& R, const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  const int n = R.n();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (a(i) == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (b(j) == 0.0) continue;
      const double ab = a(i) * b(j);
      for (int k = 0; k < n; ++k) {
        if (c(k) == 0.0) continue;
        const double abc = ab * c(k);
        for (int l = 0; l < n; ++l) s += abc * d(l) * R(i, j, k, l);
      }
    }
  }
  return s;
}

Tensor4 with_flat_factors(const Tensor4& R, int extra) {
  const int n = R.n(), m = n + extra;
  Tensor4 out(m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out(i, j, k, l) = R(i, j, k, l);
  return out;
}

Mat with_flat_factors(const Mat& g, int extra) {
  const int n = static_cast<int>(g.rows());
  Mat out = Mat::Identity(n + extra, n + extra);
  out.topLeftCorner(n, n) = g;
  return out;
}

}  // namespace curvglue
