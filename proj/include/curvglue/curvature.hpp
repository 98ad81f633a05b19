#pragma once

#include <vector>

#include "curvglue/lambda2.hpp"
#include "curvglue/metric.hpp"

namespace curvglue {

// Levi-Civita symbols Gamma^k_ij.
class Christoffel {
 public:
  Christoffel() = default;
  explicit Christoffel(int n) : n_(n), data_(static_cast<size_t>(n) * n * n, 0.0) {}
  int n() const { return n_; }
  double& operator()(int k, int i, int j) { return data_[(static_cast<size_t>(k) * n_ + i) * n_ + j]; }
  double operator()(int k, int i, int j) const {
    return data_[(static_cast<size_t>(k) * n_ + i) * n_ + j];
  }

 private:
  int n_ = 0;
  std::vector<double> data_;
};

Christoffel christoffels(const MetricJet& J);
Christoffel christoffels(const MetricField& g, const Vec& x);

// Largest |d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il|.
double metric_compatibility_residual(const MetricJet& J, const Christoffel& G);

// Covariant Riemann tensor with R_ijij equal to the sectional curvature of an
// orthonormal pair (positive on the round sphere).
Tensor4 riemann_tensor(const MetricJet& J);
Tensor4 riemann_tensor(const MetricField& g, const Vec& x);

Lambda2Form curvature_operator(const MetricJet& J);
Lambda2Form curvature_operator(const MetricField& g, const Vec& x);

struct SymmetryResiduals {
  double antisymmetry = 0.0;  // max over both pairs
  double pair_exchange = 0.0;
  double bianchi = 0.0;
};
SymmetryResiduals riemann_symmetry_residuals(const Tensor4& R);

// R(a, b, c, d) for vectors in coordinates.
double riemann_eval(const Tensor4& R, const Vec& a, const Vec& b, const Vec& c, const Vec& d);

// Curvature tensor of g + flat factors of the given dimension.
Tensor4 with_flat_factors(const Tensor4& R, int extra);
Mat with_flat_factors(const Mat& g, int extra);

}  // namespace curvglue
