#pragma once

#include <cstdint>

#include "curvglue/lambda2.hpp"
#include "curvglue/metric.hpp"

namespace curvglue {

struct FrameSearchConfig {
  std::uint64_t seed = 42;
  int samples = 512;
  int refine_starts = 4;
  int iterations = 150;
};

enum class IsotropicVariant { plain, plus_R, plus_R2 };

// K(P) = R(X,U,X,U) + R(X,V,X,V) + R(Y,U,Y,U) + R(Y,V,Y,V) - 2 R(X,Y,U,V).
double isotropic_value(const Tensor4& R, const Vec& X, const Vec& Y, const Vec& U, const Vec& V);
// R(e1,e3,e1,e3) + R(e2,e3,e2,e3).
double flag_value(const Tensor4& R, const Vec& e1, const Vec& e2, const Vec& e3);

// Minima over g-orthonormal frames. R and g share the same dimension.
double isotropic_min(const Tensor4& R, const Mat& g, IsotropicVariant variant,
                     const FrameSearchConfig& cfg = {});
double flag_min(const Tensor4& R, const Mat& g, const FrameSearchConfig& cfg = {});

double isotropic_min(const MetricField& g, const Vec& x, IsotropicVariant variant,
                     const FrameSearchConfig& cfg = {});
double flag_min(const MetricField& g, const Vec& x, const FrameSearchConfig& cfg = {});

// R expressed in a g-orthonormal basis (g = L L^T, basis L^{-T}).
Tensor4 orthonormalize(const Tensor4& R, const Mat& g);

}  // namespace curvglue
