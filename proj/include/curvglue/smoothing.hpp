#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "curvglue/gluing.hpp"

namespace curvglue {

// Triweight kernel 35/32 (1 - z^2)^3 on [-1, 1]: C^2, nonnegative, unit mass.
double triweight(double z);
constexpr double kTriweightSecondMoment = 1.0 / 9.0;

// Gauss-Legendre nodes and weights on [-1, 1].
struct Quadrature {
  std::vector<double> nodes, weights;
};
const Quadrature& gauss_legendre(int order);

// (rho_h * f)(t) with f integrated piecewise between the given breakpoints.
double convolve_1d(const std::function<double(double)>& f, double t, double h,
                   const std::vector<double>& breakpoints = {}, int order = 8);

struct MollifierConfig {
  double h = 0.0;
  int order = 8;         // Gauss-Legendre nodes per smooth sub-interval
  bool partition = true; // blend back to g_delta on h <= x^n <= 2h
};

// C^2 cutoff: 1 on (-inf, h], 0 on [2h, inf), quintic smoothstep between.
double near_cutoff(double t, double h, int order = 0);

// Normal-direction mollification of the glued metric:
//   g^h = g1e + rho_h * (H D),  D = g_delta - g1' on x^n >= 0,
// where H is the indicator of x^n >= 0 and g1e is g1 below the interface and
// the continuation g1' above it. The result equals g1 exactly for x^n <= -h.
// With the partition enabled, x^n >= 0 uses g_delta + eta (rho_h * (H D) - D)
// for the cutoff eta, so g^h equals g_delta exactly for x^n >= 2h.
class SmoothedMetric {
 public:
  SmoothedMetric(const GluedMetric& glued, MollifierConfig cfg);

  double h() const { return cfg_.h; }
  double delta() const { return glued_->delta(); }
  const GluedMetric& glued() const { return *glued_; }
  Mat value(const Vec& x) const;
  MetricJet jet(const Vec& x) const;
  MetricField field() const;

 private:
  std::shared_ptr<const GluedMetric> glued_;
  std::shared_ptr<const MetricField> g1p_;
  MollifierConfig cfg_;
  std::vector<double> breaks_;

  template <class F>
  void integrate(double t, const F& f) const;
};

SmoothedMetric mollify(const GluedMetric& glued, const MollifierConfig& cfg);

struct PerturbationReport {
  double worst_slack = 0.0;  // min over points of min_eig(curvature operator of g^h) - kappa
  Vec argmin;
  double sup_dist = 0.0;  // max |g^h - g_(delta)| over the points
};
PerturbationReport curvature_perturbation(const SmoothedMetric& sm, double kappa, const std::vector<Vec>& points);

}  // namespace curvglue
