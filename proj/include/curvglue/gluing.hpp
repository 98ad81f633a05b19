#pragma once

#include <memory>
#include <string>
#include <vector>

#include "curvglue/collar.hpp"
#include "curvglue/curvature.hpp"
#include "curvglue/profile.hpp"

namespace curvglue {

// Tangential projection P^T and normal projection P^N as covariant forms in a
// Fermi chart.
Mat tangential_projection(const Mat& g);
Mat normal_projection(int n);

// g_delta = g0 + 2 F(x^n) L - 2 C FF(x^n) P^T on x^n >= 0.
struct ModifiedMetric {
  std::shared_ptr<const CollarData> collar;
  std::shared_ptr<const ExtendedShape> L;
  BumpProfile profile;
  double C = 0.0;
  MetricField g_delta;
};

ModifiedMetric build_g_delta(const CollarData& collar, const BumpProfile& profile, double C,
                             std::shared_ptr<const ExtendedShape> L = nullptr);

// Largest offence against positive definiteness of g_delta on a sample grid;
// throws with the offending point when the smallest eigenvalue is not positive.
void check_g_delta_spd(const ModifiedMetric& mod, const std::vector<Vec>& points);

// Two-sided metric: g_delta on x^n >= 0 and g1 on x^n < 0. Jets are one-sided.
class GluedMetric {
 public:
  explicit GluedMetric(ModifiedMetric mod);

  const ModifiedMetric& modified() const { return mod_; }
  const CollarData& collar() const { return *mod_.collar; }
  double delta() const { return mod_.profile.delta(); }
  Mat value(const Vec& x) const;
  MetricJet jet(const Vec& x, Side side) const;
  MetricJet jet(const Vec& x) const;  // side chosen by the sign of x^n
  // The nonsmooth input g (g0 above, g1 below) that the family converges to.
  Mat original(const Vec& x) const;

 private:
  ModifiedMetric mod_;
};

struct JumpReport {
  double metric_jump = 0.0;
  double normal_derivative_jump = 0.0;
};
JumpReport interface_jumps(const GluedMetric& glued);

// Normal derivatives of the endomorphism G1 = g0^{-1} g1' at a point of the
// collar: nabla_N G1 and nabla_N^2 G1 with nabla_N T = T' + [S, T], S = nabla N.
struct G1Derivatives {
  Mat G, dG, ddG;  // endomorphisms
  Mat S;           // nabla N as an endomorphism
};
G1Derivatives g1_normal_derivatives(const CollarData& c, const MetricField& g1_prime, const Vec& x);

struct ChooseCReport {
  double C = 0.0;
  double max_lambda = 0.0;  // largest eigenvalue of L^2 - 1/2 nabla^2 G1 on the boundary tangent space
  double margin = 1.0;
};
ChooseCReport choose_C(const CollarData& c, const ExtendedShape& L, double margin = 1.0);
// Smallest eigenvalue of -L^2 + 1/2 nabla^2 G1 + C P^T on the tangent space over the samples.
double c_condition_slack(const CollarData& c, const ExtendedShape& L, double C);

struct DecompositionTerms {
  Lambda2Form R, A, B, Lcal, L2cal, Ihat;
  double f = 0.0, df = 0.0;
};

struct Decomposition {
  Lambda2Form lhs, rhs;
  DecompositionTerms terms;
  double residual = 0.0;
};

// B_ijkl assembled from nabla L and nabla N of (g0, L) at x.
Tensor4 b_tensor(const MetricJet& g0, const FieldJet& L);
DecompositionTerms decomposition_terms(const CollarData& c, const ExtendedShape& L, const BumpProfile& p,
                                       double C, const Vec& x);
Lambda2Form decomposition_rhs(const DecompositionTerms& t, double C);
Decomposition assemble_decomposition(const ModifiedMetric& mod, const Vec& x);

struct BoundaryReport {
  double min_slack = 0.0;          // min over samples of min_eig(assembled - kappa gram)
  double identity_residual = 0.0;  // max over samples of |eig(assembled - curvature of g1')|
};
// kn(g0 * nabla^2 G1, P^N) as a form over gram(g0).
Lambda2Form g1_second_derivative_term(const CollarData& c, const MetricField& g1_prime, const Vec& x);
Lambda2Form boundary_assembled(const CollarData& c, const ExtendedShape& L, const MetricField& g1_prime,
                               const Vec& xhat);
BoundaryReport check_boundary_inequality(const CollarData& c, double kappa);

struct PerturbationResult {
  CollarData collar;
  double trace_increment = 0.0;            // measured, averaged over boundary samples
  double predicted_tangential = 0.0;       // -((n-1)/2) slope
  double predicted_full = 0.0;             // -(n/2) slope
};
// Replaces g0 by diag(phi(x^n) g0_hat, 1) with phi(t) = 1 + s t (1 - t/d0)^3 on [0, d0) and 1 beyond.
PerturbationResult perturb_mean_curvature(const CollarData& c, double d0, double phi_slope);
double phi_value(double t, double d0, double s, int order);

}  // namespace curvglue
