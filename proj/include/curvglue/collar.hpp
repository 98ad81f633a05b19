#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "curvglue/metric.hpp"

namespace curvglue {

enum class Side { M0, M1 };

// Fermi collar around the interface x^n = 0. g0 is used on x^n >= 0 and g1
// on x^n <= 0; both coefficient fields must be evaluable slightly across the
// interface for derivative stencils.
struct CollarData {
  MetricField g0, g1;
  double width = 0.0;
  std::vector<Vec> boundary_samples;  // tangential coordinates only

  int n() const { return g0.n(); }
  Vec point(const Vec& xhat, double t) const;
};

struct CollarValidation {
  double isometry_defect = 0.0;
  double fermi_defect = 0.0;
};

// Builds and validates a collar: boundary isometry to 1e-10 and Fermi form to
// 1e-12 at the sample points.
CollarData make_collar(MetricField g0, MetricField g1, double width, int samples_per_axis = 5);
CollarValidation validate_collar(const CollarData& c);

// Covariant second fundamental form on the boundary slice, (n-1)x(n-1).
Mat second_ff(Side side, const CollarData& c, const Vec& xhat);
Mat combined_L(const CollarData& c, const Vec& xhat);

// Jet of a symmetric n x n field (same layout as MetricJet).
using FieldJet = MetricJet;

struct ShapeNormalJet {
  Mat L, dn, dnn;  // n x n, zero last row and column
};

using BoundaryShapeFn = std::function<Mat(const Vec& xhat)>;

// Normal-parallel extension of L: nabla_N L = 0 along every normal line,
// integrated with classical RK4 on a fixed grid of step <= width/64. The
// solution of each line is cached, so the field is smooth in the tangential
// variables and cheap to query repeatedly.
class ExtendedShape {
 public:
  ExtendedShape(const CollarData& c, BoundaryShapeFn L_on_boundary = nullptr);

  const CollarData& collar() const { return *collar_; }
  Mat value(const Vec& x) const;  // covariant, n x n
  Mat endomorphism(const Vec& x) const;
  ShapeNormalJet normal_jet(const Vec& x) const;
  FieldJet jet(const Vec& x) const;
  double step() const { return step_; }

 private:
  struct Line {
    std::vector<Mat> values;  // grid values at k * step
  };
  std::shared_ptr<const CollarData> collar_;
  BoundaryShapeFn L0_;
  double step_;
  double reach_;
  Vec tangential_steps_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<double>, std::shared_ptr<Line>> cache_;

  Mat rhs(const Vec& xhat, double t, const Mat& L) const;
  Mat rk4(const Vec& xhat, double t, double h, const Mat& L) const;
  Mat solve(const Vec& xhat, double t) const;  // tangential block
  std::shared_ptr<Line> line(const Vec& xhat) const;
};

std::shared_ptr<ExtendedShape> extend_L(const CollarData& c, BoundaryShapeFn L_on_boundary = nullptr);

// Fourth-order one-sided Taylor continuation of g1 across the interface.
struct TaylorCoefficients {
  std::vector<Mat> a;  // a[k], k = 0..4, n x n
};
TaylorCoefficients g1_taylor(const CollarData& c, const Vec& xhat);
MetricField extend_g1_prime(const CollarData& c);

// Boundary given by an embedding u -> sigma(u) of the first n-1 coordinates.
struct BoundaryEmbedding {
  std::function<Vec(const Vec& u)> point;
  int orientation = +1;  // flips the chosen unit normal
};

struct FermiChart {
  MetricField metric;                       // coefficients in (u, t)
  std::function<Vec(const Vec&)> to_original;  // (u, t) -> original coordinates
  double width = 0.0;
  bool shrunk = false;
  double raw_fermi_defect = 0.0;  // before the normal row is set to e_n
};

// Pulls g back through the normal exponential map of the boundary. The
// tangential range comes from u_box; the normal range is [0, width], shrunk
// (halving) when the Jacobian monitor detects focal points.
FermiChart fermi_from_general(const MetricField& g, const BoundaryEmbedding& b,
                              std::vector<std::pair<double, double>> u_box, double width);

}  // namespace curvglue
