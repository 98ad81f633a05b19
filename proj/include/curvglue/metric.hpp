#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "curvglue/lambda2.hpp"

namespace curvglue {

class StencilClearanceError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Coordinate box; the last axis is the signed distance to the interface.
struct ChartDomain {
  int n = 0;
  std::vector<std::pair<double, double>> box;

  ChartDomain() = default;
  ChartDomain(int n_, std::vector<std::pair<double, double>> box_);
  double extent(int axis) const { return box[axis].second - box[axis].first; }
  bool contains(const Vec& x, double margin = 0.0) const;
  int normal_axis() const { return n - 1; }
};

// Metric coefficients with first and second partial derivatives at a point.
struct MetricJet {
  Mat g;
  std::vector<Mat> dg;   // dg[k] = d_k g
  std::vector<Mat> d2g;  // d2g[k * n + l] = d_k d_l g

  MetricJet() = default;
  explicit MetricJet(int n);
  int n() const { return static_cast<int>(g.rows()); }
  const Mat& dd(int k, int l) const { return d2g[k * n() + l]; }
  Mat& dd(int k, int l) { return d2g[k * n() + l]; }
  MetricJet& operator+=(const MetricJet& o);
  MetricJet& operator*=(double s);
};

// Value and normal derivatives only; used on hot paths that never need the
// tangential part of the jet.
struct NormalJet {
  Mat g, dn, dnn;
};

struct FdConfig {
  double rel_step = 1e-4;  // step = rel_step * axis extent
  bool richardson = false;
};

struct DifferentiationReport {
  double first_order_error = 0.0;
  double second_order_error = 0.0;
  Vec steps;
};

using CoeffFn = std::function<Mat(const Vec&)>;
using JetFn = std::function<MetricJet(const Vec&)>;
using NormalJetFn = std::function<NormalJet(const Vec&)>;

class MetricField {
 public:
  static MetricField analytic(ChartDomain dom, CoeffFn coeff, JetFn jet, bool fermi = true,
                              NormalJetFn normal = nullptr);
  static MetricField finite_difference(ChartDomain dom, CoeffFn coeff, FdConfig cfg = {},
                                       bool fermi = true);

  const ChartDomain& domain() const { return dom_; }
  int n() const { return dom_.n; }
  bool fermi_claimed() const { return fermi_; }
  bool has_analytic_derivatives() const { return static_cast<bool>(jet_); }
  const FdConfig& fd_config() const { return fd_; }

  Mat value(const Vec& x) const { return coeff_(x); }
  MetricJet jet(const Vec& x, DifferentiationReport* report = nullptr) const;
  NormalJet normal_jet(const Vec& x) const;

  // Same coefficients, finite-difference derivatives with the given stencil.
  MetricField with_fd(FdConfig cfg) const;

 private:
  ChartDomain dom_;
  CoeffFn coeff_;
  JetFn jet_;
  NormalJetFn normal_;
  FdConfig fd_;
  bool fermi_ = true;

  Vec steps() const;
  void check_clearance(const Vec& x, double reach) const;
  MetricJet fd_jet(const Vec& x, DifferentiationReport* report) const;
};

// Largest |g_in - delta_in| at x.
double fermi_defect(const Mat& g);

}  // namespace curvglue
