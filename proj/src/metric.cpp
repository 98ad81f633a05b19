#include "curvglue/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curvglue {

ChartDomain::ChartDomain(int n_, std::vector<std::pair<double, double>> box_)
    : n(n_), box(std::move(box_)) {
  if (n < 2) throw DomainError("ChartDomain: n must be at least 2");
  if (static_cast<int>(box.size()) != n) throw DomainError("ChartDomain: box has wrong arity");
  for (auto& [lo, hi] : box)
    if (!(lo < hi)) throw DomainError("ChartDomain: empty box interval");
}

bool ChartDomain::contains(const Vec& x, double margin) const {
  for (int i = 0; i < n; ++i)
    if (x(i) < box[i].first + margin || x(i) > box[i].second - margin) return false;
  return true;
}

MetricJet::MetricJet(int n)
    : g(Mat::Zero(n, n)), dg(n, Mat::Zero(n, n)), d2g(static_cast<size_t>(n) * n, Mat::Zero(n, n)) {}

MetricJet& MetricJet::operator+=(const MetricJet& o) {
  g += o.g;
  for (size_t i = 0; i < dg.size(); ++i) dg[i] += o.dg[i];
  for (size_t i = 0; i < d2g.size(); ++i) d2g[i] += o.d2g[i];
  return *this;
}

MetricJet& MetricJet::operator*=(double s) {
  g *= s;
  for (auto& m : dg) m *= s;
  for (auto& m : d2g) m *= s;
  return *this;
}

MetricField MetricField::analytic(ChartDomain dom, CoeffFn coeff, JetFn jet, bool fermi,
                                  NormalJetFn normal) {
  MetricField m;
  m.dom_ = std::move(dom);
  m.coeff_ = std::move(coeff);
  m.jet_ = std::move(jet);
  m.normal_ = std::move(normal);
  m.fermi_ = fermi;
  return m;
}

MetricField MetricField::finite_difference(ChartDomain dom, CoeffFn coeff, FdConfig cfg, bool fermi) {
  MetricField m;
  m.dom_ = std::move(dom);
  m.coeff_ = std::move(coeff);
  m.fd_ = cfg;
  m.fermi_ = fermi;
  return m;
}

MetricField MetricField::with_fd(FdConfig cfg) const {
  return finite_difference(dom_, coeff_, cfg, fermi_);
}

Vec MetricField::steps() const {
  Vec h(dom_.n);
  for (int i = 0; i < dom_.n; ++i) h(i) = fd_.rel_step * dom_.extent(i);
  return h;
}

void MetricField::check_clearance(const Vec& x, double reach) const {
  const Vec h = steps();
  for (int i = 0; i < dom_.n; ++i) {
    const double r = reach * h(i);
    if (x(i) - r < dom_.box[i].first || x(i) + r > dom_.box[i].second) {
      std::ostringstream os;
      os << "finite-difference stencil leaves the chart box on axis " << i + 1 << " at x = " << x(i);
      throw StencilClearanceError(os.str());
    }
  }
}

namespace {

struct Stencil {
  const CoeffFn& f;
  Vec x;
  Mat at(int i, double si, int j, double sj) const {
    Vec y = x;
    y(i) += si;
    if (j >= 0) y(j) += sj;
    return f(y);
  }
};

void symmetrize_jet(MetricJet& J) {
  J.g = 0.5 * (J.g + J.g.transpose());
  for (auto& m : J.dg) m = 0.5 * (m + m.transpose());
  for (auto& m : J.d2g) m = 0.5 * (m + m.transpose());
}

}  // namespace

MetricJet MetricField::fd_jet(const Vec& x, DifferentiationReport* report) const {
  const int n = dom_.n;
  const Vec h = steps();
  const bool need_coarse = fd_.richardson || report != nullptr;
  check_clearance(x, need_coarse ? 2.0 : 1.0);
  Stencil s{coeff_, x};
  MetricJet J(n);
  J.g = coeff_(x);
  double e1 = 0.0, e2 = 0.0;
  auto combine = [&](const Mat& fine, const Mat& coarse, double& err) -> Mat {
    err = std::max(err, (fine - coarse).cwiseAbs().maxCoeff() / 3.0);
    return fd_.richardson ? Mat((4.0 * fine - coarse) / 3.0) : fine;
  };
  std::vector<Mat> plus(n), minus(n), plus2(n), minus2(n);
  for (int i = 0; i < n; ++i) {
    plus[i] = s.at(i, h(i), -1, 0);
    minus[i] = s.at(i, -h(i), -1, 0);
    const Mat d1 = (plus[i] - minus[i]) / (2 * h(i));
    const Mat d2 = (plus[i] - 2 * J.g + minus[i]) / (h(i) * h(i));
    if (need_coarse) {
      plus2[i] = s.at(i, 2 * h(i), -1, 0);
      minus2[i] = s.at(i, -2 * h(i), -1, 0);
      const Mat c1 = (plus2[i] - minus2[i]) / (4 * h(i));
      const Mat c2 = (plus2[i] - 2 * J.g + minus2[i]) / (4 * h(i) * h(i));
      J.dg[i] = combine(d1, c1, e1);
      J.dd(i, i) = combine(d2, c2, e2);
    } else {
      J.dg[i] = d1;
      J.dd(i, i) = d2;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Mat fine = (s.at(i, h(i), j, h(j)) - s.at(i, h(i), j, -h(j)) - s.at(i, -h(i), j, h(j)) +
                        s.at(i, -h(i), j, -h(j))) /
                       (4 * h(i) * h(j));
      Mat mixed = fine;
      if (need_coarse) {
        const Mat coarse = (s.at(i, 2 * h(i), j, 2 * h(j)) - s.at(i, 2 * h(i), j, -2 * h(j)) -
                            s.at(i, -2 * h(i), j, 2 * h(j)) + s.at(i, -2 * h(i), j, -2 * h(j))) /
                           (16 * h(i) * h(j));
        mixed = combine(fine, coarse, e2);
      }
      J.dd(i, j) = mixed;
      J.dd(j, i) = mixed;
    }
  symmetrize_jet(J);
  if (report) {
    report->first_order_error = e1;
    report->second_order_error = e2;
    report->steps = h;
  }
  return J;
}

MetricJet MetricField::jet(const Vec& x, DifferentiationReport* report) const {
  if (x.size() != dom_.n) throw DomainError("MetricField::jet: point has wrong dimension");
  if (jet_) {
    if (report) {
      report->first_order_error = 0.0;
      report->second_order_error = 0.0;
      report->steps = Vec::Zero(dom_.n);
    }
    return jet_(x);
  }
  return fd_jet(x, report);
}

NormalJet MetricField::normal_jet(const Vec& x) const {
  if (normal_) return normal_(x);
  const int k = dom_.n - 1;
  if (jet_) {
    MetricJet J = jet_(x);
    return {J.g, J.dg[k], J.dd(k, k)};
  }
  const double h = steps()(k);
  check_clearance(x, fd_.richardson ? 2.0 : 1.0);
  Stencil s{coeff_, x};
  NormalJet out;
  out.g = coeff_(x);
  const Mat p = s.at(k, h, -1, 0), m = s.at(k, -h, -1, 0);
  out.dn = (p - m) / (2 * h);
  out.dnn = (p - 2 * out.g + m) / (h * h);
  if (fd_.richardson) {
    const Mat p2 = s.at(k, 2 * h, -1, 0), m2 = s.at(k, -2 * h, -1, 0);
    out.dn = (4 * out.dn - (p2 - m2) / (4 * h)) / 3.0;
    out.dnn = (4 * out.dnn - (p2 - 2 * out.g + m2) / (4 * h * h)) / 3.0;
  }
  return out;
}

double fermi_defect(const Mat& g) {
  const int n = static_cast<int>(g.rows());
  double d = std::abs(g(n - 1, n - 1) - 1.0);
  for (int i = 0; i < n - 1; ++i) d = std::max({d, std::abs(g(i, n - 1)), std::abs(g(n - 1, i))});
  return d;
}

}  // namespace curvglue
