#include "curvglue/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace curvglue {

double triweight(double z) {
  if (z <= -1.0 || z >= 1.0) return 0.0;
  const double w = 1.0 - z * z;
  return 35.0 / 32.0 * w * w * w;
}

const Quadrature& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  if (order < 1) throw DomainError("gauss_legendre: order must be positive");
  // Golub-Welsch: eigenvalues of the Jacobi matrix are the nodes.
  Mat J = Mat::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  Quadrature q;
  for (int i = 0; i < order; ++i) {
    q.nodes.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    q.weights.push_back(2.0 * v * v);
  }
  return cache.emplace(order, std::move(q)).first->second;
}

namespace {

// Sub-intervals of [a, b] split at the breakpoints that fall inside.
std::vector<std::pair<double, double>> pieces(double a, double b, const std::vector<double>& breaks) {
  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<double, double>> out;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) out.emplace_back(cuts[i], cuts[i + 1]);
  return out;
}

}  // namespace

double convolve_1d(const std::function<double(double)>& f, double t, double h, const std::vector<double>& breakpoints,
                   int order) {
  if (!(h > 0.0)) throw DomainError("convolve_1d: h must be positive");
  const Quadrature& q = gauss_legendre(order);
  double acc = 0.0;
  for (auto [a, b] : pieces(t - h, t + h, breakpoints)) {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    for (size_t i = 0; i < q.nodes.size(); ++i) {
      const double tau = c + r * q.nodes[i];
      acc += r * q.weights[i] * triweight((t - tau) / h) / h * f(tau);
    }
  }
  return acc;
}

double near_cutoff(double t, double h, int order) {
  const double u = (t - h) / h;
  if (u <= 0.0 || u >= 1.0) return order == 0 ? (u <= 0.0 ? 1.0 : 0.0) : 0.0;
  switch (order) {
    case 0: return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    case 1: return -30.0 * u * u * (1.0 - u) * (1.0 - u) / h;
    default: return -60.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / (h * h);
  }
}

SmoothedMetric::SmoothedMetric(const GluedMetric& glued, MollifierConfig cfg)
    : glued_(std::make_shared<const GluedMetric>(glued)), cfg_(cfg) {
  const double d = glued.delta();
  if (!(cfg.h > 0.0)) throw DomainError("mollify: h must be positive");
  if (!(cfg.h < d / 4.0)) {
    std::ostringstream os;
    os << "mollify: h = " << cfg.h << " must be below delta/4 = " << d / 4.0;
    throw DomainError(os.str());
  }
  if (!(cfg.h < glued.collar().width / 4.0)) throw DomainError("mollify: h must be below a quarter of the collar width");
  g1p_ = std::make_shared<const MetricField>(extend_g1_prime(glued.collar()));
  breaks_ = glued.modified().profile.breakpoints();
  breaks_.push_back(0.0);
}

template <class F>
void SmoothedMetric::integrate(double t, const F& f) const {
  const double h = cfg_.h;
  const double lo = std::max(0.0, t - h), hi = t + h;
  if (hi <= lo) return;
  const Quadrature& q = gauss_legendre(cfg_.order);
  for (auto [a, b] : pieces(lo, hi, breaks_)) {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    for (size_t i = 0; i < q.nodes.size(); ++i) {
      const double tau = c + r * q.nodes[i];
      f(tau, r * q.weights[i] * triweight((t - tau) / h) / h);
    }
  }
}

Mat SmoothedMetric::value(const Vec& x) const {
  const int k = static_cast<int>(x.size()) - 1;
  const double t = x(k);
  const MetricField& gd = glued_->modified().g_delta;
  const bool blend = cfg_.partition && t > 0.0;
  if (blend && t >= 2.0 * cfg_.h) return gd.value(x);
  Mat conv = Mat::Zero(x.size(), x.size());
  Vec y = x;
  integrate(t, [&](double tau, double w) {
    y(k) = tau;
    conv += w * (gd.value(y) - g1p_->value(y));
  });
  Mat g;
  if (t <= 0.0) {
    g = glued_->collar().g1.value(x) + conv;
  } else if (!blend) {
    g = g1p_->value(x) + conv;
  } else {
    const Mat gdx = gd.value(x);
    g = gdx + near_cutoff(t, cfg_.h) * (conv - (gdx - g1p_->value(x)));
  }
  return 0.5 * (g + g.transpose());
}

MetricJet SmoothedMetric::jet(const Vec& x) const {
  const int n = static_cast<int>(x.size()), k = n - 1;
  const double t = x(k);
  const MetricField& gd = glued_->modified().g_delta;
  const bool blend = cfg_.partition && t > 0.0;
  if (blend && t >= 2.0 * cfg_.h) return gd.jet(x);
  auto difference = [&](const Vec& y) {
    MetricJet D = gd.jet(y);
    MetricJet B = g1p_->jet(y);
    B *= -1.0;
    D += B;
    return D;
  };
  MetricJet conv(n);
  Vec y = x;
  integrate(t, [&](double tau, double w) {
    y(k) = tau;
    MetricJet D = difference(y);
    D *= w;
    conv += D;
  });
  if (t <= 0.0 || !blend) {
    MetricJet J = t <= 0.0 ? glued_->collar().g1.jet(x) : g1p_->jet(x);
    J += conv;
    return J;
  }
  // g^h = g_delta + eta E with E = conv - D; eta depends on x^n only.
  MetricJet E = difference(x);
  E *= -1.0;
  E += conv;
  const double e0 = near_cutoff(t, cfg_.h, 0), e1 = near_cutoff(t, cfg_.h, 1), e2 = near_cutoff(t, cfg_.h, 2);
  MetricJet J = gd.jet(x);
  J.g += e0 * E.g;
  for (int a = 0; a < n; ++a) J.dg[a] += e0 * E.dg[a];
  J.dg[k] += e1 * E.g;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Mat d = e0 * E.dd(a, b);
      if (a == k && b == k) {
        d += e2 * E.g + 2.0 * e1 * E.dg[k];
      } else if (a == k || b == k) {
        d += e1 * E.dg[a == k ? b : a];
      }
      J.dd(a, b) += d;
    }
  return J;
}

MetricField SmoothedMetric::field() const {
  auto self = std::make_shared<const SmoothedMetric>(*this);
  return MetricField::analytic(
      glued_->collar().g0.domain(), [self](const Vec& x) { return self->value(x); },
      [self](const Vec& x) { return self->jet(x); }, true);
}

SmoothedMetric mollify(const GluedMetric& glued, const MollifierConfig& cfg) { return SmoothedMetric(glued, cfg); }

PerturbationReport curvature_perturbation(const SmoothedMetric& sm, double kappa, const std::vector<Vec>& points) {
  PerturbationReport r;
  r.worst_slack = std::numeric_limits<double>::infinity();
  for (const Vec& x : points) {
    const MetricJet J = sm.jet(x);
    Eigen::SelfAdjointEigenSolver<Mat> es(J.g);
    if (!(es.eigenvalues()(0) > 0.0)) throw DomainError("mollify: smoothed metric lost positive definiteness");
    const double s = min_eig(curvature_operator(J)) - kappa;
    if (s < r.worst_slack) {
      r.worst_slack = s;
      r.argmin = x;
    }
    r.sup_dist = std::max(r.sup_dist, (J.g - sm.glued().value(x)).cwiseAbs().maxCoeff());
  }
  return r;
}

}  // namespace curvglue
