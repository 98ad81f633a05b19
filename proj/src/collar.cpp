#include "curvglue/collar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curvglue/curvature.hpp"

namespace curvglue {

namespace {

Mat tang(const Mat& m) {
  const int k = static_cast<int>(m.rows()) - 1;
  return m.topLeftCorner(k, k);
}

Mat embed(const Mat& t, int n) {
  Mat m = Mat::Zero(n, n);
  m.topLeftCorner(n - 1, n - 1) = t;
  return m;
}

Mat sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Vec CollarData::point(const Vec& xhat, double t) const {
  Vec x(xhat.size() + 1);
  x.head(xhat.size()) = xhat;
  x(xhat.size()) = t;
  return x;
}

CollarValidation validate_collar(const CollarData& c) {
  CollarValidation v;
  for (const Vec& u : c.boundary_samples) {
    const Vec x = c.point(u, 0.0);
    v.isometry_defect = std::max(v.isometry_defect, max_abs(c.g0.value(x) - c.g1.value(x)));
    for (double s : {0.0, 0.5, 1.0}) {
      v.fermi_defect = std::max(v.fermi_defect, fermi_defect(c.g0.value(c.point(u, s * c.width))));
      v.fermi_defect = std::max(v.fermi_defect, fermi_defect(c.g1.value(c.point(u, -s * c.width))));
    }
  }
  return v;
}

CollarData make_collar(MetricField g0, MetricField g1, double width, int samples_per_axis) {
  if (g0.n() != g1.n()) throw DomainError("make_collar: dimension mismatch between sides");
  if (!(width > 0.0)) throw DomainError("make_collar: collar width must be positive");
  if (samples_per_axis < 1) throw DomainError("make_collar: need at least one sample per axis");
  const int n = g0.n();
  const int k = g0.domain().normal_axis();
  if (g0.domain().box[k].second < width)
    throw DomainError("make_collar: M0 chart does not cover the collar width");
  if (g1.domain().box[k].first >= 0.0) throw DomainError("make_collar: M1 chart must extend below x^n = 0");
  CollarData c{std::move(g0), std::move(g1), width, {}};
  // Tensor grid of interior tangential points.
  std::vector<int> idx(n - 1, 0);
  while (true) {
    Vec u(n - 1);
    for (int a = 0; a < n - 1; ++a) {
      const auto [lo, hi] = c.g0.domain().box[a];
      u(a) = lo + (hi - lo) * (idx[a] + 1) / (samples_per_axis + 1);
    }
    c.boundary_samples.push_back(u);
    int a = 0;
    while (a < n - 1 && ++idx[a] == samples_per_axis) idx[a++] = 0;
    if (a == n - 1) break;
  }
  const CollarValidation v = validate_collar(c);
  if (v.isometry_defect > 1e-10) {
    std::ostringstream os;
    os << "make_collar: boundary metrics differ by " << v.isometry_defect << " (tolerance 1e-10)";
    throw DomainError(os.str());
  }
  if (v.fermi_defect > 1e-12) {
    std::ostringstream os;
    os << "make_collar: Fermi form violated by " << v.fermi_defect << " (tolerance 1e-12)";
    throw DomainError(os.str());
  }
  return c;
}

Mat second_ff(Side side, const CollarData& c, const Vec& xhat) {
  const MetricField& g = side == Side::M0 ? c.g0 : c.g1;
  const Vec x = c.point(xhat, 0.0);
  const NormalJet nj = g.normal_jet(x);
  if (fermi_defect(nj.g) > 1e-12) throw DomainError("second_ff: metric is not in Fermi form at the boundary");
  const Mat dn = sym(tang(nj.dn));
  return side == Side::M0 ? Mat(-0.5 * dn) : Mat(0.5 * dn);
}

Mat combined_L(const CollarData& c, const Vec& xhat) {
  return second_ff(Side::M0, c, xhat) + second_ff(Side::M1, c, xhat);
}

ExtendedShape::ExtendedShape(const CollarData& c, BoundaryShapeFn L_on_boundary)
    : collar_(std::make_shared<const CollarData>(c)), L0_(std::move(L_on_boundary)) {
  if (!L0_) {
    auto col = collar_;
    L0_ = [col](const Vec& xhat) { return combined_L(*col, xhat); };
  }
  step_ = c.width / 64.0;
  const int k = c.g0.domain().normal_axis();
  // Finite-difference stencils of g0 need clearance below the box top.
  const double clearance =
      c.g0.has_analytic_derivatives() ? 0.0 : 2.0 * c.g0.fd_config().rel_step * c.g0.domain().extent(k);
  reach_ = std::min(1.25 * c.width, c.g0.domain().box[k].second - 1.01 * clearance);
  tangential_steps_ = Vec(c.n() - 1);
  for (int a = 0; a < c.n() - 1; ++a) tangential_steps_(a) = 1e-4 * c.g0.domain().extent(a);
}

Mat ExtendedShape::rhs(const Vec& xhat, double t, const Mat& L) const {
  const NormalJet nj = collar_->g0.normal_jet(collar_->point(xhat, t));
  const Mat M = tang(nj.g).ldlt().solve(tang(nj.dn));
  return 0.5 * (M.transpose() * L + L * M);
}

Mat ExtendedShape::rk4(const Vec& xhat, double t, double h, const Mat& L) const {
  const Mat k1 = rhs(xhat, t, L);
  const Mat k2 = rhs(xhat, t + 0.5 * h, L + 0.5 * h * k1);
  const Mat k3 = rhs(xhat, t + 0.5 * h, L + 0.5 * h * k2);
  const Mat k4 = rhs(xhat, t + h, L + h * k3);
  return sym(L + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4));
}

std::shared_ptr<ExtendedShape::Line> ExtendedShape::line(const Vec& xhat) const {
  std::vector<double> key(xhat.data(), xhat.data() + xhat.size());
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto ln = std::make_shared<Line>();
  const int K = static_cast<int>(std::floor(reach_ / step_ + 1e-9));
  ln->values.reserve(K + 1);
  ln->values.push_back(sym(L0_(xhat)));
  for (int i = 0; i < K; ++i) ln->values.push_back(rk4(xhat, i * step_, step_, ln->values.back()));
  std::lock_guard<std::mutex> lk(mu_);
  return cache_.emplace(std::move(key), ln).first->second;
}

Mat ExtendedShape::solve(const Vec& xhat, double t) const {
  if (t < 0.0) {
    if (t < -1e-14) throw DomainError("ExtendedShape: the extension is defined on the M0 side only");
    t = 0.0;
  }
  auto ln = line(xhat);
  const double kmax = static_cast<double>(ln->values.size() - 1);
  if (t > reach_ * (1 + 1e-12)) throw DomainError("ExtendedShape: transport leaves the chart box");
  const int k = std::min(static_cast<int>(std::floor(t / step_)), static_cast<int>(kmax));
  const double r = t - k * step_;
  if (r <= 1e-15 * std::max(1.0, t)) return ln->values[k];
  return rk4(xhat, k * step_, r, ln->values[k]);
}

Mat ExtendedShape::value(const Vec& x) const {
  const int n = collar_->n();
  return embed(solve(x.head(n - 1), x(n - 1)), n);
}

Mat ExtendedShape::endomorphism(const Vec& x) const {
  return collar_->g0.value(x).ldlt().solve(value(x));
}

ShapeNormalJet ExtendedShape::normal_jet(const Vec& x) const {
  const int n = collar_->n();
  const Vec xhat = x.head(n - 1);
  const double t = x(n - 1);
  const Mat L = solve(xhat, t);
  const NormalJet nj = collar_->g0.normal_jet(collar_->point(xhat, std::max(t, 0.0)));
  const auto ldlt = tang(nj.g).ldlt();
  const Mat M = ldlt.solve(tang(nj.dn));
  const Mat Mp = ldlt.solve(tang(nj.dnn)) - M * M;
  const Mat Lp = 0.5 * (M.transpose() * L + L * M);
  const Mat Lpp = 0.5 * (Mp.transpose() * L + M.transpose() * Lp + Lp * M + L * Mp);
  return {embed(L, n), embed(sym(Lp), n), embed(sym(Lpp), n)};
}

FieldJet ExtendedShape::jet(const Vec& x) const {
  const int n = collar_->n(), k = n - 1;
  FieldJet J(n);
  const ShapeNormalJet c = normal_jet(x);
  J.g = c.L;
  J.dg[k] = c.dn;
  J.dd(k, k) = c.dnn;
  auto shifted = [&](int a, double sa, int b, double sb) {
    Vec y = x;
    y(a) += sa;
    if (b >= 0) y(b) += sb;
    return y;
  };
  for (int a = 0; a < k; ++a) {
    const double h = tangential_steps_(a);
    const ShapeNormalJet p = normal_jet(shifted(a, h, -1, 0)), m = normal_jet(shifted(a, -h, -1, 0));
    J.dg[a] = (p.L - m.L) / (2 * h);
    J.dd(a, a) = (p.L - 2 * c.L + m.L) / (h * h);
    J.dd(a, k) = (p.dn - m.dn) / (2 * h);
    J.dd(k, a) = J.dd(a, k);
  }
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      const double ha = tangential_steps_(a), hb = tangential_steps_(b);
      const Mat v = (value(shifted(a, ha, b, hb)) - value(shifted(a, ha, b, -hb)) -
                     value(shifted(a, -ha, b, hb)) + value(shifted(a, -ha, b, -hb))) /
                    (4 * ha * hb);
      J.dd(a, b) = v;
      J.dd(b, a) = v;
    }
  return J;
}

std::shared_ptr<ExtendedShape> extend_L(const CollarData& c, BoundaryShapeFn L_on_boundary) {
  return std::make_shared<ExtendedShape>(c, std::move(L_on_boundary));
}

namespace {

double taylor_step(const CollarData& c) { return c.width / 32.0; }

}  // namespace

TaylorCoefficients g1_taylor(const CollarData& c, const Vec& xhat) {
  const int k = c.n() - 1;
  const double s = taylor_step(c);
  const MetricJet J0 = c.g1.jet(c.point(xhat, 0.0));
  const Mat d0 = J0.dd(k, k);
  const Mat d1 = c.g1.normal_jet(c.point(xhat, -s)).dnn;
  const Mat d2 = c.g1.normal_jet(c.point(xhat, -2 * s)).dnn;
  TaylorCoefficients T;
  T.a = {J0.g, J0.dg[k], 0.5 * d0, (3 * d0 - 4 * d1 + d2) / (2 * s) / 6.0, (d0 - 2 * d1 + d2) / (s * s) / 24.0};
  return T;
}

MetricField extend_g1_prime(const CollarData& c) {
  const int n = c.n(), k = n - 1;
  const double s = taylor_step(c);
  const auto& box1 = c.g1.domain().box;
  double reach = 2 * s;
  if (!c.g1.has_analytic_derivatives())
    reach += (c.g1.fd_config().richardson ? 2.0 : 1.0) * c.g1.fd_config().rel_step * c.g1.domain().extent(k);
  if (box1[k].first > -reach)
    throw DomainError("extend_g1_prime: insufficient derivative data below the interface");
  auto box = c.g1.domain().box;
  box[k] = {box1[k].first, c.g0.domain().box[k].second};
  ChartDomain dom(n, box);
  auto col = std::make_shared<const CollarData>(c);
  Vec hs(k);
  for (int a = 0; a < k; ++a) hs(a) = 1e-4 * dom.extent(a);

  // Fermi block is forced exactly: every normal derivative of delta_in vanishes.
  auto fermi_fix = [n](Mat& m, double diag) {
    m.row(n - 1).setZero();
    m.col(n - 1).setZero();
    m(n - 1, n - 1) = diag;
  };
  auto poly = [](const TaylorCoefficients& T, double t, int order) {
    Mat r = Mat::Zero(T.a[0].rows(), T.a[0].cols());
    for (int m = order; m <= 4; ++m) {
      double c = std::pow(t, m - order);
      for (int q = 0; q < order; ++q) c *= (m - q);
      r += c * T.a[m];
    }
    return r;
  };
  auto coeff = [col, poly, fermi_fix, k](const Vec& x) {
    Mat g = poly(g1_taylor(*col, x.head(k)), x(k), 0);
    fermi_fix(g, 1.0);
    return g;
  };
  auto normal = [col, poly, fermi_fix, k](const Vec& x) {
    const TaylorCoefficients T = g1_taylor(*col, x.head(k));
    NormalJet nj{poly(T, x(k), 0), poly(T, x(k), 1), poly(T, x(k), 2)};
    fermi_fix(nj.g, 1.0);
    fermi_fix(nj.dn, 0.0);
    fermi_fix(nj.dnn, 0.0);
    return nj;
  };
  auto jet = [col, poly, fermi_fix, n, k, hs](const Vec& x) {
    const double t = x(k);
    const Vec xhat = x.head(k);
    const MetricJet J0 = col->g1.jet(col->point(xhat, 0.0));
    MetricJet J(n);
    if (t == 0.0) {
      J = J0;
    } else {
      const TaylorCoefficients T = g1_taylor(*col, xhat);
      J.g = poly(T, t, 0);
      J.dg[k] = poly(T, t, 1);
      J.dd(k, k) = poly(T, t, 2);
      auto at = [&](int a, double sa, int b, double sb) {
        Vec u = xhat;
        u(a) += sa;
        if (b >= 0) u(b) += sb;
        return g1_taylor(*col, u);
      };
      std::vector<TaylorCoefficients> P(k), M(k);
      for (int a = 0; a < k; ++a) {
        P[a] = at(a, hs(a), -1, 0);
        M[a] = at(a, -hs(a), -1, 0);
      }
      for (int a = 0; a < k; ++a) {
        const double h = hs(a);
        // a0 and the first tangential derivative of a1 are exact jet entries.
        Mat d1 = J0.dg[a] + t * J0.dd(a, k);
        Mat d11 = J0.dd(a, a) + t * (P[a].a[1] - 2 * T.a[1] + M[a].a[1]) / (h * h);
        Mat dn1 = J0.dd(a, k);
        for (int m = 2; m <= 4; ++m) {
          const Mat da = (P[a].a[m] - M[a].a[m]) / (2 * h);
          d1 += std::pow(t, m) * da;
          d11 += std::pow(t, m) * (P[a].a[m] - 2 * T.a[m] + M[a].a[m]) / (h * h);
          dn1 += m * std::pow(t, m - 1) * da;
        }
        J.dg[a] = d1;
        J.dd(a, a) = d11;
        J.dd(a, k) = dn1;
        J.dd(k, a) = dn1;
      }
      for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
          const double ha = hs(a), hb = hs(b);
          const TaylorCoefficients pp = at(a, ha, b, hb), pm = at(a, ha, b, -hb), mp = at(a, -ha, b, hb),
                                   mm = at(a, -ha, b, -hb);
          Mat v = J0.dd(a, b);
          for (int m = 1; m <= 4; ++m)
            v += std::pow(t, m) * (pp.a[m] - pm.a[m] - mp.a[m] + mm.a[m]) / (4 * ha * hb);
          J.dd(a, b) = v;
          J.dd(b, a) = v;
        }
    }
    fermi_fix(J.g, 1.0);
    for (auto& m : J.dg) fermi_fix(m, 0.0);
    for (auto& m : J.d2g) fermi_fix(m, 0.0);
    for (auto& m : J.dg) m = sym(m);
    for (auto& m : J.d2g) m = sym(m);
    J.g = sym(J.g);
    return J;
  };
  return MetricField::analytic(dom, coeff, jet, true, normal);
}

namespace {

struct GeodesicState {
  Vec y, v;
};

GeodesicState geodesic_rhs(const MetricField& g, const GeodesicState& s) {
  const Christoffel G = christoffels(g, s.y);
  const int n = g.n();
  GeodesicState d{s.v, Vec::Zero(n)};
  for (int c = 0; c < n; ++c) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += G(c, i, j) * s.v(i) * s.v(j);
    d.v(c) = -acc;
  }
  return d;
}

GeodesicState shoot(const MetricField& g, GeodesicState s, double t, double max_step) {
  const int N = std::max(1, static_cast<int>(std::ceil(std::abs(t) / max_step - 1e-12)));
  const double h = t / N;
  auto axpy = [](const GeodesicState& a, double c, const GeodesicState& b) {
    return GeodesicState{a.y + c * b.y, a.v + c * b.v};
  };
  for (int i = 0; i < N; ++i) {
    const GeodesicState k1 = geodesic_rhs(g, s);
    const GeodesicState k2 = geodesic_rhs(g, axpy(s, 0.5 * h, k1));
    const GeodesicState k3 = geodesic_rhs(g, axpy(s, 0.5 * h, k2));
    const GeodesicState k4 = geodesic_rhs(g, axpy(s, h, k3));
    s.y += h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
    s.v += h / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
  }
  return s;
}

// Tangent vectors of the embedding as columns, by central differences.
Mat tangents(const BoundaryEmbedding& b, const Vec& u, const Vec& hu) {
  const Vec p0 = b.point(u);
  Mat T(p0.size(), u.size());
  for (int a = 0; a < u.size(); ++a) {
    Vec up = u, um = u;
    up(a) += hu(a);
    um(a) -= hu(a);
    T.col(a) = (b.point(up) - b.point(um)) / (2 * hu(a));
  }
  return T;
}

Vec unit_normal(const MetricField& g, const BoundaryEmbedding& b, const Vec& u, const Vec& hu) {
  const Vec p = b.point(u);
  const Mat T = tangents(b, u, hu);
  const int n = static_cast<int>(p.size());
  // Euclidean conormal: the null vector of T^T, oriented so det[T | w] > 0.
  Eigen::FullPivHouseholderQR<Mat> qr(T);
  Vec w = Mat(qr.matrixQ()).col(n - 1);
  Mat full(n, n);
  full << T, w;
  if (full.determinant() < 0) w = -w;
  const Mat G = g.value(p);
  Vec nu = G.ldlt().solve(w);
  nu /= std::sqrt(nu.dot(G * nu));
  return b.orientation >= 0 ? nu : Vec(-nu);
}

}  // namespace

FermiChart fermi_from_general(const MetricField& g, const BoundaryEmbedding& b,
                              std::vector<std::pair<double, double>> u_box, double width) {
  const int n = g.n();
  if (static_cast<int>(u_box.size()) != n - 1) throw DomainError("fermi_from_general: u_box has wrong arity");
  if (!(width > 0.0)) throw DomainError("fermi_from_general: width must be positive");
  Vec hu(n - 1);
  for (int a = 0; a < n - 1; ++a) hu(a) = 1e-4 * (u_box[a].second - u_box[a].first);

  auto flow = std::make_shared<std::function<GeodesicState(const Vec&, double)>>();
  double w = width;
  *flow = [&g, b, hu, &w](const Vec& u, double t) {
    GeodesicState s{b.point(u), unit_normal(g, b, u, hu)};
    return shoot(g, s, t, w / 64.0);
  };
  auto map = [flow](const Vec& x) {
    const int k = static_cast<int>(x.size()) - 1;
    return (*flow)(x.head(k), x(k)).y;
  };
  auto jacobian = [&](const Vec& u, double t) {
    Mat Jm(n, n);
    for (int a = 0; a < n - 1; ++a) {
      Vec up = u, um = u;
      up(a) += hu(a);
      um(a) -= hu(a);
      Jm.col(a) = ((*flow)(up, t).y - (*flow)(um, t).y) / (2 * hu(a));
    }
    Jm.col(n - 1) = (*flow)(u, t).v;
    return Jm;
  };

  // Sample grid for the focal-point monitor.
  std::vector<Vec> us;
  {
    const int per = 3;
    std::vector<int> idx(n - 1, 0);
    while (true) {
      Vec u(n - 1);
      for (int a = 0; a < n - 1; ++a)
        u(a) = u_box[a].first + (u_box[a].second - u_box[a].first) * (idx[a] + 1) / (per + 1);
      us.push_back(u);
      int a = 0;
      while (a < n - 1 && ++idx[a] == per) idx[a++] = 0;
      if (a == n - 1) break;
    }
  }
  bool shrunk = false;
  for (int attempt = 0; attempt < 30; ++attempt) {
    bool ok = true;
    for (const Vec& u : us) {
      const double d0 = jacobian(u, 0.0).determinant();
      for (int i = 1; i <= 8 && ok; ++i) {
        const double r = jacobian(u, w * i / 8.0).determinant() / d0;
        if (!(r > 0.05)) ok = false;
      }
      if (!ok) break;
    }
    if (ok) break;
    w *= 0.5;
    shrunk = true;
  }

  // Freeze the final width into the flow and own the metric.
  const double wf = w;
  auto gcopy = std::make_shared<MetricField>(g);
  *flow = [gcopy, b, hu, wf](const Vec& u, double t) {
    GeodesicState s{b.point(u), unit_normal(*gcopy, b, u, hu)};
    return shoot(*gcopy, s, t, wf / 64.0);
  };
  auto raw = [flow, gcopy, hu, n](const Vec& x) {
    const Vec u = x.head(n - 1);
    const double t = x(n - 1);
    Mat Jm(n, n);
    for (int a = 0; a < n - 1; ++a) {
      Vec up = u, um = u;
      up(a) += hu(a);
      um(a) -= hu(a);
      Jm.col(a) = ((*flow)(up, t).y - (*flow)(um, t).y) / (2 * hu(a));
    }
    const GeodesicState s = (*flow)(u, t);
    Jm.col(n - 1) = s.v;
    const Mat G = Jm.transpose() * gcopy->value(s.y) * Jm;
    return Mat(0.5 * (G + G.transpose()));
  };
  FermiChart out;
  for (const Vec& u : us)
    for (double f : {0.0, 0.5, 1.0}) {
      Vec x(n);
      x << u, f * wf;
      out.raw_fermi_defect = std::max(out.raw_fermi_defect, fermi_defect(raw(x)));
    }
  auto coeff = [raw, n](const Vec& x) {
    Mat G = raw(x);
    G.row(n - 1).setZero();
    G.col(n - 1).setZero();
    G(n - 1, n - 1) = 1.0;
    return G;
  };
  auto box = u_box;
  box.emplace_back(-0.25 * wf, wf);
  out.metric = MetricField::finite_difference(ChartDomain(n, box), coeff, FdConfig{1e-3, false}, true);
  out.to_original = map;
  out.width = wf;
  out.shrunk = shrunk;
  return out;
}

}  // namespace curvglue
