#include "curvglue/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curvglue {

namespace {

Mat sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

Mat tang(const Mat& m) {
  const int k = static_cast<int>(m.rows()) - 1;
  return m.topLeftCorner(k, k);
}

Mat zero_normal(Mat m) {
  const int k = static_cast<int>(m.rows()) - 1;
  m.row(k).setZero();
  m.col(k).setZero();
  return m;
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

Mat comm(const Mat& a, const Mat& b) { return a * b - b * a; }

double max_abs_eig(const Lambda2Form& f) { return form_eigenvalues(f).cwiseAbs().maxCoeff(); }

}  // namespace

Mat tangential_projection(const Mat& g) { return zero_normal(g); }

Mat normal_projection(int n) {
  Mat P = Mat::Zero(n, n);
  P(n - 1, n - 1) = 1.0;
  return P;
}

ModifiedMetric build_g_delta(const CollarData& collar, const BumpProfile& profile, double C,
                             std::shared_ptr<const ExtendedShape> L) {
  if (!(C >= 0.0)) throw DomainError("build_g_delta: C must be nonnegative");
  ModifiedMetric m;
  m.collar = std::make_shared<const CollarData>(collar);
  m.L = L ? std::move(L) : extend_L(collar);
  m.profile = profile;
  m.C = C;
  const int n = collar.n(), k = n - 1;
  auto col = m.collar;
  auto Lf = m.L;
  auto prof = std::make_shared<const BumpProfile>(profile);
  auto coeff = [col, Lf, prof, C, k](const Vec& x) {
    const double t = x(k);
    Mat g = col->g0.value(x);
    if (t <= 0.0) return g;
    return Mat(g + 2 * prof->F(t) * Lf->value(x) - 2 * C * prof->FF(t) * tangential_projection(g));
  };
  auto normal = [col, Lf, prof, C, k](const Vec& x) {
    const double t = x(k);
    NormalJet g = col->g0.normal_jet(x);
    if (t < 0.0) return g;
    const ShapeNormalJet L = Lf->normal_jet(x);
    const double F = prof->F(t), f = prof->f(t), df = prof->df(t), FF = prof->FF(t);
    const Mat P = zero_normal(g.g), Pn = zero_normal(g.dn), Pnn = zero_normal(g.dnn);
    NormalJet out;
    out.g = g.g + 2 * F * L.L - 2 * C * FF * P;
    out.dn = g.dn + 2 * (f * L.L + F * L.dn) - 2 * C * (F * P + FF * Pn);
    out.dnn = g.dnn + 2 * (df * L.L + 2 * f * L.dn + F * L.dnn) - 2 * C * (f * P + 2 * F * Pn + FF * Pnn);
    return out;
  };
  auto jet = [col, Lf, prof, C, n, k](const Vec& x) {
    const double t = x(k);
    MetricJet G = col->g0.jet(x);
    if (t < 0.0) return G;
    const FieldJet L = Lf->jet(x);
    const double F = prof->F(t), f = prof->f(t), df = prof->df(t), FF = prof->FF(t);
    MetricJet P(n);
    P.g = zero_normal(G.g);
    for (int a = 0; a < n; ++a) P.dg[a] = zero_normal(G.dg[a]);
    for (size_t a = 0; a < G.d2g.size(); ++a) P.d2g[a] = zero_normal(G.d2g[a]);
    MetricJet out = G;
    out.g += 2 * F * L.g - 2 * C * FF * P.g;
    for (int a = 0; a < n; ++a) {
      if (a == k) {
        out.dg[a] += 2 * (f * L.g + F * L.dg[a]) - 2 * C * (F * P.g + FF * P.dg[a]);
      } else {
        out.dg[a] += 2 * F * L.dg[a] - 2 * C * FF * P.dg[a];
      }
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Mat& d = out.dd(a, b);
        if (a == k && b == k) {
          d += 2 * (df * L.g + 2 * f * L.dg[k] + F * L.dd(k, k)) -
               2 * C * (f * P.g + 2 * F * P.dg[k] + FF * P.dd(k, k));
        } else if (a == k || b == k) {
          const int c = a == k ? b : a;
          d += 2 * (f * L.dg[c] + F * L.dd(a, b)) - 2 * C * (F * P.dg[c] + FF * P.dd(a, b));
        } else {
          d += 2 * F * L.dd(a, b) - 2 * C * FF * P.dd(a, b);
        }
      }
    return out;
  };
  m.g_delta = MetricField::analytic(collar.g0.domain(), coeff, jet, true, normal);
  return m;
}

void check_g_delta_spd(const ModifiedMetric& mod, const std::vector<Vec>& points) {
  for (const Vec& x : points) {
    Eigen::SelfAdjointEigenSolver<Mat> es(mod.g_delta.value(x));
    if (!(es.eigenvalues()(0) > 0.0)) {
      std::ostringstream os;
      os << "g_delta is not positive definite at x = (" << x.transpose() << "), smallest eigenvalue "
         << es.eigenvalues()(0);
      throw DomainError(os.str());
    }
  }
}

GluedMetric::GluedMetric(ModifiedMetric mod) : mod_(std::move(mod)) {}

Mat GluedMetric::value(const Vec& x) const {
  return x(x.size() - 1) >= 0.0 ? mod_.g_delta.value(x) : mod_.collar->g1.value(x);
}

MetricJet GluedMetric::jet(const Vec& x, Side side) const {
  return side == Side::M0 ? mod_.g_delta.jet(x) : mod_.collar->g1.jet(x);
}

MetricJet GluedMetric::jet(const Vec& x) const { return jet(x, x(x.size() - 1) >= 0.0 ? Side::M0 : Side::M1); }

Mat GluedMetric::original(const Vec& x) const {
  return x(x.size() - 1) >= 0.0 ? mod_.collar->g0.value(x) : mod_.collar->g1.value(x);
}

JumpReport interface_jumps(const GluedMetric& glued) {
  JumpReport r;
  const CollarData& c = glued.collar();
  for (const Vec& u : c.boundary_samples) {
    const Vec x = c.point(u, 0.0);
    const NormalJet a = glued.modified().g_delta.normal_jet(x);
    const NormalJet b = c.g1.normal_jet(x);
    r.metric_jump = std::max(r.metric_jump, max_abs(a.g - b.g));
    r.normal_derivative_jump = std::max(r.normal_derivative_jump, max_abs(a.dn - b.dn));
  }
  return r;
}

G1Derivatives g1_normal_derivatives(const CollarData& c, const MetricField& g1_prime, const Vec& x) {
  const NormalJet g0 = c.g0.normal_jet(x);
  const NormalJet g1 = g1_prime.normal_jet(x);
  const int n = c.n();
  const Mat A = g0.g.ldlt().solve(Mat::Identity(n, n));
  const Mat A1 = -A * g0.dn * A;
  const Mat A2 = -A1 * g0.dn * A - A * g0.dnn * A - A * g0.dn * A1;
  const Mat G = A * g1.g;
  const Mat G1 = A1 * g1.g + A * g1.dn;
  const Mat G2 = A2 * g1.g + 2 * A1 * g1.dn + A * g1.dnn;
  const Mat S = 0.5 * A * g0.dn;
  const Mat S1 = 0.5 * (A1 * g0.dn + A * g0.dnn);
  G1Derivatives d;
  d.G = G;
  d.S = S;
  d.dG = G1 + comm(S, G);
  d.ddG = G2 + comm(S1, G) + comm(S, G1) + comm(S, d.dG);
  return d;
}

namespace {

// Covariant tangential blocks (L^2 - 1/2 nabla^2 G1, g) at a boundary point.
std::pair<Mat, Mat> c_pencil(const CollarData& c, const ExtendedShape& L, const MetricField& g1p, const Vec& u) {
  const Vec x = c.point(u, 0.0);
  const Mat g = c.g0.value(x);
  const Mat Lc = L.value(x);
  const Mat L2 = sym(Lc * g.ldlt().solve(Lc));
  const Mat H = sym(g * g1_normal_derivatives(c, g1p, x).ddG);
  return {tang(L2 - 0.5 * H), tang(g)};
}

}  // namespace

ChooseCReport choose_C(const CollarData& c, const ExtendedShape& L, double margin) {
  const MetricField g1p = extend_g1_prime(c);
  ChooseCReport r;
  r.margin = margin;
  r.max_lambda = -std::numeric_limits<double>::infinity();
  for (const Vec& u : c.boundary_samples) {
    auto [M, g] = c_pencil(c, L, g1p, u);
    r.max_lambda = std::max(r.max_lambda, generalized_eigenvalues(M, g).maxCoeff());
  }
  r.C = std::max(0.0, r.max_lambda) + margin;
  return r;
}

double c_condition_slack(const CollarData& c, const ExtendedShape& L, double C) {
  const MetricField g1p = extend_g1_prime(c);
  double slack = std::numeric_limits<double>::infinity();
  for (const Vec& u : c.boundary_samples) {
    auto [M, g] = c_pencil(c, L, g1p, u);
    slack = std::min(slack, generalized_eigenvalues(Mat(-M + C * g), g).minCoeff());
  }
  return slack;
}

Tensor4 b_tensor(const MetricJet& g0, const FieldJet& Lj) {
  const int n = g0.n(), k = n - 1;
  const Christoffel G = christoffels(g0);
  const Mat& L = Lj.g;
  // DL(j, i, l) = (nabla_j L)_il
  std::vector<double> DL(static_cast<size_t>(n) * n * n);
  auto dl = [&](int j, int i, int l) -> double& { return DL[(static_cast<size_t>(j) * n + i) * n + l]; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        double v = Lj.dg[j](i, l);
        for (int c = 0; c < n; ++c) v -= G(c, j, i) * L(c, l) + G(c, j, l) * L(i, c);
        dl(j, i, l) = v;
      }
  const Mat dN = 0.5 * sym(g0.dg[k]);  // (nabla_a N)_b
  Tensor4 B = kn_tensor(L, dN);
  B *= -2.0;
  auto N = [k](int i) { return i == k ? 1.0 : 0.0; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a)
        for (int l = 0; l < n; ++l) {
          const int kk = a;
          B(i, j, kk, l) += dl(j, i, l) * N(kk) - dl(i, j, l) * N(kk) - dl(j, i, kk) * N(l) +
                            dl(i, j, kk) * N(l) + dl(l, kk, j) * N(i) - dl(kk, l, j) * N(i) -
                            dl(l, kk, i) * N(j) + dl(kk, l, i) * N(j);
        }
  return B;
}

DecompositionTerms decomposition_terms(const CollarData& c, const ExtendedShape& L, const BumpProfile& p,
                                       double C, const Vec& x) {
  (void)C;
  const int n = c.n();
  const MetricJet J0 = c.g0.jet(x);
  const FieldJet LJ = L.jet(x);
  const Mat& g = J0.g;
  const Mat Lc = LJ.g;
  const Mat L2 = sym(Lc * g.ldlt().solve(Lc));
  const Mat PT = tangential_projection(g), PN = normal_projection(n);
  DecompositionTerms t;
  t.R = curvature_operator(J0);
  t.A = kn_product(Lc, Lc, g);
  t.B = form_from_tensor(b_tensor(J0, LJ), g, 1e-9);
  t.Lcal = kn_product(Lc, PN, g);
  t.L2cal = kn_product(L2, PN, g);
  t.Ihat = kn_product(PT, PN, g);
  const double tt = x(n - 1);
  t.f = p.f(tt);
  t.df = p.df(tt);
  return t;
}

Lambda2Form decomposition_rhs(const DecompositionTerms& t, double C) {
  const double f = t.f, df = t.df;
  return t.R - t.A.scaled(f * f) + t.B.scaled(f) - t.Lcal.scaled(2 * df) + t.L2cal.scaled(2 * f * f) +
         t.Ihat.scaled(2 * C * f);
}

Decomposition assemble_decomposition(const ModifiedMetric& mod, const Vec& x) {
  Decomposition d;
  d.terms = decomposition_terms(*mod.collar, *mod.L, mod.profile, mod.C, x);
  d.rhs = decomposition_rhs(d.terms, mod.C);
  d.lhs = curvature_operator(mod.g_delta.jet(x));
  d.residual = max_abs_eig(Lambda2Form(d.rhs.basis, d.lhs.entries - d.rhs.entries, d.rhs.gram));
  return d;
}

Lambda2Form g1_second_derivative_term(const CollarData& c, const MetricField& g1_prime, const Vec& x) {
  const Mat g = c.g0.value(x);
  const Mat H = sym(g * g1_normal_derivatives(c, g1_prime, x).ddG);
  return kn_product(H, normal_projection(c.n()), g);
}

Lambda2Form boundary_assembled(const CollarData& c, const ExtendedShape& L, const MetricField& g1_prime,
                               const Vec& xhat) {
  const Vec x = c.point(xhat, 0.0);
  const MetricJet J0 = c.g0.jet(x);
  const FieldJet LJ = L.jet(x);
  const Mat& g = J0.g;
  const Mat L2 = sym(LJ.g * g.ldlt().solve(LJ.g));
  const Mat PN = normal_projection(c.n());
  return curvature_operator(J0) - kn_product(LJ.g, LJ.g, g) + form_from_tensor(b_tensor(J0, LJ), g, 1e-9) +
         kn_product(L2, PN, g).scaled(2.0) - g1_second_derivative_term(c, g1_prime, x);
}

BoundaryReport check_boundary_inequality(const CollarData& c, double kappa) {
  const auto L = extend_L(c);
  const MetricField g1p = extend_g1_prime(c);
  BoundaryReport r;
  r.min_slack = std::numeric_limits<double>::infinity();
  for (const Vec& u : c.boundary_samples) {
    const Lambda2Form a = boundary_assembled(c, *L, g1p, u);
    r.min_slack = std::min(r.min_slack, min_eig(a - Lambda2Form(a.basis, a.gram, a.gram).scaled(kappa)));
    const Lambda2Form g1curv = curvature_operator(g1p.jet(c.point(u, 0.0)));
    r.identity_residual =
        std::max(r.identity_residual, max_abs_eig(Lambda2Form(a.basis, a.entries - g1curv.entries, a.gram)));
  }
  return r;
}

double phi_value(double t, double d0, double s, int order) {
  if (t >= d0) return order == 0 ? 1.0 : 0.0;
  const double u = t / d0;
  switch (order) {
    case 0: return 1.0 + s * t * std::pow(1 - u, 3);
    case 1: return s * (1 - u) * (1 - u) * (1 - 4 * u);
    default: return -6.0 * s / d0 * (1 - u) * (1 - 2 * u);
  }
}

PerturbationResult perturb_mean_curvature(const CollarData& c, double d0, double phi_slope) {
  if (phi_slope > 0.0) throw DomainError("perturb_mean_curvature: the slope phi'(0) must be negative");
  if (!(d0 > 0.0) || d0 > c.width) throw DomainError("perturb_mean_curvature: need 0 < d0 <= collar width");
  const int n = c.n(), k = n - 1;
  PerturbationResult r{c, 0.0, -0.5 * (n - 1) * phi_slope, -0.5 * n * phi_slope};
  if (phi_slope == 0.0) return r;
  auto g0 = std::make_shared<const MetricField>(c.g0);
  const double s = phi_slope;
  auto scale = [k](Mat m, double f) {
    m.topLeftCorner(k, k) *= f;
    return m;
  };
  auto coeff = [g0, d0, s, k, scale](const Vec& x) { return scale(g0->value(x), phi_value(x(k), d0, s, 0)); };
  MetricField pert;
  if (c.g0.has_analytic_derivatives()) {
    auto jet = [g0, d0, s, n, k, scale](const Vec& x) {
      const MetricJet G = g0->jet(x);
      const double p = phi_value(x(k), d0, s, 0), p1 = phi_value(x(k), d0, s, 1), p2 = phi_value(x(k), d0, s, 2);
      auto tb = [k](const Mat& m) {
        Mat z = Mat::Zero(m.rows(), m.cols());
        z.topLeftCorner(k, k) = m.topLeftCorner(k, k);
        return z;
      };
      MetricJet J(n);
      J.g = scale(G.g, p);
      for (int a = 0; a < n; ++a) {
        J.dg[a] = scale(G.dg[a], p);
        if (a == k) J.dg[a] += p1 * tb(G.g);
      }
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          Mat d = scale(G.dd(a, b), p);
          if (a == k && b == k) {
            d += p2 * tb(G.g) + 2 * p1 * tb(G.dg[k]);
          } else if (a == k || b == k) {
            d += p1 * tb(G.dg[a == k ? b : a]);
          }
          J.dd(a, b) = d;
        }
      return J;
    };
    pert = MetricField::analytic(c.g0.domain(), coeff, jet, true);
  } else {
    pert = MetricField::finite_difference(c.g0.domain(), coeff, c.g0.fd_config(), true);
  }
  r.collar = c;
  r.collar.g0 = pert;
  double acc = 0.0;
  for (const Vec& u : c.boundary_samples) {
    const Mat g = tang(c.g0.value(c.point(u, 0.0)));
    const Mat before = second_ff(Side::M0, c, u), after = second_ff(Side::M0, r.collar, u);
    acc += g.ldlt().solve(after).trace() - g.ldlt().solve(before).trace();
  }
  r.trace_increment = acc / static_cast<double>(c.boundary_samples.size());
  return r;
}

}  // namespace curvglue
