#include "curvglue/bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

namespace curvglue {

namespace {

const std::vector<std::pair<FunctionalKind, std::string>>& kind_names() {
  static const std::vector<std::pair<FunctionalKind, std::string>> names = {
      {FunctionalKind::operator_, "operator"},   {FunctionalKind::ricci, "ricci"},
      {FunctionalKind::scalar, "scalar"},        {FunctionalKind::bi, "bi"},
      {FunctionalKind::isotropic, "isotropic"},  {FunctionalKind::isotropic1, "isotropic1"},
      {FunctionalKind::isotropic2, "isotropic2"}, {FunctionalKind::flag, "flag"}};
  return names;
}

}  // namespace

std::string to_string(FunctionalKind k) {
  for (auto& [kk, s] : kind_names())
    if (kk == k) return s;
  return "?";
}

FunctionalKind parse_functional(const std::string& s) {
  for (auto& [k, name] : kind_names())
    if (name == s) return k;
  throw DomainError("unknown functional '" + s + "'");
}

std::vector<FunctionalKind> all_functionals() {
  std::vector<FunctionalKind> out;
  for (auto& [k, name] : kind_names()) out.push_back(k);
  return out;
}

void check_dimension(FunctionalKind k, int n) {
  int need = 2;
  switch (k) {
    case FunctionalKind::bi:
    case FunctionalKind::flag:
    case FunctionalKind::isotropic1: need = 3; break;
    case FunctionalKind::isotropic: need = 4; break;
    default: break;
  }
  if (n < need) {
    std::ostringstream os;
    os << "functional '" << to_string(k) << "' needs dimension at least " << need << ", scenario has " << n;
    throw HypothesisError(os.str());
  }
}

double evaluate_functional(FunctionalKind k, const MetricJet& J, const FrameSearchConfig& cfg) {
  check_dimension(k, J.n());
  switch (k) {
    case FunctionalKind::operator_: return min_eig(curvature_operator(J));
    case FunctionalKind::bi: return two_smallest_sum(curvature_operator(J));
    case FunctionalKind::ricci: {
      const Tensor4 R = riemann_tensor(J);
      return generalized_eigenvalues(ricci_trace(R, J.g), J.g).minCoeff();
    }
    case FunctionalKind::scalar: return scalar_trace(riemann_tensor(J), J.g);
    case FunctionalKind::isotropic: return isotropic_min(riemann_tensor(J), J.g, IsotropicVariant::plain, cfg);
    case FunctionalKind::isotropic1: return isotropic_min(riemann_tensor(J), J.g, IsotropicVariant::plus_R, cfg);
    case FunctionalKind::isotropic2: return isotropic_min(riemann_tensor(J), J.g, IsotropicVariant::plus_R2, cfg);
    case FunctionalKind::flag: return flag_min(riemann_tensor(J), J.g, cfg);
  }
  return 0.0;
}

double evaluate_functional(FunctionalKind k, const MetricField& g, const Vec& x, const FrameSearchConfig& cfg) {
  return evaluate_functional(k, g.jet(x), cfg);
}

bool trend_pass(const std::vector<double>& values, double floor) {
  for (size_t i = 1; i < values.size(); ++i)
    if (!(values[i] < values[i - 1] || values[i] <= floor)) return false;
  return true;
}

std::vector<double> normal_samples(double width, double delta, double h) {
  std::vector<double> t = {-0.9 * width, -0.5 * width, -0.2 * width};
  for (double c : {-2.0, -1.5, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 1.5, 2.0}) t.push_back(c * h);
  const double d4 = std::pow(delta, 4);
  t.push_back(0.5 * d4);
  t.push_back(d4);
  for (int i = 1; i <= 8; ++i) t.push_back(delta * i / 8.0);
  t.push_back(0.5 * (delta + width));
  t.push_back(0.9 * width);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

std::vector<Vec> tangential_samples(const CollarData& c) {
  const int k = c.n() - 1;
  std::vector<Vec> out;
  std::vector<int> idx(k, 0);
  const double fr[3] = {0.25, 0.5, 0.75};
  while (true) {
    Vec u(k);
    for (int a = 0; a < k; ++a) {
      const auto [lo, hi] = c.g0.domain().box[a];
      u(a) = lo + fr[idx[a]] * (hi - lo);
    }
    out.push_back(u);
    int a = 0;
    while (a < k && ++idx[a] == 3) idx[a++] = 0;
    if (a == k) break;
  }
  return out;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GLUING_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> parallel_map(int count, const std::function<double(int)>& fn, int threads) {
  std::vector<double> out(count);
  const int T = std::max(1, std::min(threads, count));
  if (T == 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(T);
  for (int w = 0; w < T; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += T) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

CollarData prepare_collar(const Scenario& s, FunctionalKind kind, bool auto_perturb, std::vector<std::string>* notes,
                          bool* perturbed) {
  check_dimension(kind, s.n);
  const auto spectra = L_spectra(*s.collar);
  double min_ev = std::numeric_limits<double>::infinity(), min_tr = min_ev;
  for (const Vec& ev : spectra) {
    min_ev = std::min(min_ev, ev.minCoeff());
    min_tr = std::min(min_tr, ev.sum());
  }
  if (perturbed) *perturbed = false;
  if (kind != FunctionalKind::scalar) {
    if (min_ev < -1e-10) {
      std::ostringstream os;
      os << "hypothesis refused: L = L0 + L1 is not positive semidefinite (smallest eigenvalue " << min_ev
         << ") for functional '" << to_string(kind) << "'";
      throw HypothesisError(os.str());
    }
    return *s.collar;
  }
  if (min_tr < -1e-10) {
    std::ostringstream os;
    os << "hypothesis refused: tr L = " << min_tr << " is negative";
    throw HypothesisError(os.str());
  }
  if (auto_perturb && min_tr <= 1e-8) {
    const PerturbationResult p = perturb_mean_curvature(*s.collar, s.collar->width, -0.05);
    if (perturbed) *perturbed = true;
    if (notes) {
      std::ostringstream os;
      os << "tr L = " << min_tr << " on the boundary; perturbed g0 by phi with phi'(0) = -0.05, tr L increased by "
         << p.trace_increment << " (tangential prediction " << p.predicted_tangential << ", full-trace prediction "
         << p.predicted_full << ")";
      notes->push_back(os.str());
    }
    return p.collar;
  }
  return *s.collar;
}

SweepResult certify(const Scenario& s, const Functional& fnl, const SweepOptions& opt) {
  if (opt.deltas.empty()) throw DomainError("certify: empty delta ladder");
  for (size_t i = 0; i < opt.deltas.size(); ++i) {
    if (!(opt.deltas[i] > 0)) throw DomainError("certify: deltas must be positive");
    if (i > 0 && !(opt.deltas[i] < opt.deltas[i - 1])) throw DomainError("certify: deltas must strictly decrease");
  }
  for (size_t i = 0; i < opt.hs.size(); ++i) {
    if (!(opt.hs[i] > 0)) throw DomainError("certify: h values must be positive");
    if (i > 0 && !(opt.hs[i] < opt.hs[i - 1])) throw DomainError("certify: h values must strictly decrease");
  }
  SweepResult res;
  res.scenario = s.name;
  res.kind = fnl.kind;
  res.kappa = fnl.kappa;
  const CollarData collar = prepare_collar(s, fnl.kind, opt.auto_perturb, &res.notes, &res.perturbed);
  const int threads = resolve_threads(opt.threads);
  FrameSearchConfig fcfg;
  fcfg.seed = opt.seed;
  const auto L = extend_L(collar);
  const double C = opt.C_fixed ? *opt.C_fixed : choose_C(collar, *L).C;
  if (C < 0) throw DomainError("certify: C must be nonnegative");
  const std::vector<Vec> us = tangential_samples(collar);
  const Vec u_mid = us[us.size() / 2];
  auto point = [&](const Vec& u, double t) { return collar.point(u, t); };

  for (double delta : opt.deltas) {
    const auto t0 = std::chrono::steady_clock::now();
    const BumpProfile prof = build_bump(delta);
    const ModifiedMetric mod = build_g_delta(collar, prof, C, L);
    const GluedMetric glued(mod);
    const double decomp = assemble_decomposition(mod, point(u_mid, delta / 2)).residual;
    std::vector<double> hs = opt.hs;
    if (hs.empty()) hs.push_back(delta / 8.0);
    // One-sided sample grid for the a.e. check of g_(delta), built with the finest h.
    const double hmin = *std::min_element(hs.begin(), hs.end());
    std::vector<Vec> pts0, pts1;
    for (const Vec& u : us)
      for (double t : normal_samples(collar.width, delta, hmin)) {
        if (t > 0) pts0.push_back(point(u, t));
        if (t < 0) pts1.push_back(point(u, t));
      }
    check_g_delta_spd(mod, pts0);
    const auto v0 = parallel_map(
        static_cast<int>(pts0.size()),
        [&](int i) { return evaluate_functional(fnl.kind, mod.g_delta.jet(pts0[i]), fcfg); }, threads);
    const auto v1 = parallel_map(
        static_cast<int>(pts1.size()),
        [&](int i) { return evaluate_functional(fnl.kind, collar.g1.jet(pts1[i]), fcfg); }, threads);
    const double worst0 = *std::min_element(v0.begin(), v0.end());
    const double worst1 = *std::min_element(v1.begin(), v1.end());
    const double setup_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    for (double h : hs) {
      const auto t1 = std::chrono::steady_clock::now();
      const SmoothedMetric sm = mollify(glued, MollifierConfig{h});
      std::vector<Vec> pts;
      for (const Vec& u : us)
        for (double t : normal_samples(collar.width, delta, h)) pts.push_back(point(u, t));
      std::vector<double> dist(pts.size());
      const auto vals = parallel_map(
          static_cast<int>(pts.size()),
          [&](int i) {
            const MetricJet J = sm.jet(pts[i]);
            Eigen::SelfAdjointEigenSolver<Mat> es(J.g);
            if (!(es.eigenvalues()(0) > 0.0)) throw DomainError("certify: smoothed metric is not positive definite");
            dist[i] = (J.g - glued.original(pts[i])).cwiseAbs().maxCoeff();
            return evaluate_functional(fnl.kind, J, fcfg);
          },
          threads);
      SweepRow row;
      row.delta = delta;
      row.h = h;
      row.C = C;
      row.eps_observed = fnl.kappa - *std::min_element(vals.begin(), vals.end());
      row.eps_glued = fnl.kappa - std::min(worst0, worst1);
      row.m1_deficit = fnl.kappa - worst1;
      row.sup_dist = *std::max_element(dist.begin(), dist.end());
      row.decomp_residual = decomp;
      if (opt.timing)
        row.wall_ms = setup_ms + std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t1).count();
      res.rows.push_back(row);
    }
  }
  // Trend per h position across the delta ladder.
  const size_t per = opt.hs.empty() ? 1 : opt.hs.size();
  bool pass = true;
  for (size_t j = 0; j < per; ++j) {
    std::vector<double> eps, dist;
    for (size_t r = j; r < res.rows.size(); r += per) {
      eps.push_back(res.rows[r].eps_observed);
      dist.push_back(res.rows[r].sup_dist);
    }
    if (!trend_pass(eps, kEpsFloor)) {
      pass = false;
      res.notes.push_back("eps_observed does not decrease across the delta ladder");
    }
    if (!trend_pass(dist, kDistFloor)) {
      pass = false;
      res.notes.push_back("sup_dist does not decrease across the delta ladder");
    }
  }
  for (const SweepRow& r : res.rows)
    if (r.m1_deficit > kEpsFloor) {
      pass = false;
      res.notes.push_back("M1 side violates the declared bound");
      break;
    }
  res.pass = pass;
  return res;
}

}  // namespace curvglue
