#include "curvglue/profile.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "curvglue/lambda2.hpp"

namespace curvglue {

PiecewisePoly::PiecewisePoly(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw DomainError("PiecewisePoly: no pieces");
  for (auto& p : pieces_)
    if (!(p.len > 0.0)) throw DomainError("PiecewisePoly: piece length must be positive");
}

size_t PiecewisePoly::locate(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Piece& p) { return v < p.start; });
  if (it == pieces_.begin()) return 0;
  return static_cast<size_t>(it - pieces_.begin()) - 1;
}

double PiecewisePoly::operator()(double x) const {
  const Piece& p = pieces_[locate(x)];
  const double s = (x - p.start) / p.len;
  double v = 0.0;
  for (size_t j = p.coeffs.size(); j-- > 0;) v = v * s + p.coeffs[j];
  return v;
}

double PiecewisePoly::derivative(double x, int order) const {
  const Piece& p = pieces_[locate(x)];
  const double s = (x - p.start) / p.len;
  std::vector<double> c = p.coeffs;
  for (int o = 0; o < order; ++o) {
    if (c.size() <= 1) return 0.0;
    std::vector<double> d(c.size() - 1);
    for (size_t j = 1; j < c.size(); ++j) d[j - 1] = static_cast<double>(j) * c[j] / p.len;
    c = std::move(d);
  }
  double v = 0.0;
  for (size_t j = c.size(); j-- > 0;) v = v * s + c[j];
  return v;
}

PiecewisePoly PiecewisePoly::antiderivative() const {
  std::vector<Piece> out;
  double acc = 0.0;
  for (size_t k = 0; k < pieces_.size(); ++k) {
    const Piece& p = pieces_[k];
    Piece q{p.start, p.len, std::vector<double>(p.coeffs.size() + 1, 0.0)};
    q.coeffs[0] = acc;
    for (size_t j = 0; j < p.coeffs.size(); ++j) q.coeffs[j + 1] = p.len * p.coeffs[j] / static_cast<double>(j + 1);
    if (k + 1 < pieces_.size()) {
      double end = 0.0;
      for (double c : q.coeffs) end += c;  // value at s = 1
      acc = end;
    }
    out.push_back(std::move(q));
  }
  return PiecewisePoly(std::move(out));
}

std::vector<double> PiecewisePoly::breakpoints() const {
  std::vector<double> b;
  for (auto& p : pieces_) b.push_back(p.start);
  return b;
}

namespace {

PiecewisePoly make_f(double delta, double A, const ProfileShape& sh) {
  const double d4 = std::pow(delta, 4);
  const double b = sh.blend_width;
  const double x1 = (1.0 - b) * d4;
  const double a = (1.0 + b) * d4;
  const double W = delta - a;
  const double r1 = sh.descent_fraction, r = sh.rise_fraction, p = 1.0 - r1 - r;
  const double tau = sh.rise_ease, c = 1.0 / (1.0 - tau);
  std::vector<PiecewisePoly::Piece> pcs;
  pcs.push_back({0.0, x1, {1.0, -(1.0 - b)}});
  // (1-s)^3 (1+s): matches value, slope and curvature of the ramp and of the well.
  pcs.push_back({x1, a - x1, {b, -2 * b, 0.0, 2 * b, -b}});
  double x = a;
  pcs.push_back({x, r1 * W, {0.0, 0.0, 0.0, -10 * A, 15 * A, -6 * A}});
  x += r1 * W;
  if (p > 0.0) {
    pcs.push_back({x, p * W, {-A}});
    x += p * W;
  }
  const double R = r * W;
  pcs.push_back({x, tau * R, {-A, 0.0, 0.0, A * c * tau, -0.5 * A * c * tau}});
  x += tau * R;
  pcs.push_back({x, (1 - 2 * tau) * R, {-A + 0.5 * A * c * tau, A * c * (1 - 2 * tau)}});
  x += (1 - 2 * tau) * R;
  const double k = -A * c * tau;
  pcs.push_back({x, delta - x, {0.5 * k, -k, 0.0, k, -0.5 * k}});
  pcs.push_back({delta, 1.0, {0.0}});
  return PiecewisePoly(std::move(pcs));
}

}  // namespace

BumpProfile build_bump(double delta, const ProfileShape& shape) {
  if (!(delta > 0.0) || delta > 0.5) {
    std::ostringstream os;
    os << "build_bump: infeasible delta = " << delta
       << "; requires 0 < delta <= 0.5 so that delta^4 < delta and the reservoir delta^2 (delta - delta^4) = "
       << delta * delta * (delta - std::pow(delta, 4)) << " exceeds the ramp area delta^4 / 2 = "
       << 0.5 * std::pow(delta, 4) << " with room for the slope bound f' <= delta";
    throw DomainError(os.str());
  }
  if (!(shape.blend_width > 0.0 && shape.blend_width < 0.5))
    throw DomainError("build_bump: blend_width must lie in (0, 0.5)");
  auto residual = [&](double A) { return make_f(delta, A, shape).antiderivative()(delta); };
  // The integral is affine in A; a bracketed secant step lands on the root.
  double lo = 0.0, hi = delta * delta;
  double rlo = residual(lo), rhi = residual(hi);
  if (!(rlo > 0.0 && rhi < 0.0)) throw DomainError("build_bump: amplitude bracket failed");
  double A = hi;
  for (int it = 0; it < 60; ++it) {
    A = lo - rlo * (hi - lo) / (rhi - rlo);
    const double rA = residual(A);
    if (std::abs(rA) <= 1e-16 * std::pow(delta, 4)) break;
    if (rA > 0) {
      lo = A;
      rlo = rA;
    } else {
      hi = A;
      rhi = rA;
    }
  }
  BumpProfile p;
  p.delta_ = delta;
  p.amplitude_ = A;
  p.shape_ = shape;
  p.well_start_ = (1.0 + shape.blend_width) * std::pow(delta, 4);
  p.f_ = make_f(delta, A, shape);
  p.F_ = p.f_.antiderivative();
  p.FF_ = p.F_.antiderivative();
  if (std::abs(p.F_(delta)) > 1e-12) throw DomainError("build_bump: integral constraint not met");
  return p;
}

double ProfileReport::max_violation() const {
  return std::max({integral_residual, ramp_violation, well_bound_violation, slope_violation, tail_violation,
                   range_violation, F_negativity, FF_monotonicity});
}

std::vector<std::string> ProfileReport::lines() const {
  std::vector<std::string> out;
  auto add = [&](const char* k, double v) {
    std::ostringstream os;
    os << std::setprecision(6) << k << " = " << v;
    out.push_back(os.str());
  };
  add("integral_residual", integral_residual);
  add("ramp_violation", ramp_violation);
  add("well_bound_violation", well_bound_violation);
  add("slope_violation", slope_violation);
  add("tail_violation", tail_violation);
  add("range_violation", range_violation);
  add("F_negativity", F_negativity);
  add("FF_monotonicity", FF_monotonicity);
  add("sup_F", sup_F);
  add("argsup_F", argsup_F);
  add("sup_abs_FF", sup_abs_FF);
  return out;
}

ProfileReport certify(const BumpProfile& p, int samples) {
  const double d = p.delta(), d4 = std::pow(d, 4), b = p.blend_width();
  ProfileReport r;
  r.integral_residual = std::abs(p.F(d));
  // Every piece gets its own uniform sub-grid so narrow pieces are resolved.
  std::vector<double> xs;
  const auto bps = p.breakpoints();
  const int per = std::max(16, samples / static_cast<int>(bps.size()));
  for (size_t k = 0; k < bps.size(); ++k) {
    const double lo = bps[k], hi = k + 1 < bps.size() ? bps[k + 1] : 2.0 * d;
    for (int i = 0; i <= per; ++i) xs.push_back(lo + (hi - lo) * i / per);
  }
  std::sort(xs.begin(), xs.end());
  const double well = p.well_start();
  double prevFF = 0.0;
  bool first = true;
  for (double x : xs) {
    const double f = p.f(x), F = p.F(x), FF = p.FF(x);
    if (x <= (1 - b) * d4) r.ramp_violation = std::max(r.ramp_violation, std::abs(f - (1 - x / d4)));
    if (x >= well && x <= d) {
      r.well_bound_violation = std::max({r.well_bound_violation, f, -d * d - f});
      r.slope_violation = std::max(r.slope_violation, p.df(x) - d);
    }
    if (x >= d) r.tail_violation = std::max(r.tail_violation, std::abs(f));
    r.range_violation = std::max({r.range_violation, f - 1.0, -d * d - f});
    if (x <= d) {
      r.F_negativity = std::max(r.F_negativity, -F);
      if (!first) r.FF_monotonicity = std::max(r.FF_monotonicity, prevFF - FF);
      prevFF = FF;
      first = false;
      if (F > r.sup_F) {
        r.sup_F = F;
        r.argsup_F = x;
      }
    }
    r.sup_abs_FF = std::max(r.sup_abs_FF, std::abs(FF));
  }
  return r;
}

}  // namespace curvglue
