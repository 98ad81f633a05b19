#pragma once

#include <string>
#include <vector>

namespace curvglue {

// Piecewise polynomial on [x_0, inf). Piece k covers [start_k, start_k + len_k]
// and is stored in the local variable s = (x - start_k) / len_k. The last piece
// extends to +inf.
class PiecewisePoly {
 public:
  struct Piece {
    double start;
    double len;
    std::vector<double> coeffs;  // in s, ascending powers
  };

  PiecewisePoly() = default;
  explicit PiecewisePoly(std::vector<Piece> pieces);

  double operator()(double x) const;
  double derivative(double x, int order = 1) const;
  // Antiderivative vanishing at the left end, continuous across pieces.
  PiecewisePoly antiderivative() const;
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::vector<double> breakpoints() const;

 private:
  std::vector<Piece> pieces_;
  size_t locate(double x) const;
};

struct ProfileShape {
  double blend_width = 0.05;    // relative half-width of the junction blend around delta^4
  double descent_fraction = 0.05;
  double rise_fraction = 0.6;
  double rise_ease = 0.1;       // fraction of the rise spent ramping the slope up/down
};

// The triple (f, F, FF) with F' = f and FF' = F.
class BumpProfile {
 public:
  double delta() const { return delta_; }
  double blend_width() const { return shape_.blend_width; }
  double amplitude() const { return amplitude_; }
  // End of the junction blend, (1 + blend_width) delta^4.
  double well_start() const { return well_start_; }

  double f(double x) const { return f_(x); }
  double df(double x) const { return f_.derivative(x); }
  double F(double x) const { return F_(x); }
  double FF(double x) const { return FF_(x); }
  std::vector<double> breakpoints() const { return f_.breakpoints(); }

  friend BumpProfile build_bump(double delta, const ProfileShape& shape);

 private:
  double delta_ = 0.0;
  double amplitude_ = 0.0;
  double well_start_ = 0.0;
  ProfileShape shape_;
  PiecewisePoly f_, F_, FF_;
};

BumpProfile build_bump(double delta, const ProfileShape& shape = {});

struct ProfileReport {
  double integral_residual = 0.0;   // |F(delta)|
  double ramp_violation = 0.0;      // |f - (1 - x/delta^4)| on [0, (1-b) delta^4]
  double well_bound_violation = 0.0;  // excess of f outside [-delta^2, 0] on the well
  double slope_violation = 0.0;     // excess of f' over delta on the well
  double tail_violation = 0.0;      // |f| on [delta, inf)
  double range_violation = 0.0;     // excess of f outside [-delta^2, 1]
  double F_negativity = 0.0;        // -min F on [0, delta]
  double FF_monotonicity = 0.0;     // largest decrease of FF on [0, delta]
  double sup_F = 0.0;
  double argsup_F = 0.0;
  double sup_abs_FF = 0.0;
  double max_violation() const;
  std::vector<std::string> lines() const;
};

ProfileReport certify(const BumpProfile& p, int samples = 10000);

}  // namespace curvglue
