#pragma once

#include <cmath>
#include <random>

#include "curvglue/metric.hpp"

namespace curvglue::testing {

inline Mat random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = N(rng);
  return m;
}

inline Mat random_psd(int n, int rank, std::mt19937_64& rng) {
  const Mat m = random_matrix(n, rank, rng);
  return m * m.transpose();
}

inline Mat random_spd(int n, std::mt19937_64& rng) {
  return random_psd(n, n, rng) + 0.5 * Mat::Identity(n, n);
}

inline Mat random_symmetric(int n, std::mt19937_64& rng) {
  const Mat m = random_matrix(n, n, rng);
  return 0.5 * (m + m.transpose());
}

// Round sphere of radius r in stereographic coordinates: g = w(x) I with
// w = 4 r^2 / (1 + |x|^2)^2.
inline MetricField stereo_sphere(int n, double r = 1.0, double half = 0.8) {
  auto w = [r](const Vec& x) { return 4.0 * r * r / std::pow(1.0 + x.squaredNorm(), 2); };
  auto coeff = [w, n](const Vec& x) { Mat g = w(x) * Mat::Identity(n, n); return g; };
  auto jet = [r, n](const Vec& x) {
    const double q = 1.0 + x.squaredNorm(), c = 4.0 * r * r;
    MetricJet J(n);
    const Mat I = Mat::Identity(n, n);
    J.g = c / (q * q) * I;
    for (int k = 0; k < n; ++k) J.dg[k] = -4.0 * c * x(k) / (q * q * q) * I;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        J.dd(k, l) = (-4.0 * c * (k == l ? 1.0 : 0.0) / (q * q * q) + 24.0 * c * x(k) * x(l) / (q * q * q * q)) * I;
    return J;
  };
  std::vector<std::pair<double, double>> box(n, {-half, half});
  return MetricField::analytic(ChartDomain(n, box), coeff, jet, false);
}

// Unit S^2 in (theta, phi): diag(1, sin^2 theta).
inline MetricField sphere2() {
  auto coeff = [](const Vec& x) {
    Mat g = Mat::Identity(2, 2);
    g(1, 1) = std::pow(std::sin(x(0)), 2);
    return g;
  };
  auto jet = [](const Vec& x) {
    MetricJet J(2);
    const double s = std::sin(x(0)), c = std::cos(x(0));
    J.g = Mat::Identity(2, 2);
    J.g(1, 1) = s * s;
    J.dg[0](1, 1) = 2 * s * c;
    J.dd(0, 0)(1, 1) = 2 * (c * c - s * s);
    return J;
  };
  return MetricField::analytic(ChartDomain(2, {{0.3, 2.8}, {-1.0, 1.0}}), coeff, jet, false);
}

// Flat plane in polar coordinates (r, theta): diag(1, r^2).
inline MetricField polar_plane() {
  auto coeff = [](const Vec& x) {
    Mat g = Mat::Identity(2, 2);
    g(1, 1) = x(0) * x(0);
    return g;
  };
  auto jet = [](const Vec& x) {
    MetricJet J(2);
    J.g = Mat::Identity(2, 2);
    J.g(1, 1) = x(0) * x(0);
    J.dg[0](1, 1) = 2 * x(0);
    J.dd(0, 0)(1, 1) = 2.0;
    return J;
  };
  return MetricField::analytic(ChartDomain(2, {{0.5, 3.0}, {-1.0, 1.0}}), coeff, jet, false);
}

inline MetricField flat(int n) {
  auto coeff = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
  return MetricField::finite_difference(ChartDomain(n, std::vector<std::pair<double, double>>(n, {-1.0, 1.0})),
                                        coeff, FdConfig{}, false);
}

// Orthonormal columns from a random matrix (Gram-Schmidt through QR).
inline Mat random_orthonormal(int n, int k, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(n, k, rng));
  return qr.householderQ() * Mat::Identity(n, k);
}

}  // namespace curvglue::testing
