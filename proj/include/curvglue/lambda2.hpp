#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace curvglue {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Raised when an argument violates a documented precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Basis e_i ^ e_j (i < j) of the second exterior power, lexicographic order.
class Lambda2Basis {
 public:
  explicit Lambda2Basis(int n);

  int n() const { return n_; }
  int size() const { return static_cast<int>(pairs_.size()); }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  int index(int i, int j) const;  // requires i < j

 private:
  int n_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<int> lookup_;
};

// Rank-4 covariant array with dense n^4 storage.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), data_(static_cast<size_t>(n) * n * n * n, 0.0) {}

  int n() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return data_[offset(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[offset(i, j, k, l)]; }
  double max_abs() const;
  Tensor4& operator+=(const Tensor4& o);
  Tensor4& operator*=(double s);

 private:
  size_t offset(int i, int j, int k, int l) const {
    return ((static_cast<size_t>(i) * n_ + j) * n_ + k) * n_ + l;
  }
  int n_ = 0;
  std::vector<double> data_;
};

// Symmetric bilinear form on Lambda^2 together with the induced inner product.
//
// entries(a, b) = T(e_i, e_j, e_k, e_l) for the basis pairs a = (i,j), b = (k,l).
// On expanded 2-vectors with fully antisymmetric components alpha^{ij} the
// pairing is T(alpha, beta) = 1/4 T_ijkl alpha^ij beta^kl; on basis-pair
// coordinates it is the plain quadratic form a^T entries b.
struct Lambda2Form {
  Lambda2Basis basis;
  Mat entries;
  Mat gram;

  Lambda2Form() : basis(2), entries(Mat::Zero(1, 1)), gram(Mat::Identity(1, 1)) {}
  Lambda2Form(const Lambda2Basis& b, Mat e, Mat g)
      : basis(b), entries(std::move(e)), gram(std::move(g)) {}

  int n() const { return basis.n(); }
  // Pairing of two vectors in basis-pair coordinates.
  double operator()(const Vec& a, const Vec& b) const { return a.dot(entries * b); }
  Lambda2Form operator-(const Lambda2Form& o) const;
  Lambda2Form operator+(const Lambda2Form& o) const;
  Lambda2Form scaled(double s) const;
};

void require_symmetric(const Mat& m, const char* what, double rel_tol = 1e-14);
void require_spd(const Mat& g, const char* what);

Mat induced_gram(const Mat& g);

// Kulkarni-Nomizu product, normalized so that id ^ id = id. The gram is taken
// from the metric g (identity when omitted).
Lambda2Form kn_product(const Mat& A, const Mat& B);
Lambda2Form kn_product(const Mat& A, const Mat& B, const Mat& g);
// Entry-level product as a (0,4) tensor.
Tensor4 kn_tensor(const Mat& A, const Mat& B);

Lambda2Form form_from_tensor(const Tensor4& T, const Mat& g, double tol = 1e-12);
Tensor4 tensor_from_form(const Lambda2Form& form);

// (tr_24 T)_ik = g^{jl} T_ijkl.
Mat ricci_trace(const Lambda2Form& form, const Mat& g);
Mat ricci_trace(const Tensor4& T, const Mat& g);
// g^{ik} g^{jl} T_ijkl.
double scalar_trace(const Lambda2Form& form, const Mat& g);
double scalar_trace(const Tensor4& T, const Mat& g);

// Eigenvalues of the pencil entries v = lambda gram v, ascending.
Vec form_eigenvalues(const Lambda2Form& form);
double min_eig(const Lambda2Form& form);
double two_smallest_sum(const Lambda2Form& form);
// Ascending eigenvalues of the pencil A v = lambda B v for symmetric A and SPD B.
Vec generalized_eigenvalues(const Mat& A, const Mat& B);

}  // namespace curvglue
