#include "curvglue/lambda2.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curvglue {

Lambda2Basis::Lambda2Basis(int n) : n_(n), lookup_(static_cast<size_t>(n) * n, -1) {
  if (n < 2) throw DomainError("Lambda2Basis: dimension must be at least 2");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      lookup_[i * n + j] = static_cast<int>(pairs_.size());
      pairs_.emplace_back(i, j);
    }
}

int Lambda2Basis::index(int i, int j) const {
  if (i >= j) throw DomainError("Lambda2Basis::index requires i < j");
  return lookup_[i * n_ + j];
}

double Tensor4::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Tensor4& Tensor4::operator+=(const Tensor4& o) {
  if (o.n_ != n_) throw DomainError("Tensor4: dimension mismatch");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor4& Tensor4::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Lambda2Form Lambda2Form::operator-(const Lambda2Form& o) const {
  if (o.n() != n()) throw DomainError("Lambda2Form: dimension mismatch");
  return Lambda2Form(basis, entries - o.entries, gram);
}

Lambda2Form Lambda2Form::operator+(const Lambda2Form& o) const {
  if (o.n() != n()) throw DomainError("Lambda2Form: dimension mismatch");
  return Lambda2Form(basis, entries + o.entries, gram);
}

Lambda2Form Lambda2Form::scaled(double s) const { return Lambda2Form(basis, entries * s, gram); }

void require_symmetric(const Mat& m, const char* what, double rel_tol) {
  if (m.rows() != m.cols()) throw DomainError(std::string(what) + ": matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > rel_tol * scale) {
    std::ostringstream os;
    os << what << ": not symmetric (max asymmetry " << asym << ")";
    throw DomainError(os.str());
  }
}

void require_spd(const Mat& g, const char* what) {
  require_symmetric(g, what, 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  if (!(lo > 0.0)) {
    std::ostringstream os;
    os << what << ": not positive definite (smallest eigenvalue " << lo << ")";
    throw DomainError(os.str());
  }
}

Mat induced_gram(const Mat& g) {
  require_spd(g, "induced_gram");
  const int n = static_cast<int>(g.rows());
  Lambda2Basis b(n);
  Mat out(b.size(), b.size());
  for (int a = 0; a < b.size(); ++a) {
    auto [i, j] = b.pairs()[a];
    for (int c = 0; c < b.size(); ++c) {
      auto [k, l] = b.pairs()[c];
      out(a, c) = g(i, k) * g(j, l) - g(j, k) * g(i, l);
    }
  }
  return out;
}

Tensor4 kn_tensor(const Mat& A, const Mat& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.rows() != A.cols())
    throw DomainError("kn_product: dimension mismatch");
  const int n = static_cast<int>(A.rows());
  Tensor4 T(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          T(i, j, k, l) = 0.5 * (A(i, k) * B(j, l) - A(j, k) * B(i, l) + B(i, k) * A(j, l) -
                                 B(j, k) * A(i, l));
  return T;
}

namespace {

Mat form_entries(const Tensor4& T, const Lambda2Basis& b) {
  Mat e(b.size(), b.size());
  for (int a = 0; a < b.size(); ++a) {
    auto [i, j] = b.pairs()[a];
    for (int c = 0; c < b.size(); ++c) {
      auto [k, l] = b.pairs()[c];
      e(a, c) = T(i, j, k, l);
    }
  }
  return e;
}

}  // namespace

Lambda2Form kn_product(const Mat& A, const Mat& B) {
  return kn_product(A, B, Mat::Identity(A.rows(), A.cols()));
}

Lambda2Form kn_product(const Mat& A, const Mat& B, const Mat& g) {
  Lambda2Basis b(static_cast<int>(A.rows()));
  return Lambda2Form(b, form_entries(kn_tensor(A, B), b), induced_gram(g));
}

Lambda2Form form_from_tensor(const Tensor4& T, const Mat& g, double tol) {
  const int n = T.n();
  if (g.rows() != n) throw DomainError("form_from_tensor: dimension mismatch");
  const double scale = std::max(1.0, T.max_abs());
  double viol = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          viol = std::max(viol, std::abs(T(i, j, k, l) + T(j, i, k, l)));
          viol = std::max(viol, std::abs(T(i, j, k, l) + T(i, j, l, k)));
          viol = std::max(viol, std::abs(T(i, j, k, l) - T(k, l, i, j)));
        }
  if (viol > tol * scale) {
    std::ostringstream os;
    os << "form_from_tensor: symmetry violation " << viol;
    throw DomainError(os.str());
  }
  Lambda2Basis b(n);
  return Lambda2Form(b, form_entries(T, b), induced_gram(g));
}

Tensor4 tensor_from_form(const Lambda2Form& form) {
  const int n = form.n();
  Tensor4 T(n);
  for (int a = 0; a < form.basis.size(); ++a) {
    auto [i, j] = form.basis.pairs()[a];
    for (int c = 0; c < form.basis.size(); ++c) {
      auto [k, l] = form.basis.pairs()[c];
      const double v = form.entries(a, c);
      T(i, j, k, l) = v;
      T(j, i, k, l) = -v;
      T(i, j, l, k) = -v;
      T(j, i, l, k) = v;
    }
  }
  return T;
}

Mat ricci_trace(const Tensor4& T, const Mat& g) {
  require_spd(g, "ricci_trace");
  const int n = T.n();
  if (g.rows() != n) throw DomainError("ricci_trace: dimension mismatch");
  const Mat gi = g.inverse();
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) s += gi(j, l) * T(i, j, k, l);
      out(i, k) = s;
    }
  return 0.5 * (out + out.transpose());
}

Mat ricci_trace(const Lambda2Form& form, const Mat& g) { return ricci_trace(tensor_from_form(form), g); }

double scalar_trace(const Tensor4& T, const Mat& g) {
  require_spd(g, "scalar_trace");
  const int n = T.n();
  if (g.rows() != n) throw DomainError("scalar_trace: dimension mismatch");
  const Mat gi = g.inverse();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += gi(i, k) * gi(j, l) * T(i, j, k, l);
  return s;
}

double scalar_trace(const Lambda2Form& form, const Mat& g) {
  return scalar_trace(tensor_from_form(form), g);
}

Vec generalized_eigenvalues(const Mat& A, const Mat& B) {
  Eigen::LLT<Mat> llt(B);
  if (llt.info() != Eigen::Success) throw DomainError("generalized eigenproblem: gram is not SPD");
  // Reduce to L^{-1} A L^{-T} with B = L L^T.
  const Mat Linv_A = llt.matrixL().solve(A);
  Mat C = llt.matrixL().solve(Linv_A.transpose()).transpose();
  C = 0.5 * (C + C.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(C, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Vec form_eigenvalues(const Lambda2Form& form) { return generalized_eigenvalues(form.entries, form.gram); }

double min_eig(const Lambda2Form& form) { return form_eigenvalues(form)(0); }

double two_smallest_sum(const Lambda2Form& form) {
  if (form.basis.size() < 2) throw DomainError("two_smallest_sum: needs dim Lambda^2 >= 2 (n >= 3)");
  const Vec ev = form_eigenvalues(form);
  return ev(0) + ev(1);
}

}  // namespace curvglue
