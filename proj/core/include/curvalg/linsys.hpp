#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "curvalg/scalar.hpp"

namespace curvalg {

// Dense row-major matrix over the generic scalar. Heavy float-mode numerics
// (eigensolves, SVD ranks) go through Eigen; exact-mode elimination is done
// here directly since it only needs field operations.
template <class S>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(std::size_t r, std::size_t c) : rows_(r), cols_(c), a_(r * c, scalar_traits<S>::zero()) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = scalar_traits<S>::one();
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  S& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  Mat operator+(const Mat& o) const {
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
  }
  Mat operator-(const Mat& o) const {
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
  }
  Mat operator*(const S& c) const {
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * c;
    return r;
  }
  Mat operator*(const Mat& o) const {
    Mat r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const S& x = (*this)(i, k);
        if (x == scalar_traits<S>::zero()) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += x * o(k, j);
      }
    return r;
  }

  Mat transposed() const {
    Mat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  S trace() const {
    S t = scalar_traits<S>::zero();
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  S max_abs() const {
    S m = scalar_traits<S>::zero();
    for (const S& x : a_) {
      S ax = scalar_traits<S>::abs(x);
      if (ax > m) m = ax;
    }
    return m;
  }

  const std::vector<S>& data() const { return a_; }
  std::vector<S>& data() { return a_; }

 private:
  std::size_t rows_, cols_;
  std::vector<S> a_;
};

template <class S>
Mat<S> operator*(const S& c, const Mat<S>& m) {
  return m * c;
}

inline Eigen::MatrixXd to_eigen(const Mat<double>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Mat<double> from_eigen(const Eigen::MatrixXd& e) {
  Mat<double> m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

// Gauss-Jordan with pivoting. For double the pivot is chosen by magnitude;
// for rationals any nonzero pivot is exact.
template <class S>
Mat<S> inverse(Mat<S> a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("inverse: square matrix required");
  Mat<S> inv = Mat<S>::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    S best = scalar_traits<S>::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      S v = scalar_traits<S>::abs(a(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == scalar_traits<S>::zero()) throw std::domain_error("inverse: singular matrix");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    S d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) = a(col, j) / d;
      inv(col, j) = inv(col, j) / d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      S f = a(r, col);
      if (f == scalar_traits<S>::zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

template <class S>
std::vector<S> solve(Mat<S> a, std::vector<S> b) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    S best = scalar_traits<S>::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      S v = scalar_traits<S>::abs(a(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == scalar_traits<S>::zero()) throw std::domain_error("solve: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      S f = a(r, col) / a(col, col);
      if (f == scalar_traits<S>::zero()) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  std::vector<S> x(n, scalar_traits<S>::zero());
  for (std::size_t i = n; i-- > 0;) {
    S acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
    x[i] = acc / a(i, i);
  }
  return x;
}

template <class S>
S determinant(Mat<S> a) {
  const std::size_t n = a.rows();
  S det = scalar_traits<S>::one();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    S best = scalar_traits<S>::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      S v = scalar_traits<S>::abs(a(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == scalar_traits<S>::zero()) return scalar_traits<S>::zero();
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      det = -det;
    }
    det *= a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      S f = a(r, col) / a(col, col);
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
    }
  }
  return det;
}

// Row-echelon rank. Exact for rationals; for double `tol` is the pivot floor
// relative to the largest entry.
template <class S>
std::size_t rank(Mat<S> a, double tol = 1e-9) {
  const std::size_t m = a.rows(), n = a.cols();
  S floor_v = scalar_traits<S>::zero();
  if constexpr (!scalar_traits<S>::exact) {
    floor_v = a.max_abs() * tol;
  }
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < m; ++col) {
    std::size_t piv = r;
    S best = scalar_traits<S>::abs(a(r, col));
    for (std::size_t i = r + 1; i < m; ++i) {
      S v = scalar_traits<S>::abs(a(i, col));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == scalar_traits<S>::zero() || (!scalar_traits<S>::exact && !(best > floor_v)))
      continue;
    if (piv != r)
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(r, j));
    for (std::size_t i = r + 1; i < m; ++i) {
      S f = a(i, col) / a(r, col);
      if (f == scalar_traits<S>::zero()) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(r, j);
    }
    ++r;
  }
  return r;
}

// Sorted ascending eigenvalues of a symmetric matrix (float only).
inline std::vector<double> sym_eigenvalues(const Mat<double>& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  return ev;
}

inline std::size_t svd_rank(const Mat<double>& m, double tol = 1e-8) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  double cutoff = sv(0) * tol;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return r;
}

}  // namespace curvalg
