#pragma once

#include <cstddef>
#include <vector>

#include "curvalg/linsys.hpp"
#include "curvalg/metric_space.hpp"
#include "curvalg/tensor.hpp"

namespace curvalg {

// 2-tensors are kept as n x n covariant matrices alpha_ij. Conversions to the
// generic Tensor are provided where rank-4 assembly needs them.

template <class S>
Mat<S> to_mat(const Tensor<S>& t) {
  Mat<S> m(t.dim(), t.dim());
  for (std::size_t i = 0; i < t.dim(); ++i)
    for (std::size_t j = 0; j < t.dim(); ++j) m(i, j) = t.at(i, j);
  return m;
}

template <class S>
Tensor<S> to_tensor(const Mat<S>& m) {
  Tensor<S> t(m.rows(), 2);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t.at(i, j) = m(i, j);
  return t;
}

// (alpha o beta)_i^j = alpha_p^j beta_i^p; covariant components B h^{-1} A.
template <class S>
Mat<S> compose(const MetricSpace<S>& sp, const Mat<S>& alpha, const Mat<S>& beta) {
  if (sp.is_euclidean()) return beta * alpha;
  return beta * sp.h_inv() * alpha;
}

template <class S>
Mat<S> jmult(const MetricSpace<S>& sp, const Mat<S>& a, const Mat<S>& b) {
  Mat<S> r = compose(sp, a, b) + compose(sp, b, a);
  return r * scalar_traits<S>::from_fraction(1, 2);
}

template <class S>
Mat<S> bracket(const MetricSpace<S>& sp, const Mat<S>& a, const Mat<S>& b) {
  return compose(sp, a, b) - compose(sp, b, a);
}

// trace of the endomorphism alpha_i^j
template <class S>
S trace2(const MetricSpace<S>& sp, const Mat<S>& a) {
  S t = scalar_traits<S>::zero();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t += a(i, j) * sp.h_inv()(i, j);
  return t;
}

template <class S>
S inner2(const MetricSpace<S>& sp, const Mat<S>& a, const Mat<S>& b) {
  S t = scalar_traits<S>::zero();
  const std::size_t n = sp.dim();
  if (sp.is_euclidean()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) t += a(i, j) * b(i, j);
    return t;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
          t += a(i, j) * b(p, q) * sp.h_inv()(i, p) * sp.h_inv()(j, q);
  return t;
}

// Composition trace tr(a o b o c o ...) in the stated order.
template <class S>
S compose_trace(const MetricSpace<S>& sp, const std::vector<Mat<S>>& chain) {
  Mat<S> acc = chain[0];
  for (std::size_t i = 1; i < chain.size(); ++i) acc = compose(sp, acc, chain[i]);
  return trace2(sp, acc);
}

// Covector wedge (x dwedge y)_ij = x_i y_j - x_j y_i.
template <class S>
Mat<S> wedge_cov(const std::vector<S>& x, const std::vector<S>& y) {
  const std::size_t n = x.size();
  Mat<S> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = x[i] * y[j] - x[j] * y[i];
  return m;
}

// Symmetric product (x sprod y)_ij = x_(i y_j).
template <class S>
Mat<S> sym_cov(const std::vector<S>& x, const std::vector<S>& y) {
  const std::size_t n = x.size();
  const S half = scalar_traits<S>::from_fraction(1, 2);
  Mat<S> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (x[i] * y[j] + x[j] * y[i]) * half;
  return m;
}

template <class S>
Mat<S> outer_cov(const std::vector<S>& x, const std::vector<S>& y) {
  const std::size_t n = x.size();
  Mat<S> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = x[i] * y[j];
  return m;
}

template <class S>
std::vector<S> basis_covector(std::size_t n, std::size_t i) {
  std::vector<S> e(n, scalar_traits<S>::zero());
  e[i] = scalar_traits<S>::one();
  return e;
}

// so(n) action on an arbitrary covariant tensor, the derivative of the
// orthogonal group action: (alpha . T) = -sum_s alpha_{i_s}^p T_{...p...}.
template <class S>
Tensor<S> lie_action(const MetricSpace<S>& sp, const Mat<S>& alpha, const Tensor<S>& t) {
  const std::size_t n = sp.dim();
  Mat<S> alpha_mixed = sp.is_euclidean() ? alpha : alpha * sp.h_inv();  // alpha_i^p
  Tensor<S> r(n, t.rank());
  std::vector<std::size_t> src(t.rank());
  detail::for_each_index(n, t.rank(), [&](const std::vector<std::size_t>& ix) {
    S acc = scalar_traits<S>::zero();
    for (std::size_t s = 0; s < t.rank(); ++s) {
      src = ix;
      for (std::size_t p = 0; p < n; ++p) {
        const S& c = alpha_mixed(ix[s], p);
        if (c == scalar_traits<S>::zero()) continue;
        src[s] = p;
        acc -= c * t[t.offset(src)];
      }
      src[s] = ix[s];
    }
    r[r.offset(ix)] = acc;
  });
  return r;
}

// Finite orthogonal action g . T for covariant tensors: (g.T)_{i...} =
// g^{j}_{i} ... T_{j...}, with g given as the matrix g_i^j of an h-orthogonal
// endomorphism.
template <class S>
Tensor<S> orthogonal_action(const MetricSpace<S>& sp, const Mat<S>& g, const Tensor<S>& t) {
  const std::size_t n = sp.dim();
  // inverse-transpose action on covariant slots: (g.T)(x_1,..) = T(g^{-1}x_1,..)
  Mat<S> ginv = inverse(g);
  Tensor<S> cur = t;
  for (std::size_t slot = 0; slot < t.rank(); ++slot) {
    Tensor<S> next(n, t.rank());
    std::vector<std::size_t> src;
    detail::for_each_index(n, t.rank(), [&](const std::vector<std::size_t>& ix) {
      S acc = scalar_traits<S>::zero();
      src = ix;
      for (std::size_t p = 0; p < n; ++p) {
        src[slot] = p;
        acc += ginv(ix[slot], p) * cur[cur.offset(src)];
      }
      next[next.offset(ix)] = acc;
    });
    cur = std::move(next);
  }
  return cur;
}

template <class S>
Mat<S> orthogonal_action2(const MetricSpace<S>& sp, const Mat<S>& g, const Mat<S>& a) {
  return to_mat(orthogonal_action(sp, g, to_tensor(a)));
}

// Random h-orthogonal matrix g_i^j (float only): g H g^T = H. Conjugates a
// Euclidean-orthogonal Q by the Cholesky factor of h, g = L Q L^{-1}.
inline Mat<double> random_orthogonal(const MetricSpace<double>& sp, Prng& rng) {
  const std::size_t n = sp.dim();
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.next_symmetric();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  if (sp.is_euclidean()) return from_eigen(q);
  Eigen::LLT<Eigen::MatrixXd> llt(to_eigen(sp.h()));
  Eigen::MatrixXd L = llt.matrixL();
  return from_eigen(L * q * L.inverse());
}

}  // namespace curvalg
