#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvalg/basis.hpp"
#include "curvalg/curv.hpp"
#include "curvalg/tensor.hpp"
#include "curvalg/two_tensor.hpp"

namespace curvalg {

// ---------------------------------------------------------------------------
// the quadratic B-tensor and the product itself
// ---------------------------------------------------------------------------

namespace detail {

// X with the second and fourth slots raised, X_k^p_l^q, flattened as a
// (kl) x (pq) matrix for the contraction below.
template <class S>
Mat<S> slots24_raised_matrix(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const std::size_t n = sp.dim();
  Mat<S> m(n * n, n * n);
  if (sp.is_euclidean()) {
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = 0; q < n; ++q) m(k * n + l, p * n + q) = x.at(k, p, l, q);
    return m;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
          S acc = scalar_traits<S>::zero();
          for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
              acc += sp.h_inv()(p, a) * sp.h_inv()(q, b) * x.at(k, a, l, b);
          m(k * n + l, p * n + q) = acc;
        }
  return m;
}

template <class S>
Mat<S> slots24_matrix(const Tensor<S>& x) {
  const std::size_t n = x.dim();
  Mat<S> m(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) m(i * n + j, p * n + q) = x.at(i, p, j, q);
  return m;
}

inline Mat<double> matmul_abt(const Mat<double>& a, const Mat<double>& b) {
  Eigen::MatrixXd r = to_eigen(a) * to_eigen(b).transpose();
  return from_eigen(r);
}

template <class S>
Mat<S> matmul_abt(const Mat<S>& a, const Mat<S>& b) {
  return a * b.transposed();
}

}  // namespace detail

// B(X, Y)_ijkl = (X_ipjq Y_k^p_l^q + Y_ipjq X_k^p_l^q) / 2.
template <class S>
Tensor<S> b_tensor(const MetricSpace<S>& sp, const Tensor<S>& x, const Tensor<S>& y) {
  const std::size_t n = sp.dim();
  Mat<S> xm = detail::slots24_matrix(x);          // (ij),(pq) = X_ipjq
  Mat<S> yr = detail::slots24_raised_matrix(sp, y);  // (kl),(pq) = Y_k^p_l^q
  Mat<S> b1 = detail::matmul_abt(xm, yr);         // (ij),(kl)
  Mat<S> b2;
  if (sp.is_euclidean()) {
    b2 = b1.transposed();
  } else {
    Mat<S> ym = detail::slots24_matrix(y);
    Mat<S> xr = detail::slots24_raised_matrix(sp, x);
    b2 = detail::matmul_abt(ym, xr);
  }
  Tensor<S> b(n, 4);
  const S half = scalar_traits<S>::from_fraction(1, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          b.at(i, j, k, l) = (b1(i * n + j, k * n + l) + b2(i * n + j, k * n + l)) * half;
  return b;
}

// (X * Y)_ijkl = B_ijkl - B_ijlk + B_ikjl - B_iljk.
template <class S>
Tensor<S> curvmult(const MetricSpace<S>& sp, const Tensor<S>& x, const Tensor<S>& y) {
  Tensor<S> b = b_tensor(sp, x, y);
  const std::size_t n = sp.dim();
  Tensor<S> r(n, 4);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          r.at(i, j, k, l) =
              b.at(i, j, k, l) - b.at(i, j, l, k) + b.at(i, k, j, l) - b.at(i, l, j, k);
  return r;
}

// Alternative route: left multiplication is the induced operator on the
// curvature space itself, X * Y = op(X)(Y). Kept as a standing cross-check.
template <class S>
Tensor<S> curvmult_via_op(const MetricSpace<S>& sp, const Tensor<S>& x, const Tensor<S>& y) {
  return op_mcurv(sp, x, y);
}

// 6 P(X) = <X * X, X>.
template <class S>
S cubic_p(const MetricSpace<S>& sp, const Tensor<S>& x) {
  return inner(sp, curvmult(sp, x, x), x) * scalar_traits<S>::from_fraction(1, 6);
}

// Gradient of P: dP(X)[Y] = <X * X, Y> / 2.
template <class S>
Tensor<S> cubic_p_gradient(const MetricSpace<S>& sp, const Tensor<S>& x) {
  return curvmult(sp, x, x) * scalar_traits<S>::from_fraction(1, 2);
}

// ---------------------------------------------------------------------------
// closed-form product oracle library
// ---------------------------------------------------------------------------

// (a ^ b) * (c ^ d) for symmetric 2-tensors.
template <class S>
Tensor<S> closed_wedge_wedge(const MetricSpace<S>& sp, const Mat<S>& a, const Mat<S>& b,
                             const Mat<S>& c, const Mat<S>& d) {
  auto frac = [](long p, long q) { return scalar_traits<S>::from_fraction(p, q); };
  auto cmp = [&](const Mat<S>& u, const Mat<S>& v, const Mat<S>& w) {
    return compose(sp, compose(sp, u, v), w);
  };
  Tensor<S> r = (kwedge(b, d) * inner2(sp, a, c) + kwedge(b, c) * inner2(sp, a, d) +
                 kwedge(a, d) * inner2(sp, b, c) + kwedge(a, c) * inner2(sp, b, d)) *
                frac(1, 4);
  r -= (kwedge(a, cmp(c, b, d) + cmp(d, b, c)) + kwedge(b, cmp(c, a, d) + cmp(d, a, c))) * frac(1, 4);
  r -= (kwedge(c, cmp(a, d, b) + cmp(b, d, a)) + kwedge(d, cmp(a, c, b) + cmp(b, c, a))) * frac(1, 4);
  r += (cdot(bracket(sp, a, c), bracket(sp, b, d)) + cdot(bracket(sp, a, d), bracket(sp, b, c))) *
       frac(1, 8);
  r += (kwedge(jmult(sp, a, c), jmult(sp, b, d)) + kwedge(jmult(sp, a, d), jmult(sp, b, c))) *
       frac(1, 2);
  return r;
}

// (a . b) * (c ^ d) for two-forms a, b and symmetric c, d.
template <class S>
Tensor<S> closed_cdot_wedge(const MetricSpace<S>& sp, const Mat<S>& a, const Mat<S>& b,
                            const Mat<S>& c, const Mat<S>& d) {
  auto frac = [](long p, long q) { return scalar_traits<S>::from_fraction(p, q); };
  auto cmp = [&](const Mat<S>& u, const Mat<S>& v, const Mat<S>& w) {
    return compose(sp, compose(sp, u, v), w);
  };
  Tensor<S> r = (cdot(a, cmp(c, b, d) + cmp(d, b, c)) + cdot(b, cmp(c, a, d) + cmp(d, a, c))) *
                frac(1, 4);
  r -= (kwedge(c, cmp(a, d, b) + cmp(b, d, a)) + kwedge(d, cmp(a, c, b) + cmp(b, c, a))) * frac(3, 4);
  r -= (cdot(jmult(sp, a, c), jmult(sp, b, d)) + cdot(jmult(sp, a, d), jmult(sp, b, c))) * frac(1, 2);
  r += (kwedge(bracket(sp, c, a), bracket(sp, d, b)) + kwedge(bracket(sp, d, a), bracket(sp, c, b))) *
       frac(3, 8);
  return r;
}

// (a . b) * (c . d) for two-forms.
template <class S>
Tensor<S> closed_cdot_cdot(const MetricSpace<S>& sp, const Mat<S>& a, const Mat<S>& b,
                           const Mat<S>& c, const Mat<S>& d) {
  auto frac = [](long p, long q) { return scalar_traits<S>::from_fraction(p, q); };
  auto cmp = [&](const Mat<S>& u, const Mat<S>& v, const Mat<S>& w) {
    return compose(sp, compose(sp, u, v), w);
  };
  Tensor<S> r = (cdot(b, d) * inner2(sp, a, c) + cdot(b, c) * inner2(sp, a, d) +
                 cdot(a, d) * inner2(sp, b, c) + cdot(a, c) * inner2(sp, b, d)) *
                frac(1, 4);
  r -= (cdot(cmp(a, c, b) + cmp(b, c, a), d) + cdot(cmp(a, d, b) + cmp(b, d, a), c) +
        cdot(cmp(c, a, d) + cmp(d, a, c), b) + cdot(cmp(c, b, d) + cmp(d, b, c), a)) *
       frac(1, 4);
  r += (cdot(bracket(sp, a, c), bracket(sp, b, d)) + cdot(bracket(sp, b, c), bracket(sp, a, d))) *
       frac(5, 8);
  r -= (kwedge(jmult(sp, a, c), jmult(sp, b, d)) + kwedge(jmult(sp, b, c), jmult(sp, a, d))) *
       frac(3, 2);
  return r;
}

// X * (a ^ h) = -(op(X)(a) ^ h + a ^ rictr(X)) / 2 for symmetric a.
template <class S>
Tensor<S> closed_x_wedge_h(const MetricSpace<S>& sp, const Tensor<S>& x, const Mat<S>& a) {
  Mat<S> opa = op2(sp, x, a);
  Tensor<S> r = kwedge(opa, sp.h()) + kwedge(a, rictr(sp, x));
  return r * scalar_traits<S>::from_fraction(-1, 2);
}

// (h ^ a) * (h ^ b), symmetric a, b.
template <class S>
Tensor<S> closed_wedge_h_wedge_h(const MetricSpace<S>& sp, const Mat<S>& a, const Mat<S>& b) {
  const long n = static_cast<long>(sp.dim());
  auto frac = [](long p, long q) { return scalar_traits<S>::from_fraction(p, q); };
  Tensor<S> r = kwedge(a, b) * frac(n - 2, 4);
  r -= kwedge(sp.h(), jmult(sp, a, b)) * frac(1, 2);
  r += h_kwedge_h(sp) * (inner2(sp, a, b) * frac(1, 4));
  r += kwedge(sp.h(), b) * (trace2(sp, a) * frac(1, 4));
  r += kwedge(sp.h(), a) * (trace2(sp, b) * frac(1, 4));
  return r;
}

// (a ^ h) * (h ^ h) = (n-2)/2 h ^ a + tr(a)/2 h ^ h.
template <class S>
Tensor<S> closed_wedge_h_hh(const MetricSpace<S>& sp, const Mat<S>& a) {
  const long n = static_cast<long>(sp.dim());
  return kwedge(sp.h(), a) * scalar_traits<S>::from_fraction(n - 2, 2) +
         h_kwedge_h(sp) * (trace2(sp, a) * scalar_traits<S>::from_fraction(1, 2));
}

// (a ^ a) * (a ^ a) for symmetric a.
template <class S>
Tensor<S> closed_sym_fourth_power(const MetricSpace<S>& sp, const Mat<S>& a) {
  Mat<S> a2 = compose(sp, a, a);
  Mat<S> a3 = compose(sp, a2, a);
  return kwedge(a, a) * inner2(sp, a, a) - kwedge(a, a3) * scalar_traits<S>::from_int(2) +
         kwedge(a2, a2);
}

// (a . a) * (a . a) = |a|^2 a.a - 2 (a o a o a).a - 3 (a o a)^(a o a), a in Lambda^2.
template <class S>
Tensor<S> closed_cdot_fourth_power(const MetricSpace<S>& sp, const Mat<S>& a) {
  Mat<S> a2 = compose(sp, a, a);
  Mat<S> a3 = compose(sp, a2, a);
  return cdot(a, a) * inner2(sp, a, a) - cdot(a3, a) * scalar_traits<S>::from_int(2) -
         kwedge(a2, a2) * scalar_traits<S>::from_int(3);
}

// (a . b) * (a . b) for two-forms.
template <class S>
Tensor<S> closed_cdot_pair_square(const MetricSpace<S>& sp, const Mat<S>& a, const Mat<S>& b) {
  auto frac = [](long p, long q) { return scalar_traits<S>::from_fraction(p, q); };
  Mat<S> a2 = compose(sp, a, a);
  Mat<S> b2 = compose(sp, b, b);
  Mat<S> br = bracket(sp, a, b);
  Tensor<S> r = cdot(a, a) * (inner2(sp, b, b) * frac(1, 4));
  r += cdot(b, b) * (inner2(sp, a, a) * frac(1, 4));
  r += cdot(b, a) * (inner2(sp, a, b) * frac(1, 2));
  r -= cdot(br, br) * frac(5, 8);
  r -= cdot(jmult(sp, a, b2), a);
  r -= cdot(jmult(sp, a2, b), b);
  r -= kwedge(a2, b2) * frac(3, 2);
  r -= kwedge(jmult(sp, a, b), jmult(sp, a, b)) * frac(3, 2);
  return r;
}

// Named dispatch for the oracle library; arguments are 2-tensors except for
// the curvature argument of "x_wedge_h".
template <class S>
Tensor<S> closed_form_product(const MetricSpace<S>& sp, const std::string& kind,
                              const std::vector<Mat<S>>& args,
                              const Tensor<S>* curv_arg = nullptr) {
  if (kind == "wedge_wedge") return closed_wedge_wedge(sp, args[0], args[1], args[2], args[3]);
  if (kind == "cdot_wedge") return closed_cdot_wedge(sp, args[0], args[1], args[2], args[3]);
  if (kind == "cdot_cdot") return closed_cdot_cdot(sp, args[0], args[1], args[2], args[3]);
  if (kind == "wedge_h_wedge_h") return closed_wedge_h_wedge_h(sp, args[0], args[1]);
  if (kind == "wedge_h_hh") return closed_wedge_h_hh(sp, args[0]);
  if (kind == "sym_fourth_power") return closed_sym_fourth_power(sp, args[0]);
  if (kind == "cdot_fourth_power") return closed_cdot_fourth_power(sp, args[0]);
  if (kind == "cdot_pair_square") return closed_cdot_pair_square(sp, args[0], args[1]);
  if (kind == "x_wedge_h") {
    if (!curv_arg) throw std::invalid_argument("x_wedge_h needs a curvature argument");
    return closed_x_wedge_h(sp, *curv_arg, args[0]);
  }
  throw std::invalid_argument("unknown closed-form product kind: " + kind);
}

// ---------------------------------------------------------------------------
// left multiplication, trace form, and the cubic polynomial
// ---------------------------------------------------------------------------

template <class S>
struct TraceFormReport {
  std::string tag;
  Mat<S> tau;          // trace form on the basis
  S kappa;             // fitted proportionality constant (tau_00 / gram_00)
  S max_deviation;     // max |tau - kappa Gram|
  S max_trace;         // max |tr L(B_i)|
  S closure_leakage;   // max distance of a product from the span
};

template <class S>
LinearMap<S> left_mult_matrix(const MetricSpace<S>& sp, const Tensor<S>& x, const Basis<S>& basis,
                              S* leakage = nullptr) {
  const std::size_t d = basis.size();
  Mat<S> m(d, d);
  S leak = scalar_traits<S>::zero();
  for (std::size_t j = 0; j < d; ++j) {
    Tensor<S> prod = curvmult(sp, x, basis[j]);
    auto coords = basis.coordinates(prod);
    for (std::size_t i = 0; i < d; ++i) m(i, j) = coords[i];
    S r = (prod - basis.combine(coords)).max_abs();
    if (r > leak) leak = r;
  }
  if (leakage) *leakage = leak;
  return LinearMap<S>{std::move(m)};
}

// Full symmetric structure coefficients C_ijk = <B_i * B_j, B_k> plus the
// trace form assembled from them. The basis must be *-closed; the leakage of
// products out of the span is measured and reported.
template <class S>
TraceFormReport<S> trace_form(const MetricSpace<S>& sp, const Basis<S>& basis) {
  const std::size_t d = basis.size();
  Mat<S> gram = basis.gram();
  std::vector<std::vector<std::vector<S>>> c(
      d, std::vector<std::vector<S>>(d, std::vector<S>(d, scalar_traits<S>::zero())));
  S leak = scalar_traits<S>::zero();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      Tensor<S> prod = curvmult(sp, basis[i], basis[j]);
      auto coords = basis.coordinates(prod);
      for (std::size_t k = 0; k < d; ++k) {
        c[i][j][k] = coords[k];
        c[j][i][k] = coords[k];
      }
      S r = (prod - basis.combine(coords)).max_abs();
      if (r > leak) leak = r;
    }
  TraceFormReport<S> rep;
  rep.tag = basis.tag();
  rep.closure_leakage = leak;
  rep.max_trace = scalar_traits<S>::zero();
  for (std::size_t i = 0; i < d; ++i) {
    S tr = scalar_traits<S>::zero();
    for (std::size_t k = 0; k < d; ++k) tr += c[i][k][k];
    S a = scalar_traits<S>::abs(tr);
    if (a > rep.max_trace) rep.max_trace = a;
  }
  rep.tau = Mat<S>(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      // tau_ij = tr L(B_i) L(B_j) = sum_{k,l} C_ikl C_jlk (orthonormal basis)
      S acc = scalar_traits<S>::zero();
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l) acc += c[i][l][k] * c[j][k][l];
      rep.tau(i, j) = acc;
      rep.tau(j, i) = acc;
    }
  rep.kappa = rep.tau(0, 0) / gram(0, 0);
  rep.max_deviation = (rep.tau - gram * rep.kappa).max_abs();
  return rep;
}

// ---------------------------------------------------------------------------
// the identity relating products and commutators of induced operators
// ---------------------------------------------------------------------------

// Residual of
//   2 <a, op(X*Y)(b)> = -<a, (op(X) op(Y) + op(Y) op(X))(b)>
//                     + tr(ad(a) op(X) ad(b) op(Y) + ad(a) op(Y) ad(b) op(X)),
// for two-forms a, b, with every trace taken over Lambda^2.
template <class S>
S wilking_identity_residual(const MetricSpace<S>& sp, const Tensor<S>& x, const Tensor<S>& y,
                            const Mat<S>& a, const Mat<S>& b) {
  Basis<S> ext2 = two_form_basis(sp);
  auto op_mat = [&](const Tensor<S>& t) {
    return operator_matrix(ext2, [&](const Tensor<S>& arg) {
      return to_tensor(op2(sp, t, to_mat(arg)));
    }).matrix;
  };
  auto ad_mat = [&](const Mat<S>& f) {
    return operator_matrix(ext2, [&](const Tensor<S>& arg) {
      return to_tensor(bracket(sp, f, to_mat(arg)));
    }).matrix;
  };
  Mat<S> opx = op_mat(x), opy = op_mat(y);
  Mat<S> ada = ad_mat(a), adb = ad_mat(b);
  Tensor<S> xy = curvmult(sp, x, y);
  S lhs = inner2(sp, a, op2(sp, xy, b)) * scalar_traits<S>::from_int(2);
  S rhs = -(inner2(sp, a, op2(sp, x, op2(sp, y, b))) + inner2(sp, a, op2(sp, y, op2(sp, x, b))));
  rhs += (ada * opx * adb * opy).trace() + (ada * opy * adb * opx).trace();
  return scalar_traits<S>::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// scaling endomorphisms of the Ricci and scalar parts
// ---------------------------------------------------------------------------

// bw_{a,b}(X) = tf(X) + b Pi_ric(X) + a Pi_scal(X); invertible iff a,b != 0.
template <class S>
Tensor<S> bw(const MetricSpace<S>& sp, const S& a, const S& b, const Tensor<S>& x) {
  if (a == scalar_traits<S>::zero() || b == scalar_traits<S>::zero())
    throw std::invalid_argument("bw: parameters must be nonzero");
  return tf(sp, x) + proj_ric(sp, x) * b + proj_scal(sp, x) * a;
}

template <class S>
Tensor<S> bw_inverse(const MetricSpace<S>& sp, const S& a, const S& b, const Tensor<S>& x) {
  return bw(sp, scalar_traits<S>::one() / a, scalar_traits<S>::one() / b, x);
}

// Two-route evaluation: bw^{-1}(bw(X) * bw(X)) - X * X.
template <class S>
Tensor<S> dbw_two_route(const MetricSpace<S>& sp, const S& a, const S& b, const Tensor<S>& x) {
  Tensor<S> bx = bw(sp, a, b, x);
  return bw_inverse(sp, a, b, curvmult(sp, bx, bx)) - curvmult(sp, x, x);
}

// Closed form; independent of the Weyl part of X.
template <class S>
Tensor<S> dbw_closed(const MetricSpace<S>& sp, const S& a, const S& b, const Tensor<S>& x) {
  const long n = static_cast<long>(sp.dim());
  const S one = scalar_traits<S>::one();
  auto frac = [](long p, long q) { return scalar_traits<S>::from_fraction(p, q); };
  Mat<S> rz = rictr_traceless(sp, x);
  Tensor<S> rr = kwedge(rz, rz);
  S sc = scal(sp, x);
  Tensor<S> out = tf(sp, rr) * ((b * b - one) * frac(1, n - 2));
  Tensor<S> ric_arg = rr * ((b - one) * frac(2, n - 2)) + x * (sc * (one - a) * frac(n - 2, n * (n - 1)));
  out += proj_ric(sp, ric_arg);
  Tensor<S> scal_arg = rr * (one - b * b / a) + x * (sc * (one - a) * frac(1, n));
  out += proj_scal(sp, scal_arg);
  return out;
}

// ---------------------------------------------------------------------------
// fusion rules of the scalar / Ricci / Weyl summands
// ---------------------------------------------------------------------------

template <class S>
struct FusionReport {
  S max_forbidden_leakage = scalar_traits<S>::zero();
  bool surjectivity_ok = true;
  std::vector<std::string> failures;
};

// Checks that products of the distinguished summands land where the fusion
// rules say, and (float mode) that the equalities are onto.
template <class S>
FusionReport<S> fusion_check(const MetricSpace<S>& sp, Prng& rng, std::size_t samples = 6) {
  const std::size_t n = sp.dim();
  FusionReport<S> rep;
  Basis<S> bw_basis = weyl_basis(sp);
  Basis<S> br = ric_basis(sp);
  Basis<S> bs = scal_basis(sp);

  auto leakage_outside = [&](const Tensor<S>& t, const std::vector<const Basis<S>*>& allowed) {
    Tensor<S> rem = t;
    for (const auto* bp : allowed) rem -= bp->project(rem);
    return rem.max_abs();
  };
  auto upd = [&](const S& v, const std::string& what) {
    if (v > rep.max_forbidden_leakage) rep.max_forbidden_leakage = v;
    (void)what;
  };

  for (std::size_t s = 0; s < samples; ++s) {
    Tensor<S> w = bw_basis.size() ? bw_basis.random_element(rng) : Tensor<S>(n, 4);
    Tensor<S> r1 = br.random_element(rng);
    Tensor<S> r2 = br.random_element(rng);
    Tensor<S> sc = bs.random_element(rng);
    // scal * scal stays scalar
    upd(leakage_outside(curvmult(sp, sc, sc), {&bs}), "ss");
    // ric * scal stays ric
    upd(leakage_outside(curvmult(sp, r1, sc), {&br}), "rs");
    // weyl * scal vanishes
    if (bw_basis.size()) upd(curvmult(sp, w, sc).max_abs(), "ws");
    // weyl * ric stays ric
    if (bw_basis.size()) upd(leakage_outside(curvmult(sp, w, r1), {&br}), "wr");
    // weyl * weyl stays weyl
    if (bw_basis.size()) upd(leakage_outside(curvmult(sp, w, w), {&bw_basis}), "ww");
    // ric * ric meets every summand; no constraint beyond membership
    upd(leakage_outside(curvmult(sp, r1, r2), {&bw_basis, &br, &bs}), "rr");
  }

  if constexpr (!scalar_traits<S>::exact) {
    // surjectivity of the equalities, by rank of sampled products
    auto span_rank = [&](const Basis<S>& target, auto&& make_sample, std::size_t count) {
      Mat<S> m(count, target.size());
      for (std::size_t i = 0; i < count; ++i) {
        Tensor<S> t = make_sample();
        auto coords = target.coordinates(t);
        for (std::size_t j = 0; j < target.size(); ++j) m(i, j) = coords[j];
      }
      return svd_rank(m, 1e-8);
    };
    std::size_t cnt_w = bw_basis.size() + 4;
    if (n > 3 && bw_basis.size()) {
      // tf(ric * ric) spans weyl
      std::size_t rk = span_rank(
          bw_basis,
          [&] { return tf(sp, curvmult(sp, br.random_element(rng), br.random_element(rng))); },
          cnt_w);
      if (rk != bw_basis.size()) {
        rep.surjectivity_ok = false;
        rep.failures.push_back("ric*ric does not span weyl");
      }
      // weyl * ric spans ric
      std::size_t rk2 = span_rank(
          br,
          [&] { return curvmult(sp, bw_basis.random_element(rng), br.random_element(rng)); },
          br.size() + 4);
      if (rk2 != br.size()) {
        rep.surjectivity_ok = false;
        rep.failures.push_back("weyl*ric does not span ric");
      }
    }
    if (n > 4 && bw_basis.size()) {
      std::size_t rk = span_rank(
          bw_basis,
          [&] { return curvmult(sp, bw_basis.random_element(rng), bw_basis.random_element(rng)); },
          cnt_w);
      if (rk != bw_basis.size()) {
        rep.surjectivity_ok = false;
        rep.failures.push_back("weyl*weyl does not span weyl");
      }
    }
    if (n > 2) {
      std::size_t rk = span_rank(
          br, [&] { return curvmult(sp, br.random_element(rng), bs.random_element(rng)); },
          br.size() + 4);
      if (rk != br.size()) {
        rep.surjectivity_ok = false;
        rep.failures.push_back("ric*scal does not span ric");
      }
    }
  }
  return rep;
}

}  // namespace curvalg
