#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "curvalg/basis.hpp"
#include "curvalg/curv.hpp"
#include "curvalg/curvmult.hpp"
#include "curvalg/idempotents.hpp"
#include "curvalg/metric_space.hpp"
#include "curvalg/two_tensor.hpp"

namespace curvalg {

// ---------------------------------------------------------------------------
// volume form and Hodge star in dimension four
// ---------------------------------------------------------------------------

// eps_{ijkl} = sign(perm) * sqrt(det h); <eps, eps> = 4! and an oriented
// h-orthonormal frame evaluates to one. Pass flip = true to reverse the
// orientation.
template <class S>
Tensor<S> epsilon4(const MetricSpace<S>& sp, bool flip = false) {
  if (sp.dim() != 4) throw std::domain_error("epsilon4 requires dimension four");
  if (!sp.oriented()) throw std::domain_error("space is not oriented");
  S scale = sp.epsilon_scale();
  if (flip) scale = -scale;
  Tensor<S> eps(4, 4);
  std::size_t p[4];
  for (p[0] = 0; p[0] < 4; ++p[0])
    for (p[1] = 0; p[1] < 4; ++p[1])
      for (p[2] = 0; p[2] < 4; ++p[2])
        for (p[3] = 0; p[3] < 4; ++p[3]) {
          int sign = 1;
          bool repeat = false;
          for (int i = 0; i < 4 && !repeat; ++i)
            for (int j = i + 1; j < 4; ++j) {
              if (p[i] == p[j]) {
                repeat = true;
                break;
              }
              if (p[i] > p[j]) sign = -sign;
            }
          if (repeat) continue;
          eps.at(p[0], p[1], p[2], p[3]) =
              sign > 0 ? scale : -scale;
        }
  return eps;
}

// Hodge star on two-forms, (star a)_ij = eps_ij^{pq} a_pq / 2.
template <class S>
Mat<S> star2(const MetricSpace<S>& sp, const Tensor<S>& eps, const Mat<S>& a) {
  const std::size_t n = 4;
  Mat<S> ar(n, n);
  if (sp.is_euclidean()) {
    ar = a;
  } else {
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) {
        S acc = scalar_traits<S>::zero();
        for (std::size_t u = 0; u < n; ++u)
          for (std::size_t v = 0; v < n; ++v)
            acc += sp.h_inv()(p, u) * sp.h_inv()(q, v) * a(u, v);
        ar(p, q) = acc;
      }
  }
  Mat<S> out(n, n);
  const S half = scalar_traits<S>::from_fraction(1, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      S acc = scalar_traits<S>::zero();
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) acc += eps.at(i, j, p, q) * ar(p, q);
      out(i, j) = acc * half;
    }
  return out;
}

// Star involution on Weyl tensors, (star X)_ijkl = eps_ij^{ab} X_abkl / 2.
template <class S>
Tensor<S> star_weyl(const MetricSpace<S>& sp, const Tensor<S>& eps, const Tensor<S>& x) {
  const std::size_t n = 4;
  Tensor<S> xr = raise_all(sp, x);
  // only the first two slots of eps need raising; with x fully raised,
  // contract (star X)_ijkl = eps_ijab X^{ab}_{kl} / 2 with kl lowered, so use
  // the mixed version: eps covariant, X with first two slots raised.
  Tensor<S> xm(4, 4);
  if (sp.is_euclidean()) {
    xm = x;
  } else {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) {
            S acc = scalar_traits<S>::zero();
            for (std::size_t u = 0; u < n; ++u)
              for (std::size_t v = 0; v < n; ++v)
                acc += sp.h_inv()(a, u) * sp.h_inv()(b, v) * x.at(u, v, k, l);
            xm.at(a, b, k, l) = acc;
          }
  }
  Tensor<S> out(4, 4);
  const S half = scalar_traits<S>::from_fraction(1, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          S acc = scalar_traits<S>::zero();
          for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) acc += eps.at(i, j, a, b) * xm.at(a, b, k, l);
          out.at(i, j, k, l) = acc * half;
        }
  return out;
}

// Self-dual / anti-self-dual split of two-forms and of the Weyl space.
template <class S>
struct SelfDualSplit {
  Tensor<S> eps;
  Basis<S> forms_sd;
  Basis<S> forms_asd;
  Basis<S> weyl_sd;
  Basis<S> weyl_asd;
};

template <class S>
SelfDualSplit<S> hodge_split(const MetricSpace<S>& sp, bool flip = false) {
  if (sp.dim() != 4) throw std::domain_error("hodge_split requires dimension four");
  Tensor<S> eps = epsilon4(sp, flip);
  const S half = scalar_traits<S>::from_fraction(1, 2);
  std::vector<Tensor<S>> sd, asd;
  for (auto& f : two_form_generators(sp)) {
    Mat<S> m = to_mat(f);
    Mat<S> sm = star2(sp, eps, m);
    sd.push_back(to_tensor((m + sm) * half));
    asd.push_back(to_tensor((m - sm) * half));
  }
  std::vector<Tensor<S>> wsd, wasd;
  for (auto& w : weyl_generators(sp)) {
    Tensor<S> sw = star_weyl(sp, eps, w);
    wsd.push_back((w + sw) * half);
    wasd.push_back((w - sw) * half);
  }
  SelfDualSplit<S> out{std::move(eps), orthonormalize(sp, "ext2-sd", std::move(sd)),
                       orthonormalize(sp, "ext2-asd", std::move(asd)),
                       orthonormalize(sp, "sd-weyl", std::move(wsd)),
                       orthonormalize(sp, "asd-weyl", std::move(wasd))};
  return out;
}

// ---------------------------------------------------------------------------
// Bel-Robinson tensor
// ---------------------------------------------------------------------------

// D_ij = X_(i^{abc} Y_j)abc, the symmetrized triple contraction.
template <class S>
Mat<S> triple_contraction_sym(const MetricSpace<S>& sp, const Tensor<S>& x, const Tensor<S>& y) {
  const std::size_t n = sp.dim();
  Tensor<S> yr = raise_all(sp, y);
  Mat<S> d(n, n);
  const S half = scalar_traits<S>::from_fraction(1, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      S acc = scalar_traits<S>::zero();
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t c = 0; c < n; ++c)
            acc += x.at(i, a, b, c) * yr.at(j, a, b, c) + x.at(j, a, b, c) * yr.at(i, a, b, c);
      d(i, j) = acc * half;
    }
  return d;
}

// The generalized Bel-Robinson tensor of a pair of curvature tensors:
// Q_ijkl = B_ikjl + B_iljk - h_ij D_kl / 2 - h_kl D_ij / 2 + <X,Y> h_ij h_kl / 8.
template <class S>
Tensor<S> bel_robinson(const MetricSpace<S>& sp, const Tensor<S>& x, const Tensor<S>& y) {
  const std::size_t n = sp.dim();
  Tensor<S> b = b_tensor(sp, x, y);
  Mat<S> d = triple_contraction_sym(sp, x, y);
  S xy = inner(sp, x, y);
  const S half = scalar_traits<S>::from_fraction(1, 2);
  const S eighth = scalar_traits<S>::from_fraction(1, 8);
  Tensor<S> q(n, 4);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          q.at(i, j, k, l) = b.at(i, k, j, l) + b.at(i, l, j, k) -
                             half * sp.h()(i, j) * d(k, l) - half * sp.h()(k, l) * d(i, j) +
                             eighth * xy * sp.h()(i, j) * sp.h()(k, l);
  return q;
}

// Sup-norm of the antisymmetrization over every triple of slots; zero iff
// completely symmetric given the built-in pair symmetries.
template <class S>
S complete_symmetry_residual(const Tensor<S>& q) {
  const std::size_t n = q.dim();
  S worst = scalar_traits<S>::zero();
  auto upd = [&worst](const S& v) {
    S a = scalar_traits<S>::abs(v);
    if (a > worst) worst = a;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          upd(q.at(i, j, k, l) - q.at(j, i, k, l));
          upd(q.at(i, j, k, l) - q.at(i, k, j, l));
          upd(q.at(i, j, k, l) - q.at(i, j, l, k));
        }
  return worst;
}

template <class S>
Mat<S> trace_first_pair(const MetricSpace<S>& sp, const Tensor<S>& q) {
  const std::size_t n = sp.dim();
  Mat<S> out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      S acc = scalar_traits<S>::zero();
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q2 = 0; q2 < n; ++q2) acc += sp.h_inv()(p, q2) * q.at(p, q2, i, j);
      out(i, j) = acc;
    }
  return out;
}

// ---------------------------------------------------------------------------
// the endomorphism identity and the rank-three Jordan model
// ---------------------------------------------------------------------------

// Residual of -op(X*Y)/3 = (op X op Y + op Y op X)/2 - <star X, Y>/24 star
// - <X,Y>/24 Id as endomorphisms of Lambda^2 (X, Y Weyl, n = 4).
template <class S>
S cmult_preiso_residual(const MetricSpace<S>& sp, const Tensor<S>& eps, const Tensor<S>& x,
                        const Tensor<S>& y) {
  Basis<S> ext2 = two_form_basis(sp);
  auto opm = [&](const Tensor<S>& t) {
    return operator_matrix(ext2, [&](const Tensor<S>& arg) {
             return to_tensor(op2(sp, t, to_mat(arg)));
           }).matrix;
  };
  Mat<S> mx = opm(x), my = opm(y);
  Mat<S> mstar = operator_matrix(ext2, [&](const Tensor<S>& arg) {
                   return to_tensor(star2(sp, eps, to_mat(arg)));
                 }).matrix;
  Mat<S> mxy = opm(curvmult(sp, x, y));
  const S third = scalar_traits<S>::from_fraction(1, 3);
  const S half = scalar_traits<S>::from_fraction(1, 2);
  const S tw4 = scalar_traits<S>::from_fraction(1, 24);
  Mat<S> lhs = mxy * (-third);
  Mat<S> rhs = (mx * my + my * mx) * half - mstar * (inner(sp, star_weyl(sp, eps, x), y) * tw4) -
               Mat<S>::identity(ext2.size()) * (inner(sp, x, y) * tw4);
  return (lhs - rhs).max_abs();
}

// Trace-free symmetric 3x3 representative of a duality-half Weyl tensor:
// Psi(X) = -3 op(X) restricted to the given three-dimensional form basis.
template <class S>
Mat<S> jordan_iso(const MetricSpace<S>& sp, const Basis<S>& half_forms, const Tensor<S>& x) {
  if (half_forms.size() != 3) throw std::invalid_argument("duality half must be 3-dimensional");
  Mat<S> m(3, 3);
  Mat<S> gram = half_forms.gram();
  for (std::size_t j = 0; j < 3; ++j) {
    Mat<S> img = op2(sp, x, to_mat(half_forms[j]));
    for (std::size_t i = 0; i < 3; ++i)
      m(i, j) = -scalar_traits<S>::from_int(3) * inner2(sp, to_mat(half_forms[i]), img) /
                gram(i, i);
  }
  return m;
}

// Deunitalized rank-three Jordan product on trace-free symmetric matrices:
// A o B = (AB + BA)/2 - tr(AB)/3 Id.
template <class S>
Mat<S> jrd_product(const Mat<S>& a, const Mat<S>& b) {
  const std::size_t n = a.rows();
  Mat<S> ab = a * b;
  Mat<S> ba = b * a;
  Mat<S> r = (ab + ba) * scalar_traits<S>::from_fraction(1, 2);
  S tr = ab.trace();
  return r - Mat<S>::identity(n) * (tr / scalar_traits<S>::from_int(static_cast<long>(n)));
}

template <class S>
S jordan_metric(const Mat<S>& a, const Mat<S>& b) {
  return (a * b).trace() * scalar_traits<S>::from_fraction(1, 3);
}

// 3x3 determinant by cofactor expansion in the scalar field.
template <class S>
S det3(const Mat<S>& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

// ---------------------------------------------------------------------------
// the five-variable cubic
// ---------------------------------------------------------------------------

// The five-variable isoparametric cubic, normalized as the determinant of
// [[-u/sqrt3 + v, z3, z2], [z3, -u/sqrt3 - v, z1], [z2, z1, 2u/sqrt3]]:
// (2/(3 sqrt 3)) (u^3 - 3uv^2 + (3/2)u(z1^2+z2^2-2z3^2)
//                 + (3 sqrt 3 / 2) v (z2^2 - z1^2) + 3 sqrt 3 z1 z2 z3).
inline double cartan_cubic(double u, double v, double z1, double z2, double z3) {
  const double s3 = std::sqrt(3.0);
  return (2.0 / (3.0 * s3)) *
         (u * u * u - 3.0 * u * v * v + 1.5 * u * (z1 * z1 + z2 * z2 - 2.0 * z3 * z3) +
          1.5 * s3 * v * (z2 * z2 - z1 * z1) + 3.0 * s3 * z1 * z2 * z3);
}

// Squared Frobenius norm of the Hessian of the cubic, exact polynomial.
inline double cartan_cubic_hessian_norm2(double u, double v, double z1, double z2, double z3) {
  const double s3 = std::sqrt(3.0);
  const double c = 2.0 / (3.0 * s3);
  double H[5][5] = {};
  H[0][0] = 6 * c * u;
  H[0][1] = H[1][0] = -6 * c * v;
  H[0][2] = H[2][0] = 3 * c * z1;
  H[0][3] = H[3][0] = 3 * c * z2;
  H[0][4] = H[4][0] = -6 * c * z3;
  H[1][1] = -6 * c * u;
  H[1][2] = H[2][1] = -3 * s3 * c * z1;
  H[1][3] = H[3][1] = 3 * s3 * c * z2;
  H[2][2] = c * (3 * u - 3 * s3 * v);
  H[2][3] = H[3][2] = 3 * s3 * c * z3;
  H[2][4] = H[4][2] = 3 * s3 * c * z2;
  H[3][3] = c * (3 * u + 3 * s3 * v);
  H[3][4] = H[4][3] = 3 * s3 * c * z1;
  H[4][4] = -6 * c * u;
  double s = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) s += H[i][j] * H[i][j];
  return s;
}

// Element of a duality half with coordinates (u, v, z) chosen so that the
// trace-free symmetric representative comes out as
//   [[-u/sqrt3 + v, z3, z2], [z3, -u/sqrt3 - v, z1], [z2, z1, 2u/sqrt3]]:
// X = u S(ga)/sqrt3 + v (S(al) - S(be))/3 + (z1 be.ga + z2 al.ga + z3 al.be)/9.
template <class S>
Tensor<S> cubic_basis_element(const MetricSpace<S>& sp, const HyperKahlerTriple<S>& tr, double u,
                              double v, double z1, double z2, double z3) {
  static_assert(!scalar_traits<S>::exact, "float-only parametrization");
  const double s3 = std::sqrt(3.0);
  Tensor<S> sa = idempotent_s_tensor(sp, tr.a);
  Tensor<S> sb = idempotent_s_tensor(sp, tr.b);
  Tensor<S> sc = idempotent_s_tensor(sp, tr.c);
  Tensor<S> out = sc * (u / s3) + (sa - sb) * (v / 3.0);
  out += cdot(tr.b.alpha, tr.c.alpha) * (z1 / 9.0);
  out += cdot(tr.a.alpha, tr.c.alpha) * (z2 / 9.0);
  out += cdot(tr.a.alpha, tr.b.alpha) * (z3 / 9.0);
  return out;
}

}  // namespace curvalg
