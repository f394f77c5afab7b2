#pragma once

#include <stdexcept>

#include "curvalg/curv.hpp"
#include "curvalg/metric_space.hpp"
#include "curvalg/two_tensor.hpp"

namespace curvalg {

// The transported product on symmetric 2-tensors in dimension three:
// A x B = A jm B - ((tr A)B + (tr B)A + <A,B> h)/4 + (tr A tr B) h / 4.
template <class S>
Mat<S> tprod3(const MetricSpace<S>& sp, const Mat<S>& a, const Mat<S>& b) {
  if (sp.dim() != 3) throw std::domain_error("tprod3 requires dimension three");
  const S quarter = scalar_traits<S>::from_fraction(1, 4);
  S ta = trace2(sp, a), tb = trace2(sp, b);
  Mat<S> r = jmult(sp, a, b);
  r = r - (b * ta + a * tb + sp.h() * inner2(sp, a, b)) * quarter;
  r = r + sp.h() * (ta * tb * quarter);
  return r;
}

// The linear isomorphism onto the curvature space, Psi(A) = -(A - tr(A)h/2)^h.
template <class S>
Tensor<S> psi3(const MetricSpace<S>& sp, const Mat<S>& a) {
  if (sp.dim() != 3) throw std::domain_error("psi3 requires dimension three");
  Mat<S> inner_part = a - sp.h() * (trace2(sp, a) * scalar_traits<S>::from_fraction(1, 2));
  return kwedge(inner_part, sp.h()) * (-scalar_traits<S>::one());
}

// Psi^{-1}(X) = 2 (rictr(X) - scal(X) h / 2).
template <class S>
Mat<S> psi3_inv(const MetricSpace<S>& sp, const Tensor<S>& x) {
  if (sp.dim() != 3) throw std::domain_error("psi3_inv requires dimension three");
  Mat<S> r = rictr(sp, x);
  return (r - sp.h() * (scal(sp, x) * scalar_traits<S>::from_fraction(1, 2))) *
         scalar_traits<S>::from_int(2);
}

// The two-parameter family of equivariant isomorphisms psi_{p,l}(A) =
// p (A + l tr(A) h), composed with ^h; the theorem's choice is (p, l) =
// (-1, -1/2).
template <class S>
Tensor<S> psi3_general(const MetricSpace<S>& sp, const S& p, const S& l, const Mat<S>& a) {
  Mat<S> inner_part = (a + sp.h() * (l * trace2(sp, a))) * p;
  return kwedge(inner_part, sp.h());
}

template <class S>
Mat<S> psi3_general_inv(const MetricSpace<S>& sp, const S& p, const S& l, const Tensor<S>& x) {
  // rictr(Psi(a)) = -(p/2)(a + (1+4l) tr(a) h), scal = -2p(1+3l) tr a
  const S one = scalar_traits<S>::one();
  const S four = scalar_traits<S>::from_int(4);
  const S c = (one + four * l) / ((one + scalar_traits<S>::from_int(3) * l) * four);
  Mat<S> r = rictr(sp, x) - sp.h() * (c * scal(sp, x));
  return r * (-scalar_traits<S>::from_int(2) / p);
}

// Transported product for general (p, l): psi^{-1}(psi(a) * psi(b)).
template <class S>
Mat<S> tprod3_general(const MetricSpace<S>& sp, const S& p, const S& l, const Mat<S>& a,
                      const Mat<S>& b) {
  Tensor<S> prod = curvmult(sp, psi3_general(sp, p, l, a), psi3_general(sp, p, l, b));
  return psi3_general_inv(sp, p, l, prod);
}

// The metric the general family transports: g(a,b) = p^2(<a,b> +
// (1 + 8l + 12l^2) tr a tr b) = p^2(<a,b> + (1+2l)(1+6l) tr a tr b),
// assembled from <a^h, b^h> = <a,b> + tr a tr b, <a^h, h^h> = 4 tr a and
// |h^h|^2 = 12.
template <class S>
S psi3_metric(const MetricSpace<S>& sp, const S& p, const S& l, const Mat<S>& a, const Mat<S>& b) {
  const S one = scalar_traits<S>::one();
  const S two = scalar_traits<S>::from_int(2);
  const S six = scalar_traits<S>::from_int(6);
  return p * p *
         (inner2(sp, a, b) + (one + two * l) * (one + six * l) * trace2(sp, a) * trace2(sp, b));
}

}  // namespace curvalg
