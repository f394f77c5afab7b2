#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvalg/basis.hpp"
#include "curvalg/metric_space.hpp"
#include "curvalg/tensor.hpp"
#include "curvalg/two_tensor.hpp"

namespace curvalg {

// ---------------------------------------------------------------------------
// rank-4 primitives on the space of metric curvature tensors
// ---------------------------------------------------------------------------

// Projection of S^2(Lambda^2) onto the curvature symmetries:
// P(Psi)_ijkl = Psi_ijkl - Psi_[ijk]l = (2 Psi_ijkl - Psi_jkil - Psi_kijl)/3.
template <class S>
Tensor<S> stwoproj(const Tensor<S>& psi) {
  const std::size_t n = psi.dim();
  Tensor<S> r(n, 4);
  const S third = scalar_traits<S>::from_fraction(1, 3);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          r.at(i, j, k, l) = (psi.at(i, j, k, l) + psi.at(i, j, k, l) - psi.at(j, k, i, l) -
                              psi.at(k, i, j, l)) *
                             third;
  return r;
}

// Symmetrizes an arbitrary rank-4 tensor into S^2(Lambda^2).
template <class S>
Tensor<S> pair_symmetrize(const Tensor<S>& t) {
  const std::size_t n = t.dim();
  Tensor<S> r(n, 4);
  const S eighth = scalar_traits<S>::from_fraction(1, 8);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          r.at(i, j, k, l) =
              (t.at(i, j, k, l) - t.at(j, i, k, l) - t.at(i, j, l, k) + t.at(j, i, l, k) +
               t.at(k, l, i, j) - t.at(l, k, i, j) - t.at(k, l, j, i) + t.at(l, k, j, i)) *
              eighth;
  return r;
}

// Max-norm residuals of the defining symmetries; zero certifies membership.
template <class S>
struct McurvResiduals {
  S antisym_front;   // X_{(ij)kl}
  S antisym_back;    // X_{ij(kl)}
  S bianchi;         // X_{[ijk]l}
  S pair_exchange;   // X_klij - X_ijkl
  S max() const {
    S m = antisym_front;
    if (antisym_back > m) m = antisym_back;
    if (bianchi > m) m = bianchi;
    if (pair_exchange > m) m = pair_exchange;
    return m;
  }
};

template <class S>
McurvResiduals<S> validate_mcurv(const Tensor<S>& t) {
  if (t.rank() != 4) throw std::invalid_argument("validate_mcurv: rank-4 tensor required");
  const std::size_t n = t.dim();
  McurvResiduals<S> r{scalar_traits<S>::zero(), scalar_traits<S>::zero(),
                      scalar_traits<S>::zero(), scalar_traits<S>::zero()};
  const S sixth = scalar_traits<S>::from_fraction(1, 6);
  auto upd = [](S& m, const S& v) {
    S a = scalar_traits<S>::abs(v);
    if (a > m) m = a;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          upd(r.antisym_front, t.at(i, j, k, l) + t.at(j, i, k, l));
          upd(r.antisym_back, t.at(i, j, k, l) + t.at(i, j, l, k));
          upd(r.pair_exchange, t.at(k, l, i, j) - t.at(i, j, k, l));
          S b = (t.at(i, j, k, l) - t.at(j, i, k, l) + t.at(j, k, i, l) - t.at(k, j, i, l) +
                 t.at(k, i, j, l) - t.at(i, k, j, l)) *
                sixth;
          upd(r.bianchi, b);
        }
  return r;
}

// Ricci trace rictr(X)_ij = X_{pij}^p.
template <class S>
Mat<S> rictr(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const std::size_t n = sp.dim();
  Mat<S> r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      S acc = scalar_traits<S>::zero();
      if (sp.is_euclidean()) {
        for (std::size_t p = 0; p < n; ++p) acc += x.at(p, i, j, p);
      } else {
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = 0; q < n; ++q) acc += sp.h_inv()(q, p) * x.at(p, i, j, q);
      }
      r(i, j) = acc;
    }
  return r;
}

template <class S>
S scal(const MetricSpace<S>& sp, const Tensor<S>& x) {
  return trace2(sp, rictr(sp, x));
}

// kappa-wedge of symmetric 2-tensors, half the Kulkarni-Nomizu product:
// (a ^ b)_ijkl = a_k[i b_j]l - a_l[i b_j]k.
template <class S>
Tensor<S> kwedge(const Mat<S>& a, const Mat<S>& b) {
  const std::size_t n = a.rows();
  Tensor<S> r(n, 4);
  const S half = scalar_traits<S>::from_fraction(1, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          r.at(i, j, k, l) = half * (a(k, i) * b(j, l) - a(k, j) * b(i, l) - a(l, i) * b(j, k) +
                                     a(l, j) * b(i, k));
  return r;
}

// Curvature-valued product of two-forms:
// (a . b)_ijkl = a_ij b_kl + a_kl b_ij - a_k[i b_j]l + a_l[i b_j]k.
template <class S>
Tensor<S> cdot(const Mat<S>& a, const Mat<S>& b) {
  const std::size_t n = a.rows();
  Tensor<S> r(n, 4);
  const S half = scalar_traits<S>::from_fraction(1, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          r.at(i, j, k, l) = a(i, j) * b(k, l) + a(k, l) * b(i, j) -
                             half * (a(k, i) * b(j, l) - a(k, j) * b(i, l)) +
                             half * (a(l, i) * b(j, k) - a(l, j) * b(i, k));
  return r;
}

template <class S>
Tensor<S> h_kwedge_h(const MetricSpace<S>& sp) {
  return kwedge(sp.h(), sp.h());
}

// ---------------------------------------------------------------------------
// certified curvature tensors
// ---------------------------------------------------------------------------

// A rank-4 tensor certified to lie in the curvature space, with the Ricci
// trace and scalar cached eagerly.
template <class S>
class CurvTensor {
 public:
  // Canonical entry point: symmetrize into S^2(Lambda^2), project onto the
  // curvature symmetries, and record how far the input was from its image.
  static CurvTensor project(const MetricSpace<S>& sp, const Tensor<S>& raw) {
    Tensor<S> proj = stwoproj(pair_symmetrize(raw));
    S residual = (raw - proj).max_abs();
    return CurvTensor(sp, std::move(proj), residual);
  }

  // For tensors already carrying the symmetries (kwedge/cdot images); the
  // membership residual is asserted to vanish.
  static CurvTensor certify(const MetricSpace<S>& sp, Tensor<S> t, double tol = 1e-10) {
    S residual = validate_mcurv(t).max();
    if constexpr (scalar_traits<S>::exact) {
      if (residual != scalar_traits<S>::zero())
        throw std::invalid_argument("certify: tensor is not of curvature type");
    } else {
      if (to_double(residual) > tol)
        throw std::invalid_argument("certify: tensor is not of curvature type");
    }
    return CurvTensor(sp, std::move(t), residual);
  }

  const Tensor<S>& tensor() const { return t_; }
  const Mat<S>& ric() const { return ric_; }
  const S& scalar() const { return scal_; }
  const S& residual() const { return residual_; }

 private:
  CurvTensor(const MetricSpace<S>& sp, Tensor<S> t, S residual)
      : t_(std::move(t)), ric_(rictr(sp, t_)), scal_(trace2(sp, ric_)), residual_(std::move(residual)) {}

  Tensor<S> t_;
  Mat<S> ric_;
  S scal_;
  S residual_;
};

// ---------------------------------------------------------------------------
// orthogonal decomposition into Weyl / trace-free Ricci / scalar parts
// ---------------------------------------------------------------------------

template <class S>
struct CurvDecomposition {
  Tensor<S> weyl;
  Tensor<S> ric;
  Tensor<S> scalpart;
  bool weyl_ric_defined = true;  // false when n = 2
};

template <class S>
Mat<S> rictr_traceless(const MetricSpace<S>& sp, const Tensor<S>& x) {
  Mat<S> r = rictr(sp, x);
  S s = trace2(sp, r);
  const S c = s / scalar_traits<S>::from_int(static_cast<long>(sp.dim()));
  return r - sp.h() * c;
}

// Pi_ric(X) = -2/(n-2) rictr_0(X) ^ h
template <class S>
Tensor<S> proj_ric(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const long n = static_cast<long>(sp.dim());
  if (n == 2) throw std::domain_error("proj_ric undefined at n = 2");
  Mat<S> rz = rictr_traceless(sp, x);
  return kwedge(rz, sp.h()) * scalar_traits<S>::from_fraction(-2, n - 2);
}

// Pi_scal(X) = -1/(n(n-1)) scal(X) h ^ h
template <class S>
Tensor<S> proj_scal(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const long n = static_cast<long>(sp.dim());
  S c = scal(sp, x) * scalar_traits<S>::from_fraction(-1, n * (n - 1));
  return h_kwedge_h(sp) * c;
}

// Totally trace-free (Weyl) part.
template <class S>
Tensor<S> tf(const MetricSpace<S>& sp, const Tensor<S>& x) {
  if (sp.dim() == 2) return Tensor<S>(sp.dim(), 4);
  return x - proj_ric(sp, x) - proj_scal(sp, x);
}

template <class S>
CurvDecomposition<S> decompose(const MetricSpace<S>& sp, const Tensor<S>& x) {
  CurvDecomposition<S> d;
  if (sp.dim() == 2) {
    d.weyl = Tensor<S>(2, 4);
    d.ric = Tensor<S>(2, 4);
    d.scalpart = x;
    d.weyl_ric_defined = false;
    return d;
  }
  d.ric = proj_ric(sp, x);
  d.scalpart = proj_scal(sp, x);
  d.weyl = x - d.ric - d.scalpart;
  return d;
}

// ---------------------------------------------------------------------------
// the operator op(X) on tensor modules
// ---------------------------------------------------------------------------

// op(X) acting on a general covariant rank-k tensor:
// op(X)(a)_{i_1..i_k} = (1/k) sum_{r != s} X^p_{i_r i_s}^q a_{..p..q..},
// the index layout that reproduces the rank-2 restrictions
// op(X)(a)_ij = a^{pq} X_ipqj on S^2 and -a^{pq} X_ijpq / 2 on Lambda^2.
// Left multiplication on the curvature space is op_mcurv below, which
// carries the opposite overall sign on rank-4 input.
template <class S>
Tensor<S> op_general(const MetricSpace<S>& sp, const Tensor<S>& x, const Tensor<S>& arg) {
  const std::size_t n = sp.dim();
  const std::size_t k = arg.rank();
  // X with first and last index raised: Xm[p][a][b][q] = X^p_{ab}^q
  Tensor<S> xm(n, 4);
  if (sp.is_euclidean()) {
    xm = x;
  } else {
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t q = 0; q < n; ++q) {
            S acc = scalar_traits<S>::zero();
            for (std::size_t u = 0; u < n; ++u)
              for (std::size_t v = 0; v < n; ++v)
                acc += sp.h_inv()(p, u) * sp.h_inv()(q, v) * x.at(u, a, b, v);
            xm.at(p, a, b, q) = acc;
          }
  }
  Tensor<S> out(n, k);
  const S invk = scalar_traits<S>::from_fraction(1, static_cast<long>(k));
  std::vector<std::size_t> src(k);
  detail::for_each_index(n, k, [&](const std::vector<std::size_t>& ix) {
    S acc = scalar_traits<S>::zero();
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t s = 0; s < k; ++s) {
        if (r == s) continue;
        src = ix;
        for (std::size_t p = 0; p < n; ++p) {
          src[r] = p;
          for (std::size_t q = 0; q < n; ++q) {
            const S& c = xm.at(p, ix[r], ix[s], q);
            if (c == scalar_traits<S>::zero()) continue;
            src[s] = q;
            acc += c * arg[arg.offset(src)];
          }
        }
        src[s] = ix[s];
      }
    out[out.offset(ix)] = acc * invk;
  });
  return out;
}

// The endomorphism of the curvature space given by left multiplication,
// evaluated as a pairwise contraction sum (1/4) sum_{r != s}
// X_{i_r}^p_{i_s}^q Y_{..p@r..q@s..}; an independent route to the product.
template <class S>
Tensor<S> op_mcurv(const MetricSpace<S>& sp, const Tensor<S>& x, const Tensor<S>& y) {
  const std::size_t n = sp.dim();
  // X with slots 2 and 4 raised: xm[a][p][b][q] = X_a^p_b^q
  Tensor<S> xm(n, 4);
  if (sp.is_euclidean()) {
    xm = x;
  } else {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t q = 0; q < n; ++q) {
            S acc = scalar_traits<S>::zero();
            for (std::size_t u = 0; u < n; ++u)
              for (std::size_t v = 0; v < n; ++v)
                acc += sp.h_inv()(p, u) * sp.h_inv()(q, v) * x.at(a, u, b, v);
            xm.at(a, p, b, q) = acc;
          }
  }
  Tensor<S> out(n, 4);
  const S quarter = scalar_traits<S>::from_fraction(1, 4);
  std::vector<std::size_t> src(4);
  detail::for_each_index(n, 4, [&](const std::vector<std::size_t>& ix) {
    S acc = scalar_traits<S>::zero();
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t s = 0; s < 4; ++s) {
        if (r == s) continue;
        src = ix;
        for (std::size_t p = 0; p < n; ++p) {
          src[r] = p;
          for (std::size_t q = 0; q < n; ++q) {
            const S& c = xm.at(ix[r], p, ix[s], q);
            if (c == scalar_traits<S>::zero()) continue;
            src[s] = q;
            acc += c * y[y.offset(src)];
          }
        }
        src[r] = ix[r];
        src[s] = ix[s];
      }
    out[out.offset(ix)] = acc * quarter;
  });
  return out;
}

// op(X) on 2-tensors, the rank-2 specialization (used for both S^2 and
// Lambda^2 arguments).
template <class S>
Mat<S> op2(const MetricSpace<S>& sp, const Tensor<S>& x, const Mat<S>& arg) {
  const std::size_t n = sp.dim();
  Mat<S> argr(n, n);  // arg^{pq}
  if (sp.is_euclidean()) {
    argr = arg;
  } else {
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) {
        S acc = scalar_traits<S>::zero();
        for (std::size_t u = 0; u < n; ++u)
          for (std::size_t v = 0; v < n; ++v)
            acc += sp.h_inv()(p, u) * sp.h_inv()(q, v) * arg(u, v);
        argr(p, q) = acc;
      }
  }
  Mat<S> out(n, n);
  const S half = scalar_traits<S>::from_fraction(1, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      S acc = scalar_traits<S>::zero();
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
          acc += x.at(p, i, j, q) * argr(p, q) + x.at(p, j, i, q) * argr(q, p);
      out(i, j) = acc * half;
    }
  return out;
}

// ---------------------------------------------------------------------------
// standard bases of two-tensor modules and curvature subspaces
// ---------------------------------------------------------------------------

template <class S>
std::vector<Tensor<S>> two_form_generators(const MetricSpace<S>& sp) {
  const std::size_t n = sp.dim();
  std::vector<Tensor<S>> gens;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      gens.push_back(to_tensor(wedge_cov(basis_covector<S>(n, a), basis_covector<S>(n, b))));
  return gens;
}

template <class S>
std::vector<Tensor<S>> sym2_generators(const MetricSpace<S>& sp) {
  const std::size_t n = sp.dim();
  std::vector<Tensor<S>> gens;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b)
      gens.push_back(to_tensor(sym_cov(basis_covector<S>(n, a), basis_covector<S>(n, b))));
  return gens;
}

template <class S>
Basis<S> two_form_basis(const MetricSpace<S>& sp) {
  return orthonormalize(sp, "ext2", two_form_generators(sp));
}

template <class S>
Basis<S> sym2_basis(const MetricSpace<S>& sp) {
  return orthonormalize(sp, "sym2", sym2_generators(sp));
}

template <class S>
Basis<S> sym2_traceless_basis(const MetricSpace<S>& sp) {
  auto gens = sym2_generators(sp);
  std::vector<Tensor<S>> tfree;
  for (auto& g : gens) {
    Mat<S> m = to_mat(g);
    S tr = trace2(sp, m);
    Mat<S> m0 = m - sp.h() * (tr / scalar_traits<S>::from_int(static_cast<long>(sp.dim())));
    tfree.push_back(to_tensor(m0));
  }
  return orthonormalize(sp, "sym2-traceless", std::move(tfree));
}

// Symmetrized pairs of two-form generators; spans S^2(Lambda^2).
template <class S>
std::vector<Tensor<S>> s2lambda2_generators(const MetricSpace<S>& sp) {
  auto forms = two_form_generators(sp);
  std::vector<Tensor<S>> gens;
  const S half = scalar_traits<S>::from_fraction(1, 2);
  for (std::size_t a = 0; a < forms.size(); ++a)
    for (std::size_t b = a; b < forms.size(); ++b) {
      Tensor<S> s = (outer(forms[a], forms[b]) + outer(forms[b], forms[a])) * half;
      gens.push_back(std::move(s));
    }
  return gens;
}

// Orthonormal basis of the full curvature space.
template <class S>
Basis<S> mcurv_basis(const MetricSpace<S>& sp) {
  std::vector<Tensor<S>> gens;
  for (auto& g : s2lambda2_generators(sp)) {
    Tensor<S> p = stwoproj(g);
    if (p.max_abs() == scalar_traits<S>::zero()) continue;
    gens.push_back(std::move(p));
  }
  return orthonormalize(sp, "full", std::move(gens));
}

// Redundant spanning set of the Weyl subspace built from pairwise-orthogonal
// frame directions; pivoted elimination resolves the rank deficiency.
template <class S>
std::vector<Tensor<S>> weyl_generators(const MetricSpace<S>& sp) {
  const std::size_t n = sp.dim();
  std::vector<Tensor<S>> gens;
  if (n < 4) return gens;
  // frame covectors of an h-orthonormal frame are only needed for h = Id;
  // for general h the same spans arise after conjugation, so use coordinate
  // covectors and let the Gram pivoting do the cleaning.
  auto e = [&](std::size_t i) { return basis_covector<S>(n, i); };
  auto sy = [&](std::size_t i, std::size_t j) { return sym_cov(e(i), e(j)); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l) {
          if (k < i || (k == i && l <= j)) continue;
          if (i == k || i == l || j == k || j == l) continue;
          // family one: (e_i e_j) ^ (e_k e_l) and (e_i e_k) ^ (e_j e_l)
          gens.push_back(kwedge(sy(i, j), sy(k, l)));
          gens.push_back(kwedge(sy(i, k), sy(j, l)));
        }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        for (std::size_t m = k + 1; m < n; ++m) {
          if (m == i || m == j) continue;
          // family two: (e_k e_k - e_m e_m) ^ (e_i e_j)
          gens.push_back(kwedge(sy(k, k) - sy(m, m), sy(i, j)));
          // family three: (e_i e_i - e_m e_m) ^ (e_j e_j - e_k e_k)
          gens.push_back(kwedge(sy(i, i) - sy(m, m), sy(j, j) - sy(k, k)));
        }
      }
  if (!sp.is_euclidean()) {
    // project each generator onto the kernel of rictr for the actual metric
    for (auto& g : gens) g = tf(sp, g);
  }
  return gens;
}

template <class S>
Basis<S> weyl_basis(const MetricSpace<S>& sp) {
  return orthonormalize(sp, "weyl", weyl_generators(sp));
}

template <class S>
Basis<S> ric_basis(const MetricSpace<S>& sp) {
  std::vector<Tensor<S>> gens;
  auto s20 = sym2_traceless_basis(sp);
  for (std::size_t i = 0; i < s20.size(); ++i) gens.push_back(kwedge(to_mat(s20[i]), sp.h()));
  return orthonormalize(sp, "ric", std::move(gens));
}

template <class S>
Basis<S> scal_basis(const MetricSpace<S>& sp) {
  std::vector<Tensor<S>> gens{h_kwedge_h(sp)};
  return orthonormalize(sp, "scal", std::move(gens));
}

// Closed-form dimension of the Weyl space, (n-3)/2 * C(n+2, 3) for n >= 4.
inline std::size_t weyl_dim(std::size_t n) {
  if (n < 4) return 0;
  return (n - 3) * ((n + 2) * (n + 1) * n / 6) / 2;
}

inline std::size_t mcurv_dim(std::size_t n) { return n * n * (n * n - 1) / 12; }

}  // namespace curvalg
