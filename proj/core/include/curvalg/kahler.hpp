#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvalg/basis.hpp"
#include "curvalg/curv.hpp"
#include "curvalg/curvmult.hpp"
#include "curvalg/idempotents.hpp"
#include "curvalg/metric_space.hpp"
#include "curvalg/two_tensor.hpp"

namespace curvalg {

// ---------------------------------------------------------------------------
// endomorphisms of the two-tensor space induced by the Kähler structure
// ---------------------------------------------------------------------------

// jendo(a)_ij = J_i^p J_j^q a_pq, the paracomplex involution.
template <class S>
Mat<S> jendo(const MetricSpace<S>& sp, const Mat<S>& a) {
  const auto& J = sp.kahler().j_endo;
  const std::size_t n = sp.dim();
  Mat<S> r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      S acc = scalar_traits<S>::zero();
      for (std::size_t p = 0; p < n; ++p) {
        if (J(i, p) == scalar_traits<S>::zero()) continue;
        for (std::size_t q = 0; q < n; ++q) acc += J(i, p) * J(j, q) * a(p, q);
      }
      r(i, j) = acc;
    }
  return r;
}

// jsym(a) = a o omega, the complex structure on two-tensors.
template <class S>
Mat<S> jsym(const MetricSpace<S>& sp, const Mat<S>& a) {
  return compose(sp, a, sp.kahler().omega);
}

template <class S>
Mat<S> ad_omega(const MetricSpace<S>& sp, const Mat<S>& a) {
  return bracket(sp, sp.kahler().omega, a);
}

// The unitary star on two-tensors:
// star(a) = (2/m) <omega, a> omega + (2/m) <h, a> h - jendo(a).
template <class S>
Mat<S> ustar(const MetricSpace<S>& sp, const Mat<S>& a) {
  const long m = static_cast<long>(sp.dim());
  const Mat<S>& om = sp.kahler().omega;
  Mat<S> r = om * (inner2(sp, om, a) * scalar_traits<S>::from_fraction(2, m));
  r = r + sp.h() * (inner2(sp, sp.h(), a) * scalar_traits<S>::from_fraction(2, m));
  return r - jendo(sp, a);
}

// J-invariant / anti-invariant projections of a two-tensor.
template <class S>
Mat<S> jinv_part(const MetricSpace<S>& sp, const Mat<S>& a) {
  return (a + jendo(sp, a)) * scalar_traits<S>::from_fraction(1, 2);
}

template <class S>
Mat<S> jantiinv_part(const MetricSpace<S>& sp, const Mat<S>& a) {
  return (a - jendo(sp, a)) * scalar_traits<S>::from_fraction(1, 2);
}

// Residuals of the endomorphism algebra relations; zero for valid Kähler data.
template <class S>
S kahler_ops_residual(const MetricSpace<S>& sp, Prng& rng) {
  const std::size_t n = sp.dim();
  S worst = scalar_traits<S>::zero();
  auto upd = [&worst](const S& v) {
    if (v > worst) worst = v;
  };
  for (int t = 0; t < 3; ++t) {
    Mat<S> a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.template next_scalar<S>();
    upd((jendo(sp, jendo(sp, a)) - a).max_abs());
    upd((jsym(sp, jsym(sp, a)) + a).max_abs());
    upd((ad_omega(sp, jendo(sp, a)) + ad_omega(sp, a)).max_abs());
    upd((jendo(sp, ad_omega(sp, a)) + ad_omega(sp, a)).max_abs());
    upd((jendo(sp, jsym(sp, a)) - jsym(sp, jendo(sp, a))).max_abs());
    upd((ad_omega(sp, ad_omega(sp, a)) + a * scalar_traits<S>::from_int(2) -
         jendo(sp, a) * scalar_traits<S>::from_int(2))
            .max_abs());
    // ad(om) o jsym = Id - jendo = jsym o ad(om) (the composition identity
    // ad(om) = jsym o jendo - jsym forces this sign)
    upd((ad_omega(sp, jsym(sp, a)) + jendo(sp, a) - a).max_abs());
    upd((jsym(sp, ad_omega(sp, a)) + jendo(sp, a) - a).max_abs());
    upd((jsym(sp, jendo(sp, a)) - jsym(sp, a) - ad_omega(sp, a)).max_abs());
    upd((jendo(sp, ustar(sp, a)) - ustar(sp, jendo(sp, a))).max_abs());
    upd((ustar(sp, ustar(sp, a)) - a).max_abs());
    upd((ad_omega(sp, ustar(sp, a)) - ad_omega(sp, a)).max_abs());
    upd((ustar(sp, ad_omega(sp, a)) - ad_omega(sp, a)).max_abs());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// distinguished two-tensor submodules
// ---------------------------------------------------------------------------

enum class KahlerModule {
  forms_sd,     // star = +1 two-forms (contains omega)
  forms_asd,    // star = -1 two-forms, the su-module
  forms_jinv,   // jendo = +1 two-forms = asd + span{omega}
  forms_janti,  // jendo = -1 two-forms
  sym_janti,    // jendo = -1 symmetric, the Lagrangian-Grassmannian ambient
  sym_jinv0,    // jendo = +1 symmetric, trace-free (Hermitian traceless)
};

template <class S>
Basis<S> kahler_module_basis(const MetricSpace<S>& sp, KahlerModule which) {
  const S half = scalar_traits<S>::from_fraction(1, 2);
  std::vector<Tensor<S>> gens;
  auto add_proj = [&](const std::vector<Tensor<S>>& raw, auto&& proj) {
    for (const auto& g : raw) {
      Mat<S> p = proj(to_mat(g));
      if (p.max_abs() == scalar_traits<S>::zero()) continue;
      gens.push_back(to_tensor(p));
    }
  };
  const Mat<S>& om = sp.kahler().omega;
  switch (which) {
    case KahlerModule::forms_sd:
      add_proj(two_form_generators(sp), [&](const Mat<S>& a) {
        return (a + ustar(sp, a)) * half;
      });
      break;
    case KahlerModule::forms_asd:
      add_proj(two_form_generators(sp), [&](const Mat<S>& a) {
        return (a - ustar(sp, a)) * half;
      });
      break;
    case KahlerModule::forms_jinv:
      add_proj(two_form_generators(sp), [&](const Mat<S>& a) { return jinv_part(sp, a); });
      break;
    case KahlerModule::forms_janti:
      add_proj(two_form_generators(sp), [&](const Mat<S>& a) { return jantiinv_part(sp, a); });
      break;
    case KahlerModule::sym_janti:
      add_proj(sym2_generators(sp), [&](const Mat<S>& a) { return jantiinv_part(sp, a); });
      break;
    case KahlerModule::sym_jinv0:
      add_proj(sym2_generators(sp), [&](const Mat<S>& a) {
        Mat<S> p = jinv_part(sp, a);
        S tr = trace2(sp, p);
        return p - sp.h() * (tr / scalar_traits<S>::from_int(static_cast<long>(sp.dim())));
      });
      break;
  }
  (void)om;
  const char* tags[] = {"ext2-sd", "ext2-asd", "ext2-jinv", "ext2-janti", "sym-janti", "sym-jinv0"};
  return orthonormalize(sp, tags[static_cast<int>(which)], std::move(gens));
}

inline std::size_t asd_forms_dim(std::size_t m) { return (m - 2) * (m + 2) / 4; }
inline std::size_t sd_forms_dim(std::size_t m) { return m * (m - 2) / 4 + 1; }
inline std::size_t sym_janti_dim(std::size_t m) { return m * (m + 2) / 4; }

// ---------------------------------------------------------------------------
// Kähler curvature tensors and the projections onto them
// ---------------------------------------------------------------------------

// Membership residual for the Kähler type, |J_i^a J_j^b X_abkl - X_ijkl|.
template <class S>
S is_kahler_residual(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const auto& J = sp.kahler().j_endo;
  const std::size_t n = sp.dim();
  S worst = scalar_traits<S>::zero();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          S acc = scalar_traits<S>::zero();
          for (std::size_t a = 0; a < n; ++a) {
            if (J(i, a) == scalar_traits<S>::zero()) continue;
            for (std::size_t b = 0; b < n; ++b) acc += J(i, a) * J(j, b) * x.at(a, b, k, l);
          }
          S d = scalar_traits<S>::abs(acc - x.at(i, j, k, l));
          if (d > worst) worst = d;
        }
  return worst;
}

// The reflection through the complex-type subspace,
// jrefl(X)_ijkl = J_i^a J_j^b J_k^c J_l^d X_abcd.
template <class S>
Tensor<S> jrefl(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const auto& J = sp.kahler().j_endo;
  const std::size_t n = sp.dim();
  // apply J slotwise: X <- J . X on each covariant slot
  Tensor<S> cur = x;
  for (std::size_t slot = 0; slot < 4; ++slot) {
    Tensor<S> next(n, 4);
    std::vector<std::size_t> src(4);
    detail::for_each_index(n, 4, [&](const std::vector<std::size_t>& ix) {
      S acc = scalar_traits<S>::zero();
      src = ix;
      for (std::size_t p = 0; p < n; ++p) {
        if (J(ix[slot], p) == scalar_traits<S>::zero()) continue;
        src[slot] = p;
        acc += J(ix[slot], p) * cur[cur.offset(src)];
      }
      next[next.offset(ix)] = acc;
    });
    cur = std::move(next);
  }
  return cur;
}

// jproj: orthogonal projection onto the complex-type subspace.
template <class S>
Tensor<S> kahler_jproj(const MetricSpace<S>& sp, const Tensor<S>& x) {
  return (x + jrefl(sp, x)) * scalar_traits<S>::from_fraction(1, 2);
}

namespace detail {

// first-pair and second-pair J-conjugations
template <class S>
Tensor<S> jj_first_pair(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const auto& J = sp.kahler().j_endo;
  const std::size_t n = sp.dim();
  Tensor<S> out(n, 4);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          S acc = scalar_traits<S>::zero();
          for (std::size_t p = 0; p < n; ++p) {
            if (J(i, p) == scalar_traits<S>::zero()) continue;
            for (std::size_t q = 0; q < n; ++q) acc += J(i, p) * J(j, q) * x.at(p, q, k, l);
          }
          out.at(i, j, k, l) = acc;
        }
  return out;
}

// the middle mixed term 4 J_[i^p X_j]pq[k J_l]^q
template <class S>
Tensor<S> jj_mixed(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const auto& J = sp.kahler().j_endo;
  const std::size_t n = sp.dim();
  // A_{jpl} aggregated: T_{i j k l} = J_i^p X_{j p q k} J_l^q first, then
  // antisymmetrize in (ij) and (kl)
  Tensor<S> core(n, 4);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          S acc = scalar_traits<S>::zero();
          for (std::size_t p = 0; p < n; ++p) {
            if (J(i, p) == scalar_traits<S>::zero()) continue;
            for (std::size_t q = 0; q < n; ++q) {
              if (J(l, q) == scalar_traits<S>::zero()) continue;
              acc += J(i, p) * x.at(j, p, q, k) * J(l, q);
            }
          }
          core.at(i, j, k, l) = acc;
        }
  Tensor<S> out(n, 4);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          out.at(i, j, k, l) = core.at(i, j, k, l) - core.at(j, i, k, l) -
                               core.at(i, j, l, k) + core.at(j, i, l, k);
  return out;
}

}  // namespace detail

// uproj per its index formula; combined with jproj it gives the projection
// onto the omega-centralizer subspace.
template <class S>
Tensor<S> kahler_uproj(const MetricSpace<S>& sp, const Tensor<S>& x) {
  Tensor<S> first = detail::jj_first_pair(sp, x);
  Tensor<S> second = permuted(detail::jj_first_pair(sp, permuted(x, {2, 3, 0, 1})), {2, 3, 0, 1});
  return (first + second + detail::jj_mixed(sp, x)) * scalar_traits<S>::from_fraction(1, 2);
}

template <class S>
Tensor<S> kahler_wproj(const MetricSpace<S>& sp, const Tensor<S>& x) {
  return kahler_jproj(sp, x) * scalar_traits<S>::from_fraction(3, 4) +
         kahler_uproj(sp, x) * scalar_traits<S>::from_fraction(1, 4);
}

// vproj = J_k^q J_[i^p X_j]lpq - J_l^q J_[i^p X_j]kpq - jj_mixed(X).
template <class S>
Tensor<S> kahler_vproj(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const auto& J = sp.kahler().j_endo;
  const std::size_t n = sp.dim();
  Tensor<S> core(n, 4);
  // C_{ijkl} = J_k^q J_i^p X_{j l p q}
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          S acc = scalar_traits<S>::zero();
          for (std::size_t p = 0; p < n; ++p) {
            if (J(i, p) == scalar_traits<S>::zero()) continue;
            for (std::size_t q = 0; q < n; ++q) {
              if (J(k, q) == scalar_traits<S>::zero()) continue;
              acc += J(k, q) * J(i, p) * x.at(j, l, p, q);
            }
          }
          core.at(i, j, k, l) = acc;
        }
  Tensor<S> out(n, 4);
  const S half = scalar_traits<S>::from_fraction(1, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          out.at(i, j, k, l) = half * (core.at(i, j, k, l) - core.at(j, i, k, l)) -
                               half * (core.at(i, j, l, k) - core.at(j, i, l, k));
  return out - detail::jj_mixed(sp, x);
}

// kproj: orthogonal projection onto the Kähler curvature tensors.
template <class S>
Tensor<S> kahler_kproj(const MetricSpace<S>& sp, const Tensor<S>& x) {
  return kahler_jproj(sp, x) * scalar_traits<S>::from_fraction(3, 8) +
         kahler_uproj(sp, x) * scalar_traits<S>::from_fraction(3, 8) +
         kahler_vproj(sp, x) * scalar_traits<S>::from_fraction(1, 4);
}

inline std::size_t kahler_dim(std::size_t m) { return m * m * (m + 2) * (m + 2) / 64; }
inline std::size_t kahler_weyl_dim(std::size_t m) { return m * m * (m - 2) * (m + 6) / 64; }

// ---------------------------------------------------------------------------
// generating products of the Kähler curvature space
// ---------------------------------------------------------------------------

// sJKW(ga, si) = ga ^ si + (ga o om) ^ (si o om), for J-anti-invariant
// symmetric arguments; equals 2 kproj(ga ^ si).
template <class S>
Tensor<S> sJKW(const MetricSpace<S>& sp, const Mat<S>& ga, const Mat<S>& si) {
  return kwedge(ga, si) + kwedge(jsym(sp, ga), jsym(sp, si));
}

// sK(al, be) = al . be + (al o om) ^ (be o om), for J-invariant two-forms;
// equals (4/3) kproj(al . be).
template <class S>
Tensor<S> sK(const MetricSpace<S>& sp, const Mat<S>& al, const Mat<S>& be) {
  return cdot(al, be) + kwedge(jsym(sp, al), jsym(sp, be));
}

// Ricci form of a complex-type curvature tensor, rictr(X) o omega.
template <class S>
Mat<S> ricform(const MetricSpace<S>& sp, const Tensor<S>& x) {
  return jsym(sp, rictr(sp, x));
}

template <class S>
Mat<S> ricform_traceless(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const long m = static_cast<long>(sp.dim());
  Mat<S> rho = ricform(sp, x);
  return rho - sp.kahler().omega * (scal(sp, x) * scalar_traits<S>::from_fraction(1, m));
}

// Orthogonal projections onto the Ricci-type and scalar-type Kähler summands.
template <class S>
Tensor<S> kahler_proj_ric(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const long m = static_cast<long>(sp.dim());
  return sK(sp, ricform_traceless(sp, x), sp.kahler().omega) *
         scalar_traits<S>::from_fraction(-2, m + 4);
}

template <class S>
Tensor<S> kahler_proj_scal(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const long m = static_cast<long>(sp.dim());
  const Mat<S>& om = sp.kahler().omega;
  return sK(sp, om, om) * (scal(sp, x) * scalar_traits<S>::from_fraction(-1, m * (m + 2)));
}

// Trace-free part within the Kähler space; lands in the Kähler-Weyl summand.
template <class S>
Tensor<S> kahler_tf(const MetricSpace<S>& sp, const Tensor<S>& x) {
  const long m = static_cast<long>(sp.dim());
  const Mat<S>& om = sp.kahler().omega;
  Tensor<S> r = x + sK(sp, ricform(sp, x), om) * scalar_traits<S>::from_fraction(2, m + 4);
  return r - sK(sp, om, om) * (scal(sp, x) * scalar_traits<S>::from_fraction(1, (m + 2) * (m + 4)));
}

template <class S>
struct KahlerCurvDecomposition {
  Tensor<S> kweyl;
  Tensor<S> kric;
  Tensor<S> kscal;
  Mat<S> ricform;
  Mat<S> ricform_traceless;
};

template <class S>
KahlerCurvDecomposition<S> kahler_decompose(const MetricSpace<S>& sp, const Tensor<S>& x) {
  KahlerCurvDecomposition<S> d;
  d.kric = kahler_proj_ric(sp, x);
  d.kscal = kahler_proj_scal(sp, x);
  d.kweyl = x - d.kric - d.kscal;
  d.ricform = ricform(sp, x);
  d.ricform_traceless = ricform_traceless(sp, x);
  return d;
}

// Orthonormal basis of the Kähler curvature space: kproj images of the
// curvature generators.
template <class S>
Basis<S> kahler_basis(const MetricSpace<S>& sp) {
  std::vector<Tensor<S>> gens;
  for (auto& g : s2lambda2_generators(sp)) {
    Tensor<S> p = kahler_kproj(sp, stwoproj(g));
    if (p.max_abs() == scalar_traits<S>::zero()) continue;
    gens.push_back(std::move(p));
  }
  return orthonormalize(sp, "kahler", std::move(gens));
}

// Symplectic frame of the J-anti-invariant symmetric module: orthonormal
// gamma(i) spanning a Lagrangian subspace together with sigma(i) = jsym(gamma(i)).
template <class S>
std::pair<std::vector<Mat<S>>, std::vector<Mat<S>>> lagrangian_frame(const MetricSpace<S>& sp) {
  Basis<S> mod = kahler_module_basis(sp, KahlerModule::sym_janti);
  std::vector<Mat<S>> gammas, sigmas;
  std::vector<Tensor<S>> used;
  Basis<S> span(sp, "lagrangian-span");
  for (std::size_t i = 0; i < mod.size() && gammas.size() < mod.size() / 2; ++i) {
    Mat<S> cand = to_mat(mod[i]);
    // project out the symplectic span collected so far
    Tensor<S> ct = to_tensor(cand);
    if (span.size()) ct = ct - span.project(ct);
    cand = to_mat(ct);
    S nrm = inner2(sp, cand, cand);
    if constexpr (scalar_traits<S>::exact) {
      if (nrm == scalar_traits<S>::zero()) continue;
    } else {
      if (to_double(nrm) < 1e-16) continue;
    }
    if constexpr (scalar_traits<S>::has_sqrt) {
      cand = cand * (scalar_traits<S>::one() / scalar_traits<S>::sqrt(nrm));
    }
    Mat<S> sig = jsym(sp, cand);
    gammas.push_back(cand);
    sigmas.push_back(sig);
    span.push(to_tensor(cand));
    span.push(to_tensor(sig));
  }
  return {gammas, sigmas};
}

// Kähler-Weyl basis: trace-free parts of the sJKW generator set over a
// symplectic frame, orthonormalized.
template <class S>
Basis<S> kahler_weyl_basis(const MetricSpace<S>& sp) {
  auto [gammas, sigmas] = lagrangian_frame(sp);
  std::vector<Tensor<S>> gens;
  const std::size_t N = gammas.size();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j)
      gens.push_back(kahler_tf(sp, sJKW(sp, gammas[i], gammas[j])));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      gens.push_back(kahler_tf(sp, sJKW(sp, gammas[i], sigmas[j])));
  // the diagonal sigma pairs complete the span at small m
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j)
      gens.push_back(kahler_tf(sp, sJKW(sp, sigmas[i], sigmas[j])));
  return orthonormalize(sp, "kahler-weyl", std::move(gens));
}

// ---------------------------------------------------------------------------
// closed-form products in the Kähler space
// ---------------------------------------------------------------------------

// sJKW(al,be) * sJKW(ga,si) for J-anti-invariant symmetric arguments.
template <class S>
Tensor<S> closed_sjkw_sjkw(const MetricSpace<S>& sp, const Mat<S>& al, const Mat<S>& be,
                           const Mat<S>& ga, const Mat<S>& si) {
  auto frac = [](long p, long q) { return scalar_traits<S>::from_fraction(p, q); };
  auto K = [&](const Mat<S>& u, const Mat<S>& v) { return sK(sp, u, v); };
  auto W = [&](const Mat<S>& u, const Mat<S>& v) { return sJKW(sp, u, v); };
  Tensor<S> r = (W(be, si) * inner2(sp, al, ga) + W(be, ga) * inner2(sp, al, si) +
                 W(al, si) * inner2(sp, be, ga) + W(al, ga) * inner2(sp, be, si)) *
                frac(1, 4);
  r += (W(be, jsym(sp, si)) * inner2(sp, al, jsym(sp, ga)) +
        W(be, jsym(sp, ga)) * inner2(sp, al, jsym(sp, si))) *
       frac(1, 4);
  r += (W(al, jsym(sp, si)) * inner2(sp, be, jsym(sp, ga)) +
        W(al, jsym(sp, ga)) * inner2(sp, be, jsym(sp, si))) *
       frac(1, 4);
  r += (K(bracket(sp, al, ga), bracket(sp, be, si)) +
        K(bracket(sp, al, si), bracket(sp, be, ga))) *
       frac(1, 4);
  r += K(jsym(sp, jmult(sp, al, ga)), jsym(sp, jmult(sp, be, si)));
  r += K(jsym(sp, jmult(sp, al, si)), jsym(sp, jmult(sp, be, ga)));
  return r;
}

// sK(al,be) * sK(ga,si) for J-invariant two-forms.
template <class S>
Tensor<S> closed_sk_sk(const MetricSpace<S>& sp, const Mat<S>& al, const Mat<S>& be,
                       const Mat<S>& ga, const Mat<S>& si) {
  auto frac = [](long p, long q) { return scalar_traits<S>::from_fraction(p, q); };
  auto K = [&](const Mat<S>& u, const Mat<S>& v) { return sK(sp, u, v); };
  auto cmp = [&](const Mat<S>& u, const Mat<S>& v, const Mat<S>& w) {
    return compose(sp, compose(sp, u, v), w);
  };
  Tensor<S> r = (K(be, si) * inner2(sp, al, ga) + K(be, ga) * inner2(sp, al, si) +
                 K(al, si) * inner2(sp, be, ga) + K(al, ga) * inner2(sp, be, si)) *
                frac(1, 4);
  r -= (K(al, cmp(ga, be, si) + cmp(si, be, ga)) + K(be, cmp(ga, al, si) + cmp(si, al, ga))) *
       frac(1, 2);
  r -= (K(ga, cmp(al, si, be) + cmp(be, si, al)) + K(si, cmp(al, ga, be) + cmp(be, ga, al))) *
       frac(1, 2);
  r += (K(bracket(sp, al, ga), bracket(sp, be, si)) +
        K(bracket(sp, al, si), bracket(sp, be, ga))) *
       frac(3, 4);
  r -= K(jsym(sp, jmult(sp, al, ga)), jsym(sp, jmult(sp, be, si)));
  r -= K(jsym(sp, jmult(sp, al, si)), jsym(sp, jmult(sp, be, ga)));
  return r;
}

// X * sK(al, om) = -(sK(al, ricform X) + sK(om, op X (al)))/2 for Kähler X.
template <class S>
Tensor<S> closed_x_sk_om(const MetricSpace<S>& sp, const Tensor<S>& x, const Mat<S>& al) {
  const Mat<S>& om = sp.kahler().omega;
  return (sK(sp, al, ricform(sp, x)) + sK(sp, om, op2(sp, x, al))) *
         scalar_traits<S>::from_fraction(-1, 2);
}

// Named Kähler product oracle.
template <class S>
Tensor<S> kahler_product_oracle(const MetricSpace<S>& sp, const std::string& kind,
                                const std::vector<Mat<S>>& args,
                                const Tensor<S>* curv_arg = nullptr) {
  const Mat<S>& om = sp.kahler().omega;
  const long m = static_cast<long>(sp.dim());
  auto frac = [](long p, long q) { return scalar_traits<S>::from_fraction(p, q); };
  if (kind == "sjkw_sjkw") return closed_sjkw_sjkw(sp, args[0], args[1], args[2], args[3]);
  if (kind == "sk_sk") return closed_sk_sk(sp, args[0], args[1], args[2], args[3]);
  if (kind == "x_sk_om") {
    if (!curv_arg) throw std::invalid_argument("x_sk_om needs a curvature argument");
    return closed_x_sk_om(sp, *curv_arg, args[0]);
  }
  if (kind == "x_sk_omom") {
    if (!curv_arg) throw std::invalid_argument("x_sk_omom needs a curvature argument");
    return sK(sp, ricform(sp, *curv_arg), om) * (-scalar_traits<S>::one());
  }
  if (kind == "sk_albe_sk_gaom") {
    // sK(al,be) * sK(ga,om) for anti-invariant al, be, ga
    const Mat<S>&al = args[0], &be = args[1], &ga = args[2];
    auto cmp = [&](const Mat<S>& u, const Mat<S>& v, const Mat<S>& w) {
      return compose(sp, compose(sp, u, v), w);
    };
    Tensor<S> r = sK(sp, jsym(sp, jmult(sp, al, be)), ga) * (-scalar_traits<S>::one());
    r -= sK(sp, cmp(al, ga, be) + cmp(be, ga, al), om) * frac(1, 2);
    r += sK(sp, be, om) * (inner2(sp, al, ga) * frac(1, 4));
    r += sK(sp, al, om) * (inner2(sp, be, ga) * frac(1, 4));
    return r;
  }
  if (kind == "sk_alom_sk_beom") {
    // sK(al,om) * sK(be,om) = (m+4)/4 sK(al,be) - sK((al jm be) o om, om)
    //                        + <al,be>/4 sK(om,om)
    const Mat<S>&al = args[0], &be = args[1];
    Tensor<S> r = sK(sp, al, be) * frac(m + 4, 4);
    r -= sK(sp, jsym(sp, jmult(sp, al, be)), om);
    r += sK(sp, om, om) * (inner2(sp, al, be) * frac(1, 4));
    return r;
  }
  if (kind == "sk_alom_sk_omom") {
    return sK(sp, args[0], om) * frac(m + 4, 2);
  }
  if (kind == "sk_omom_sk_omom") {
    return sK(sp, om, om) * scalar_traits<S>::from_int(m + 2);
  }
  throw std::invalid_argument("unknown Kähler product kind: " + kind);
}

// ---------------------------------------------------------------------------
// Kähler idempotents
// ---------------------------------------------------------------------------

template <class S>
Tensor<S> idempotent_komega_tensor(const MetricSpace<S>& sp) {
  const long m = static_cast<long>(sp.dim());
  const Mat<S>& om = sp.kahler().omega;
  return sK(sp, om, om) * scalar_traits<S>::from_fraction(1, m + 2);
}

// An anti-self-dual complex structure (anticommuting with J); exists iff
// 4 | m, built on the antidiagonal.
template <class S>
Mat<S> anticommuting_complex_structure(const MetricSpace<S>& sp) {
  const std::size_t m = sp.dim();
  if (m % 4 != 0)
    throw std::domain_error("anticommuting complex structure needs 4 | m");
  if (!sp.is_euclidean()) throw std::domain_error("construction assumes the standard frame");
  const std::size_t n = m / 2;
  Mat<S> al(m, m);
  for (std::size_t i = 0; i < n; ++i) {
    // alpha = sum e^i wedge e^{n + (n+1-i)} in one-based labels
    std::size_t row = i;
    std::size_t col = n + (n - 1 - i);
    al(row, col) += scalar_traits<S>::one();
    al(col, row) -= scalar_traits<S>::one();
  }
  return al;
}

template <class S>
Tensor<S> idempotent_kwm_tensor(const MetricSpace<S>& sp, const Mat<S>& al) {
  const long m = static_cast<long>(sp.dim());
  const Mat<S>& om = sp.kahler().omega;
  Tensor<S> r = sK(sp, al, al) - sK(sp, om, om) * scalar_traits<S>::from_fraction(2, m + 2);
  return r * scalar_traits<S>::from_fraction(1, m + 4);
}

template <class S>
Tensor<S> idempotent_kwp_tensor(const MetricSpace<S>& sp, const Mat<S>& al) {
  const long m = static_cast<long>(sp.dim());
  const Mat<S>& om = sp.kahler().omega;
  return (sK(sp, al, al) + sK(sp, om, om)) * scalar_traits<S>::from_fraction(1, m + 4);
}

template <class S>
Tensor<S> idempotent_z_tensor(const MetricSpace<S>& sp, const Mat<S>& ga) {
  const long m = static_cast<long>(sp.dim());
  const Mat<S>& om = sp.kahler().omega;
  Tensor<S> r = sJKW(sp, ga, ga) + sK(sp, om, om) * scalar_traits<S>::from_fraction(2, m + 2);
  return r * scalar_traits<S>::from_fraction(1, m);
}

// gamma(theta): the Lagrangian family, gamma(0) = sum_i (e^i e^i - e^{n+i} e^{n+i}).
template <class S>
Mat<S> lagrangian_gamma(const MetricSpace<S>& sp, const std::vector<double>& theta) {
  static_assert(!scalar_traits<S>::exact, "angle parametrization is float-only");
  const std::size_t m = sp.dim();
  const std::size_t n = m / 2;
  if (theta.size() != n) throw std::invalid_argument("need m/2 angles");
  Mat<S> g(m, m);
  for (std::size_t i = 0; i < n; ++i) {
    double c = std::cos(theta[i]), s = std::sin(theta[i]);
    g(i, i) += c;
    g(n + i, n + i) -= c;
    g(i, n + i) += s;
    g(n + i, i) += s;
  }
  return g;
}

// U(theta) endomorphism as a covariant 2-tensor (lowered with h = Id).
template <class S>
Mat<S> lagrangian_u(const MetricSpace<S>& sp, const std::vector<double>& theta) {
  static_assert(!scalar_traits<S>::exact, "angle parametrization is float-only");
  const std::size_t m = sp.dim();
  const std::size_t n = m / 2;
  Mat<S> u(m, m);
  for (std::size_t i = 0; i < n; ++i) {
    double c = std::cos(theta[i]), s = std::sin(theta[i]);
    u(i, i) += c;
    u(n + i, n + i) += c;
    u(i, n + i) += s;
    u(n + i, i) -= s;
  }
  return u;
}

// Moment-map covector of the unitary action on the J-anti-invariant
// symmetric module, evaluated on a J-invariant two-form:
// mu(be)(al) = <omega - be o be o omega, al>.
template <class S>
S moment(const MetricSpace<S>& sp, const Mat<S>& be, const Mat<S>& al) {
  const Mat<S>& om = sp.kahler().omega;
  Mat<S> arg = om - compose(sp, compose(sp, be, be), om);
  return inner2(sp, arg, al);
}

// Max of |mu(be)| over a basis of the unitary algebra; zero iff be o be = h.
template <class S>
S moment_norm(const MetricSpace<S>& sp, const Mat<S>& be) {
  Basis<S> jinv = kahler_module_basis(sp, KahlerModule::forms_jinv);
  S worst = scalar_traits<S>::zero();
  for (std::size_t i = 0; i < jinv.size(); ++i) {
    S v = scalar_traits<S>::abs(moment(sp, be, to_mat(jinv[i])));
    if (v > worst) worst = v;
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Kähler fusion rules and the deformation endomorphism
// ---------------------------------------------------------------------------

template <class S>
Tensor<S> kahler_bw(const MetricSpace<S>& sp, const S& a, const S& b, const Tensor<S>& x) {
  if (a == scalar_traits<S>::zero() || b == scalar_traits<S>::zero())
    throw std::invalid_argument("kahler_bw: parameters must be nonzero");
  return kahler_tf(sp, x) + kahler_proj_ric(sp, x) * b + kahler_proj_scal(sp, x) * a;
}

template <class S>
Tensor<S> kahler_dbw_two_route(const MetricSpace<S>& sp, const S& a, const S& b,
                               const Tensor<S>& x) {
  Tensor<S> bx = kahler_bw(sp, a, b, x);
  Tensor<S> prod = curvmult(sp, bx, bx);
  Tensor<S> inv = kahler_bw(sp, scalar_traits<S>::one() / a, scalar_traits<S>::one() / b, prod);
  return inv - curvmult(sp, x, x);
}

// Closed form, independent of the Kähler-Weyl part of X. Built on the
// verified summand products: with K = sK(rho0, rho0),
//   kric(X) * kric(X) = tf(K)/(m+4) + 2 kprojric(K)/(m+4) + kprojscal(K)/2,
//   kscal(X) * kscal(X) = -(scal/m) kprojscal(X),
//   kscal(X) * kric(X) = -((m+4)/(2m(m+2))) scal kprojric(X),
//   tf(X) * kric(Y) = kprojric(tf(X) * Y).
template <class S>
Tensor<S> kahler_dbw_closed(const MetricSpace<S>& sp, const S& a, const S& b, const Tensor<S>& x) {
  const long m = static_cast<long>(sp.dim());
  const S one = scalar_traits<S>::one();
  auto frac = [](long p, long q) { return scalar_traits<S>::from_fraction(p, q); };
  Mat<S> rz = ricform_traceless(sp, x);
  Tensor<S> krr = sK(sp, rz, rz);
  S sc = scal(sp, x);
  Tensor<S> out = kahler_tf(sp, krr) * ((b * b - one) * frac(1, m + 4));
  Tensor<S> ric_arg =
      krr * ((b - one) * frac(2, m + 4)) + x * (sc * (one - a) * frac(m + 4, m * (m + 2)));
  out += kahler_proj_ric(sp, ric_arg);
  Tensor<S> scal_arg =
      krr * ((b * b / a - one) * frac(1, 2)) + x * (sc * (one - a) * frac(1, m));
  out += kahler_proj_scal(sp, scal_arg);
  return out;
}

template <class S>
struct KahlerFusionReport {
  S max_forbidden_leakage = scalar_traits<S>::zero();
  bool surjectivity_ok = true;
  std::vector<std::string> failures;
};

template <class S>
KahlerFusionReport<S> kahler_fusion_check(const MetricSpace<S>& sp, Prng& rng,
                                          std::size_t samples = 4) {
  KahlerFusionReport<S> rep;
  const Mat<S>& om = sp.kahler().omega;
  Basis<S> kw = kahler_weyl_basis(sp);
  Basis<S> asd = kahler_module_basis(sp, KahlerModule::forms_asd);
  auto upd = [&rep](const S& v) {
    if (v > rep.max_forbidden_leakage) rep.max_forbidden_leakage = v;
  };
  Tensor<S> kscal = sK(sp, om, om);
  auto random_kric = [&] {
    Mat<S> al = to_mat(asd.random_element(rng));
    return sK(sp, al, om);
  };
  for (std::size_t s = 0; s < samples; ++s) {
    Tensor<S> w = kw.random_element(rng);
    Tensor<S> r1 = random_kric();
    Tensor<S> r2 = random_kric();
    // scal * scal stays scal (it is (m+2) sK(om, om) exactly)
    Tensor<S> ss = curvmult(sp, kscal, kscal);
    upd(kahler_tf(sp, ss).max_abs());
    upd(kahler_proj_ric(sp, ss).max_abs());
    // weyl * scal = 0
    upd(curvmult(sp, w, kscal).max_abs());
    // ric * scal stays ric: kweyl and kscal parts of the product vanish
    Tensor<S> rs = curvmult(sp, r1, kscal);
    upd(kahler_tf(sp, rs).max_abs());
    upd(kahler_proj_scal(sp, rs).max_abs());
    // weyl * ric stays ric
    Tensor<S> wr = curvmult(sp, w, r1);
    upd(kahler_tf(sp, wr).max_abs());
    upd(kahler_proj_scal(sp, wr).max_abs());
    // weyl * weyl stays weyl
    Tensor<S> ww = curvmult(sp, w, w);
    upd(kahler_proj_ric(sp, ww).max_abs());
    upd(kahler_proj_scal(sp, ww).max_abs());
    // ric * ric: membership in the Kähler space only
    upd(is_kahler_residual(sp, curvmult(sp, r1, r2)));
  }
  if constexpr (!scalar_traits<S>::exact) {
    // surjectivity ranks: tf(ric * ric) spans kweyl, weyl * ric spans ric
    auto span_rank = [&](const Basis<S>& target, auto&& make_sample, std::size_t count) {
      Mat<S> m(count, target.size());
      for (std::size_t i = 0; i < count; ++i) {
        auto coords = target.coordinates(make_sample());
        for (std::size_t j = 0; j < target.size(); ++j) m(i, j) = coords[j];
      }
      return svd_rank(m, 1e-8);
    };
    std::size_t rk = span_rank(
        kw, [&] { return kahler_tf(sp, curvmult(sp, random_kric(), random_kric())); },
        kw.size() + 4);
    if (rk != kw.size()) {
      rep.surjectivity_ok = false;
      rep.failures.push_back("kric*kric does not span kweyl");
    }
    // the Ricci summand, spanned by sK(asd, omega)
    Basis<S> kric(sp, "kahler-ric");
    for (std::size_t i = 0; i < asd.size(); ++i) kric.push(sK(sp, to_mat(asd[i]), om));
    std::size_t rk2 = span_rank(
        kric, [&] { return curvmult(sp, kw.random_element(rng), random_kric()); },
        kric.size() + 4);
    if (rk2 != kric.size()) {
      rep.surjectivity_ok = false;
      rep.failures.push_back("kweyl*kric does not span kric");
    }
  }
  return rep;
}

}  // namespace curvalg
