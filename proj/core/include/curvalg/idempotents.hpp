#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "curvalg/basis.hpp"
#include "curvalg/curv.hpp"
#include "curvalg/curvmult.hpp"
#include "curvalg/linsys.hpp"
#include "curvalg/metric_space.hpp"
#include "curvalg/two_tensor.hpp"

namespace curvalg {

// ---------------------------------------------------------------------------
// calibrated pairs: a partial complex structure over an r-dimensional block
// ---------------------------------------------------------------------------

// alpha in Lambda^2 and a projector g in S^2 with alpha o alpha = -g,
// alpha o g = alpha = g o alpha, tr g = |g|^2 = |alpha|^2 = r.
template <class S>
struct CalibratedPair {
  Mat<S> alpha;
  Mat<S> g;
  std::size_t r;
};

template <class S>
S calibrated_pair_residual(const MetricSpace<S>& sp, const CalibratedPair<S>& p) {
  S m = (compose(sp, p.alpha, p.alpha) + p.g).max_abs();
  auto upd = [&m](const S& v) {
    if (v > m) m = v;
  };
  upd((compose(sp, p.g, p.g) - p.g).max_abs());
  upd((compose(sp, p.alpha, p.g) - p.alpha).max_abs());
  upd((compose(sp, p.g, p.alpha) - p.alpha).max_abs());
  const S r = scalar_traits<S>::from_int(static_cast<long>(p.r));
  upd(scalar_traits<S>::abs(trace2(sp, p.g) - r));
  upd(scalar_traits<S>::abs(inner2(sp, p.g, p.g) - r));
  upd(scalar_traits<S>::abs(inner2(sp, p.alpha, p.alpha) - r));
  return m;
}

// alpha = sum e^{2i-1} wedge e^{2i}, g = sum of the first r frame projectors.
// Requires h = Id (the frame is declared orthonormal); conjugate afterwards
// for other frames.
template <class S>
CalibratedPair<S> build_calibrated_pair(const MetricSpace<S>& sp, std::size_t r) {
  if (r % 2 != 0 || r < 4 || r > sp.dim())
    throw std::invalid_argument("calibrated pair needs even 4 <= r <= n");
  if (!sp.is_euclidean())
    throw std::invalid_argument("calibrated pair construction assumes an orthonormal frame");
  const std::size_t n = sp.dim();
  Mat<S> alpha(n, n), g(n, n);
  for (std::size_t i = 0; i < r / 2; ++i) {
    alpha(2 * i, 2 * i + 1) = scalar_traits<S>::one();
    alpha(2 * i + 1, 2 * i) = -scalar_traits<S>::one();
  }
  for (std::size_t i = 0; i < r; ++i) g(i, i) = scalar_traits<S>::one();
  return CalibratedPair<S>{std::move(alpha), std::move(g), r};
}

// ---------------------------------------------------------------------------
// idempotent records
// ---------------------------------------------------------------------------

template <class S>
struct IdempotentRecord {
  std::string family;             // H | K | S | T | C | S4xyzw | KWp | KWm | Z | Komega | numeric
  Tensor<S> element;
  S defect;                       // |E*E - E| sup-norm
  S norm_squared;
  std::vector<std::pair<double, std::size_t>> spectrum;  // nonzero op-eigenvalues with multiplicity
};

// Clusters the nonzero eigenvalues of op(E) on Lambda^2 (float path).
inline std::vector<std::pair<double, std::size_t>> op_spectrum(const MetricSpace<double>& sp,
                                                                const Tensor<double>& e,
                                                                double tol = 1e-7) {
  Basis<double> ext2 = two_form_basis(sp);
  Mat<double> m = operator_matrix(ext2, [&](const Tensor<double>& arg) {
                    return to_tensor(op2(sp, e, to_mat(arg)));
                  }).matrix;
  std::vector<double> ev = sym_eigenvalues(m);
  std::vector<std::pair<double, std::size_t>> out;
  for (double v : ev) {
    if (std::fabs(v) < tol) continue;
    if (!out.empty() && std::fabs(out.back().first - v) < tol)
      ++out.back().second;
    else
      out.push_back({v, 1});
  }
  return out;
}

template <class S>
IdempotentRecord<S> make_record(const MetricSpace<S>& sp, std::string family, Tensor<S> e) {
  IdempotentRecord<S> rec;
  rec.family = std::move(family);
  rec.defect = (curvmult(sp, e, e) - e).max_abs();
  rec.norm_squared = inner(sp, e, e);
  if constexpr (!scalar_traits<S>::exact) {
    rec.spectrum = op_spectrum(sp, e);
  }
  rec.element = std::move(e);
  return rec;
}

// ---------------------------------------------------------------------------
// the H / K^r / S^r family
// ---------------------------------------------------------------------------

template <class S>
Tensor<S> idempotent_h_tensor(const MetricSpace<S>& sp, const Mat<S>& g, std::size_t r) {
  return kwedge(g, g) * scalar_traits<S>::from_fraction(1, static_cast<long>(r) - 1);
}

template <class S>
Tensor<S> idempotent_k_tensor(const MetricSpace<S>& sp, const CalibratedPair<S>& p) {
  const long r = static_cast<long>(p.r);
  return (cdot(p.alpha, p.alpha) + kwedge(p.g, p.g)) * scalar_traits<S>::from_fraction(1, r + 2);
}

template <class S>
Tensor<S> idempotent_s_tensor(const MetricSpace<S>& sp, const CalibratedPair<S>& p) {
  const long r = static_cast<long>(p.r);
  return (cdot(p.alpha, p.alpha) - kwedge(p.g, p.g) * scalar_traits<S>::from_fraction(3, r - 1)) *
         scalar_traits<S>::from_fraction(1, r + 2);
}

template <class S>
IdempotentRecord<S> idempotent_H(const MetricSpace<S>& sp, const Mat<S>& g, std::size_t r) {
  return make_record(sp, "H", idempotent_h_tensor(sp, g, r));
}

template <class S>
IdempotentRecord<S> idempotent_K(const MetricSpace<S>& sp, const CalibratedPair<S>& p) {
  return make_record(sp, "K", idempotent_k_tensor(sp, p));
}

template <class S>
IdempotentRecord<S> idempotent_S(const MetricSpace<S>& sp, const CalibratedPair<S>& p) {
  return make_record(sp, "S", idempotent_s_tensor(sp, p));
}

// Stated spectra of the induced operators on Lambda^2, as exact fractions.
inline std::vector<std::pair<Rational, std::size_t>> spectrum_S_expected(std::size_t r_sz,
                                                                          std::size_t n) {
  const long r = static_cast<long>(r_sz);
  std::vector<std::pair<Rational, std::size_t>> s;
  s.push_back({Rational(2 - r, r - 1), 1});
  s.push_back({Rational(1, r - 1), static_cast<std::size_t>(r * (r - 2) / 4)});
  if (r != 4) s.push_back({Rational(4 - r, (r + 2) * (r - 1)), static_cast<std::size_t>((r * r - 4) / 4)});
  std::size_t used = 1 + static_cast<std::size_t>(r * (r - 2) / 4) +
                     (r != 4 ? static_cast<std::size_t>((r * r - 4) / 4) : 0);
  std::size_t dim = n * (n - 1) / 2;
  std::size_t zeros = dim - used - (r == 4 ? 3 : 0);
  s.push_back({Rational(0), zeros + (r == 4 ? 3 : 0)});
  return s;
}

inline std::vector<std::pair<Rational, std::size_t>> spectrum_K_expected(std::size_t r_sz,
                                                                          std::size_t n) {
  const long r = static_cast<long>(r_sz);
  std::vector<std::pair<Rational, std::size_t>> s;
  s.push_back({Rational(-1), 1});
  s.push_back({Rational(2, r + 2), static_cast<std::size_t>((r * r - 4) / 4)});
  std::size_t dim = n * (n - 1) / 2;
  s.push_back({Rational(0), dim - 1 - static_cast<std::size_t>((r * r - 4) / 4)});
  return s;
}

// Cosine of the angle between S^r(alpha) and S^r(beta) built over the same g.
template <class S>
S angle_S(const MetricSpace<S>& sp, const CalibratedPair<S>& p, const CalibratedPair<S>& q) {
  if ((p.g - q.g).max_abs() != scalar_traits<S>::zero())
    throw std::invalid_argument("angle_S: pairs must share g");
  Tensor<S> sa = idempotent_s_tensor(sp, p);
  Tensor<S> sb = idempotent_s_tensor(sp, q);
  // |S^r|^2 = 6r(r-2)/((r+2)(r-1)) for both, exact rational
  const long r = static_cast<long>(p.r);
  S nsq = scalar_traits<S>::from_fraction(6 * r * (r - 2), (r + 2) * (r - 1));
  return inner(sp, sa, sb) / nsq;
}

// ---------------------------------------------------------------------------
// hyper-Kähler triples and Clifford families
// ---------------------------------------------------------------------------

template <class S>
struct HyperKahlerTriple {
  CalibratedPair<S> a, b, c;  // gamma = alpha o beta
};

// Blockwise quaternionic structure on the first r coordinates, 4 | r.
template <class S>
HyperKahlerTriple<S> hyperkahler_triple(const MetricSpace<S>& sp, std::size_t r) {
  if (r % 4 != 0 || r < 4 || r > sp.dim())
    throw std::invalid_argument("hyper-Kähler triple needs 4 | r <= n");
  if (!sp.is_euclidean())
    throw std::invalid_argument("triple construction assumes an orthonormal frame");
  const std::size_t n = sp.dim();
  Mat<S> a(n, n), b(n, n), g(n, n);
  auto setw = [&](Mat<S>& m, std::size_t i, std::size_t j, long v) {
    m(i, j) = scalar_traits<S>::from_int(v);
    m(j, i) = scalar_traits<S>::from_int(-v);
  };
  for (std::size_t t = 0; t < r / 4; ++t) {
    std::size_t x = 4 * t, y = 4 * t + 1, z = 4 * t + 2, w = 4 * t + 3;
    setw(a, x, y, 1);
    setw(a, z, w, 1);
    setw(b, y, z, 1);
    setw(b, x, w, 1);
  }
  for (std::size_t i = 0; i < r; ++i) g(i, i) = scalar_traits<S>::one();
  Mat<S> c = compose(sp, a, b);
  HyperKahlerTriple<S> tr{{a, g, r}, {b, g, r}, {c, g, r}};
  // certify: anticommuting complex structures over g
  S res = calibrated_pair_residual(sp, tr.a);
  auto upd = [&res](const S& v) {
    if (v > res) res = v;
  };
  upd(calibrated_pair_residual(sp, tr.b));
  upd(calibrated_pair_residual(sp, tr.c));
  upd(jmult(sp, tr.a.alpha, tr.b.alpha).max_abs());
  upd(jmult(sp, tr.b.alpha, tr.c.alpha).max_abs());
  upd(jmult(sp, tr.c.alpha, tr.a.alpha).max_abs());
  if constexpr (scalar_traits<S>::exact) {
    if (res != scalar_traits<S>::zero()) throw std::logic_error("triple invariants violated");
  } else {
    if (to_double(res) > 1e-12) throw std::logic_error("triple invariants violated");
  }
  return tr;
}

// The seven two-forms of left multiplication by the imaginary units of the
// octonions acting on the first eight coordinates. Oriented Fano triads:
// e1e2 = e3, e5e4 = e1, e3e6 = e5, e1e7 = e6, e3e7 = e4, e5e7 = e2, e2e6 = e4.
template <class S>
std::vector<CalibratedPair<S>> octonion_family(const MetricSpace<S>& sp) {
  if (sp.dim() < 8) throw std::invalid_argument("octonion family needs n >= 8");
  if (!sp.is_euclidean())
    throw std::invalid_argument("octonion family assumes an orthonormal frame");
  const std::size_t n = sp.dim();
  static const int triads[7][3] = {{1, 2, 3}, {5, 4, 1}, {3, 6, 5}, {1, 7, 6},
                                   {3, 7, 4}, {5, 7, 2}, {2, 6, 4}};
  // mult[i][j] = signed unit index of e_i e_j (i, j in 1..7), 0 on diagonal
  int mult[8][8] = {};
  for (auto& t : triads) {
    int a = t[0], b = t[1], c = t[2];
    mult[a][b] = c;
    mult[b][a] = -c;
    mult[b][c] = a;
    mult[c][b] = -a;
    mult[c][a] = b;
    mult[a][c] = -b;
  }
  Mat<S> g(n, n);
  for (std::size_t i = 0; i < 8; ++i) g(i, i) = scalar_traits<S>::one();
  std::vector<CalibratedPair<S>> fam;
  for (int i = 1; i <= 7; ++i) {
    // left multiplication by e_i on the basis (1, e_1, ..., e_7)
    Mat<S> L(n, n);
    auto set = [&](std::size_t row, std::size_t col, long v) {
      L(row, col) = scalar_traits<S>::from_int(v);
    };
    set(0, static_cast<std::size_t>(i), 1);        // e_i * 1 = e_i
    set(static_cast<std::size_t>(i), 0, -1);       // e_i * e_i = -1
    for (int j = 1; j <= 7; ++j) {
      if (j == i) continue;
      int k = mult[i][j];
      std::size_t row = static_cast<std::size_t>(j);
      if (k > 0)
        set(row, static_cast<std::size_t>(k), 1);
      else
        set(row, static_cast<std::size_t>(-k), -1);
    }
    // two-form alpha(i)_{ab} = <e_i * f_a, f_b> as L acts on row vectors
    fam.push_back(CalibratedPair<S>{L, g, 8});
  }
  // certify the Clifford relations
  S res = scalar_traits<S>::zero();
  auto upd = [&res](const S& v) {
    if (v > res) res = v;
  };
  for (std::size_t i = 0; i < 7; ++i) {
    upd(calibrated_pair_residual(sp, fam[i]));
    for (std::size_t j = i + 1; j < 7; ++j) upd(jmult(sp, fam[i].alpha, fam[j].alpha).max_abs());
  }
  if (res != scalar_traits<S>::zero()) {
    if constexpr (scalar_traits<S>::exact)
      throw std::logic_error("octonion family invariants violated");
    else if (to_double(res) > 1e-12)
      throw std::logic_error("octonion family invariants violated");
  }
  return fam;
}

// ---------------------------------------------------------------------------
// the T and C^r idempotents inside a hyper-Kähler triple span
// ---------------------------------------------------------------------------

template <class S>
Tensor<S> idempotent_t_tensor(const MetricSpace<S>& sp, const HyperKahlerTriple<S>& tr) {
  const long r = static_cast<long>(tr.a.r);
  Tensor<S> sum = idempotent_s_tensor(sp, tr.a) + idempotent_s_tensor(sp, tr.b) +
                  idempotent_s_tensor(sp, tr.c);
  return sum * scalar_traits<S>::from_fraction(r + 2, r + 8);
}

template <class S>
Tensor<S> idempotent_c_tensor(const MetricSpace<S>& sp, const HyperKahlerTriple<S>& tr,
                              std::size_t which) {
  const long r = static_cast<long>(tr.a.r);
  const long den = r * r - 6 * r + 80;
  Tensor<S> sa = idempotent_s_tensor(sp, tr.a);
  Tensor<S> sb = idempotent_s_tensor(sp, tr.b);
  Tensor<S> sc = idempotent_s_tensor(sp, tr.c);
  Tensor<S>* main = which == 0 ? &sa : which == 1 ? &sb : &sc;
  Tensor<S> others = sa + sb + sc - *main;
  return (*main * scalar_traits<S>::from_fraction(10 * (r + 2), den)) +
         others * scalar_traits<S>::from_fraction((r - 6) * (r + 2), den);
}

template <class S>
IdempotentRecord<S> idempotent_T(const MetricSpace<S>& sp, const HyperKahlerTriple<S>& tr) {
  return make_record(sp, "T", idempotent_t_tensor(sp, tr));
}

template <class S>
IdempotentRecord<S> idempotent_C(const MetricSpace<S>& sp, const HyperKahlerTriple<S>& tr,
                                 std::size_t which) {
  return make_record(sp, "C", idempotent_c_tensor(sp, tr, which));
}

// ---------------------------------------------------------------------------
// quadruple family
// ---------------------------------------------------------------------------

// The three distinct idempotents arising from an orthonormal quadruple.
template <class S>
std::vector<IdempotentRecord<S>> s4_family(const MetricSpace<S>& sp, const std::vector<S>& x,
                                           const std::vector<S>& y, const std::vector<S>& z,
                                           const std::vector<S>& w) {
  auto pair_of = [&](const Mat<S>& alpha) {
    Mat<S> g = compose(sp, alpha, alpha) * (-scalar_traits<S>::one());
    return CalibratedPair<S>{alpha, g, 4};
  };
  Mat<S> a = wedge_cov(x, y) + wedge_cov(z, w);
  Mat<S> b = wedge_cov(y, z) + wedge_cov(x, w);
  Mat<S> c = wedge_cov(z, x) + wedge_cov(y, w);
  std::vector<IdempotentRecord<S>> out;
  out.push_back(make_record(sp, "S4xyzw", idempotent_s_tensor(sp, pair_of(a))));
  out.push_back(make_record(sp, "S4xyzw", idempotent_s_tensor(sp, pair_of(b))));
  out.push_back(make_record(sp, "S4xyzw", idempotent_s_tensor(sp, pair_of(c))));
  return out;
}

// ---------------------------------------------------------------------------
// inclusion of a subspace algebra
// ---------------------------------------------------------------------------

// Isometric embedding of an n_w-dimensional space into V, columns h-orthonormal.
template <class S>
struct SubspaceEmbedding {
  Mat<S> cols;  // n_v x n_w, E^T h E = Id_w
};

// Coordinate embedding spanned by the given frame indices (h = Id spaces).
template <class S>
SubspaceEmbedding<S> coordinate_embedding(const MetricSpace<S>& sp,
                                          const std::vector<std::size_t>& idx) {
  Mat<S> e(sp.dim(), idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) e(idx[c], c) = scalar_traits<S>::one();
  return SubspaceEmbedding<S>{std::move(e)};
}

// iota(X)(A,B,C,D) = X(Pi A, ..., Pi D) with Pi the orthogonal projection
// onto the image; an injective algebra homomorphism.
template <class S>
Tensor<S> include_subspace(const MetricSpace<S>& sp_v, const Tensor<S>& x_w,
                           const SubspaceEmbedding<S>& emb) {
  const std::size_t nv = sp_v.dim();
  const std::size_t nw = emb.cols.cols();
  if (x_w.dim() != nw) throw std::invalid_argument("include_subspace: dimension mismatch");
  // Pi_A^a = (E^T h)_{a A}
  Mat<S> pi(nw, nv);
  for (std::size_t a = 0; a < nw; ++a)
    for (std::size_t A = 0; A < nv; ++A) {
      S acc = scalar_traits<S>::zero();
      for (std::size_t B = 0; B < nv; ++B) acc += emb.cols(B, a) * sp_v.h()(B, A);
      pi(a, A) = acc;
    }
  const std::size_t k = x_w.rank();
  Tensor<S> out(nv, k);
  std::vector<std::size_t> src(k);
  detail::for_each_index(nw, k, [&](const std::vector<std::size_t>& wi) {
    const S& v = x_w[x_w.offset(wi)];
    if (v == scalar_traits<S>::zero()) return;
    // accumulate v * prod pi(w_s, A_s) over all big-space indices
    std::vector<std::size_t> ai(k, 0);
    while (true) {
      S coeff = v;
      for (std::size_t s = 0; s < k; ++s) coeff *= pi(wi[s], ai[s]);
      if (coeff != scalar_traits<S>::zero()) out[out.offset(ai)] += coeff;
      std::size_t pos = k;
      bool done = false;
      while (pos > 0) {
        --pos;
        if (++ai[pos] < nv) break;
        ai[pos] = 0;
        if (pos == 0) done = true;
      }
      if (done) break;
    }
  });
  return out;
}

}  // namespace curvalg
