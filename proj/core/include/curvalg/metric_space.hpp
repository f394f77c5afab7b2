#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>

#include "curvalg/linsys.hpp"
#include "curvalg/prng.hpp"
#include "curvalg/scalar.hpp"

namespace curvalg {

// Kähler data: a compatible complex structure J and its symplectic form
// omega_ij = J_i^p h_pj, both stored with covariant indices.
template <class S>
struct KahlerData {
  Mat<S> j_endo;  // J_i^j, mixed indices
  Mat<S> omega;   // omega_ij
};

// A metric vector space (V, h): dimension, SPD Gram matrix, its inverse,
// optional orientation and optional Kähler pair. Immutable after creation.
template <class S>
class MetricSpace {
 public:
  static MetricSpace euclidean(std::size_t n, bool oriented = true) {
    return MetricSpace(n, Mat<S>::identity(n), oriented);
  }

  static MetricSpace with_metric(std::size_t n, Mat<S> h, bool oriented = true) {
    return MetricSpace(n, std::move(h), oriented);
  }

  // Random SPD Gram matrix A A^T + n I; well conditioned at desk scale.
  static MetricSpace random_spd(std::size_t n, Prng& rng, bool oriented = true) {
    Mat<S> a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.template next_scalar<S>();
    Mat<S> h = a * a.transposed();
    for (std::size_t i = 0; i < n; ++i) h(i, i) += scalar_traits<S>::from_int(static_cast<long>(n));
    return MetricSpace(n, std::move(h), oriented);
  }

  // Standard Kähler frame: h = Id, J(e_i) = e_{n+i}, J(e_{n+i}) = -e_i,
  // omega = sum_i e^i wedge e^{n/2+i}.
  static MetricSpace kahler_standard(std::size_t m) {
    if (m % 2 != 0) throw std::invalid_argument("Kähler space needs even dimension");
    MetricSpace sp = euclidean(m);
    const std::size_t half = m / 2;
    Mat<S> j(m, m);
    for (std::size_t i = 0; i < half; ++i) {
      j(i, half + i) = scalar_traits<S>::one();
      j(half + i, i) = -scalar_traits<S>::one();
    }
    sp.set_kahler(std::move(j));
    return sp;
  }

  std::size_t dim() const { return n_; }
  const Mat<S>& h() const { return h_; }
  const Mat<S>& h_inv() const { return h_inv_; }
  bool oriented() const { return oriented_; }
  bool is_euclidean() const { return euclidean_; }

  bool has_kahler() const { return kahler_.has_value(); }
  const KahlerData<S>& kahler() const {
    if (!kahler_) throw std::logic_error("space carries no Kähler data");
    return *kahler_;
  }

  // Installs (J, omega); validates J^2 = -Id and J^T h J = h.
  void set_kahler(Mat<S> j_endo) {
    if (n_ % 2 != 0) throw std::invalid_argument("Kähler space needs even dimension");
    Mat<S> j2 = mixed_compose(j_endo, j_endo);
    Mat<S> minus_id = Mat<S>::identity(n_) * (-scalar_traits<S>::one());
    check_small((j2 - minus_id).max_abs(), "J^2 != -Id");
    // compatibility J_i^p J_j^q h_pq = h_ij
    Mat<S> jhj(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        S acc = scalar_traits<S>::zero();
        for (std::size_t p = 0; p < n_; ++p)
          for (std::size_t q = 0; q < n_; ++q) acc += j_endo(i, p) * j_endo(j, q) * h_(p, q);
        jhj(i, j) = acc;
      }
    check_small((jhj - h_).max_abs(), "J not h-compatible");
    Mat<S> omega(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        S acc = scalar_traits<S>::zero();
        for (std::size_t p = 0; p < n_; ++p) acc += j_endo(i, p) * h_(p, j);
        omega(i, j) = acc;
      }
    check_small((omega + omega.transposed()).max_abs(), "omega not antisymmetric");
    kahler_ = KahlerData<S>{std::move(j_endo), std::move(omega)};
  }

  // Scale of the volume form: eps_{1..n} = sqrt(det h), so that <eps,eps> = n!
  // and an oriented h-orthonormal frame evaluates to 1.
  S epsilon_scale() const {
    if (!oriented_) throw std::logic_error("space is not oriented");
    return scalar_traits<S>::sqrt(determinant(h_));
  }

 private:
  MetricSpace(std::size_t n, Mat<S> h, bool oriented)
      : n_(n), h_(std::move(h)), oriented_(oriented) {
    if (n < 2) throw std::invalid_argument("dimension must be >= 2");
    check_small((h_ - h_.transposed()).max_abs(), "metric not symmetric");
    h_inv_ = inverse(h_);
    euclidean_ = (h_ - Mat<S>::identity(n_)).max_abs() == scalar_traits<S>::zero();
  }

  static void check_small(const S& v, const char* msg) {
    if constexpr (scalar_traits<S>::exact) {
      if (v != scalar_traits<S>::zero()) throw std::invalid_argument(msg);
    } else {
      if (scalar_traits<S>::to_double(v) > 1e-12) throw std::invalid_argument(msg);
    }
  }

  static Mat<S> mixed_compose(const Mat<S>& a, const Mat<S>& b) {
    // (a b)_i^j = a_i^p b_p^j for mixed-index endomorphism matrices
    return a * b;
  }

  std::size_t n_;
  Mat<S> h_;
  Mat<S> h_inv_;
  bool oriented_;
  bool euclidean_ = false;
  std::optional<KahlerData<S>> kahler_;
};

}  // namespace curvalg
