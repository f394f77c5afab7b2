#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "curvalg/linsys.hpp"
#include "curvalg/metric_space.hpp"
#include "curvalg/tensor.hpp"

namespace curvalg {

// Ordered list of equal-rank tensors spanning a subspace, with the raised
// copies cached so Gram matrices and coordinates are flat dot products.
template <class S>
class Basis {
 public:
  Basis(const MetricSpace<S>& sp, std::string tag) : sp_(&sp), tag_(std::move(tag)) {}

  const std::string& tag() const { return tag_; }
  const MetricSpace<S>& space() const { return *sp_; }
  std::size_t size() const { return elems_.size(); }
  const Tensor<S>& operator[](std::size_t i) const { return elems_[i]; }
  const std::vector<Tensor<S>>& elements() const { return elems_; }

  void push(Tensor<S> t) {
    raised_.push_back(raise_all(*sp_, t));
    elems_.push_back(std::move(t));
  }

  Mat<S> gram() const {
    Mat<S> g(size(), size());
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i; j < size(); ++j) {
        g(i, j) = dot_raised(elems_[i], raised_[j]);
        g(j, i) = g(i, j);
      }
    return g;
  }

  std::vector<S> inner_with(const Tensor<S>& t) const {
    std::vector<S> v(size());
    for (std::size_t i = 0; i < size(); ++i) v[i] = dot_raised(t, raised_[i]);
    return v;
  }

  // Coordinates x with t ~ sum x_i e_i; exact when the span contains t.
  std::vector<S> coordinates(const Tensor<S>& t) const {
    if (orthonormal_) return inner_with(t);
    return curvalg::solve(gram(), inner_with(t));
  }

  Tensor<S> combine(const std::vector<S>& x) const {
    Tensor<S> acc(sp_->dim(), elems_[0].rank());
    for (std::size_t i = 0; i < size(); ++i) {
      if (x[i] == scalar_traits<S>::zero()) continue;
      acc += elems_[i] * x[i];
    }
    return acc;
  }

  Tensor<S> project(const Tensor<S>& t) const { return combine(coordinates(t)); }

  // Sup-norm distance from t to the span.
  S projection_residual(const Tensor<S>& t) const { return (t - project(t)).max_abs(); }

  bool is_orthonormal_flagged() const { return orthonormal_; }
  void flag_orthonormal() { orthonormal_ = true; }

  Tensor<S> random_element(Prng& rng) const {
    std::vector<S> x(size());
    for (auto& c : x) c = rng.template next_scalar<S>();
    return combine(x);
  }

 private:
  const MetricSpace<S>* sp_;
  std::string tag_;
  std::vector<Tensor<S>> elems_;
  std::vector<Tensor<S>> raised_;
  bool orthonormal_ = false;
};

// Modified Gram-Schmidt with pivoting over a redundant generator set.
// Float mode: drops directions below rel_tol * (largest remaining norm) and
// normalizes survivors. Exact mode: keeps any direction with nonzero norm and
// leaves it unnormalized (rational square roots rarely exist), so the result
// is orthogonal, not orthonormal.
template <class S>
Basis<S> orthonormalize(const MetricSpace<S>& sp, const std::string& tag,
                        std::vector<Tensor<S>> gens, double rel_tol = 1e-9) {
  Basis<S> out(sp, tag);
  std::vector<Tensor<S>> raised;
  raised.reserve(gens.size());
  for (auto& g : gens) raised.push_back(raise_all(sp, g));
  std::vector<S> norms(gens.size());
  std::vector<bool> used(gens.size(), false);
  for (std::size_t i = 0; i < gens.size(); ++i) norms[i] = dot_raised(gens[i], raised[i]);

  S largest = scalar_traits<S>::zero();
  for (const auto& nn : norms)
    if (nn > largest) largest = nn;
  while (true) {
    std::size_t best = gens.size();
    S best_norm = scalar_traits<S>::zero();
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (used[i]) continue;
      if (best == gens.size() || norms[i] > best_norm) {
        best = i;
        best_norm = norms[i];
      }
    }
    if (best == gens.size()) break;
    bool keep;
    if constexpr (scalar_traits<S>::exact) {
      keep = best_norm > scalar_traits<S>::zero();
    } else {
      keep = to_double(best_norm) > rel_tol * to_double(largest);
    }
    if (!keep) break;
    used[best] = true;
    Tensor<S> v = gens[best];
    if constexpr (scalar_traits<S>::has_sqrt) {
      v *= scalar_traits<S>::one() / scalar_traits<S>::sqrt(best_norm);
    }
    Tensor<S> v_raised = raise_all(sp, v);
    S v_norm = dot_raised(v, v_raised);
    // sweep the rest
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (used[i]) continue;
      S c = dot_raised(gens[i], v_raised) / v_norm;
      if (c == scalar_traits<S>::zero()) continue;
      gens[i] -= v * c;
      raised[i] -= v_raised * c;
      norms[i] = dot_raised(gens[i], raised[i]);
    }
    out.push(std::move(v));
  }
  if constexpr (scalar_traits<S>::has_sqrt) out.flag_orthonormal();
  return out;
}

// Matrix of a linear operator relative to a basis, column j holding the
// coordinates of op(e_j). Supports spectra and traces downstream.
template <class S>
struct LinearMap {
  Mat<S> matrix;

  S trace() const { return matrix.trace(); }
};

template <class S, class Op>
LinearMap<S> operator_matrix(const Basis<S>& basis, Op&& op) {
  const std::size_t d = basis.size();
  Mat<S> m(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    auto img = op(basis[j]);
    auto coords = basis.coordinates(img);
    for (std::size_t i = 0; i < d; ++i) m(i, j) = coords[i];
  }
  return LinearMap<S>{std::move(m)};
}

}  // namespace curvalg
