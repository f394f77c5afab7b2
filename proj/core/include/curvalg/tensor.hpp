#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "curvalg/metric_space.hpp"
#include "curvalg/scalar.hpp"

namespace curvalg {

// Dense rank-k tensor, all indices covariant, row-major flat storage.
// Index raising is always explicit, through the space's inverse Gram matrix.
template <class S>
class Tensor {
 public:
  Tensor() : n_(0), rank_(0) {}
  Tensor(std::size_t n, std::size_t rank)
      : n_(n), rank_(rank), a_(pow_n(n, rank), scalar_traits<S>::zero()) {}

  std::size_t dim() const { return n_; }
  std::size_t rank() const { return rank_; }
  std::size_t size() const { return a_.size(); }

  const std::vector<S>& data() const { return a_; }
  std::vector<S>& data() { return a_; }

  S& operator[](std::size_t flat) { return a_[flat]; }
  const S& operator[](std::size_t flat) const { return a_[flat]; }

  template <class... Ix>
  S& at(Ix... ix) {
    return a_[offset({static_cast<std::size_t>(ix)...})];
  }
  template <class... Ix>
  const S& at(Ix... ix) const {
    return a_[offset({static_cast<std::size_t>(ix)...})];
  }

  std::size_t offset(std::initializer_list<std::size_t> ix) const {
    std::size_t o = 0;
    for (std::size_t i : ix) o = o * n_ + i;
    return o;
  }
  std::size_t offset(const std::vector<std::size_t>& ix) const {
    std::size_t o = 0;
    for (std::size_t i : ix) o = o * n_ + i;
    return o;
  }

  Tensor& operator+=(const Tensor& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Tensor& operator*=(const S& c) {
    for (auto& x : a_) x *= c;
    return *this;
  }
  Tensor operator+(const Tensor& o) const {
    Tensor r = *this;
    r += o;
    return r;
  }
  Tensor operator-(const Tensor& o) const {
    Tensor r = *this;
    r -= o;
    return r;
  }
  Tensor operator*(const S& c) const {
    Tensor r = *this;
    r *= c;
    return r;
  }
  Tensor operator-() const { return *this * (-scalar_traits<S>::one()); }

  bool operator==(const Tensor& o) const {
    return n_ == o.n_ && rank_ == o.rank_ && a_ == o.a_;
  }

  S max_abs() const {
    S m = scalar_traits<S>::zero();
    for (const S& x : a_) {
      S v = scalar_traits<S>::abs(x);
      if (v > m) m = v;
    }
    return m;
  }

  static std::size_t pow_n(std::size_t n, std::size_t k) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < k; ++i) r *= n;
    return r;
  }

 private:
  std::size_t n_, rank_;
  std::vector<S> a_;
};

template <class S>
Tensor<S> operator*(const S& c, const Tensor<S>& t) {
  return t * c;
}

namespace detail {

// Runs f over all multi-indices of the given rank.
template <class F>
void for_each_index(std::size_t n, std::size_t rank, F&& f) {
  std::vector<std::size_t> ix(rank, 0);
  while (true) {
    f(ix);
    std::size_t pos = rank;
    while (pos > 0) {
      --pos;
      if (++ix[pos] < n) break;
      ix[pos] = 0;
      if (pos == 0) return;
    }
    if (rank == 0) return;
  }
}

inline void permutations(std::size_t k, std::vector<std::pair<std::vector<std::size_t>, int>>& out) {
  std::vector<std::size_t> p(k);
  for (std::size_t i = 0; i < k; ++i) p[i] = i;
  // Heap's algorithm with sign tracking via inversion count per emitted perm.
  std::vector<std::size_t> c(k, 0);
  auto sign_of = [](const std::vector<std::size_t>& q) {
    int s = 1;
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = i + 1; j < q.size(); ++j)
        if (q[i] > q[j]) s = -s;
    return s;
  };
  out.push_back({p, sign_of(p)});
  std::size_t i = 0;
  while (i < k) {
    if (c[i] < i) {
      if (i % 2 == 0)
        std::swap(p[0], p[i]);
      else
        std::swap(p[c[i]], p[i]);
      out.push_back({p, sign_of(p)});
      ++c[i];
      i = 0;
    } else {
      c[i] = 0;
      ++i;
    }
  }
}

}  // namespace detail

// Tensor product A (x) B, indices of A first.
template <class S>
Tensor<S> outer(const Tensor<S>& a, const Tensor<S>& b) {
  Tensor<S> r(a.dim(), a.rank() + b.rank());
  const std::size_t bs = b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == scalar_traits<S>::zero()) continue;
    const S& av = a[i];
    for (std::size_t j = 0; j < bs; ++j) r[i * bs + j] = av * b[j];
  }
  return r;
}

// Generic transpose: out_{i_0..} = in_{i_{perm[0]}, i_{perm[1]}, ...}.
template <class S>
Tensor<S> permuted(const Tensor<S>& t, const std::vector<std::size_t>& perm) {
  Tensor<S> r(t.dim(), t.rank());
  std::vector<std::size_t> src(t.rank());
  detail::for_each_index(t.dim(), t.rank(), [&](const std::vector<std::size_t>& ix) {
    for (std::size_t s = 0; s < perm.size(); ++s) src[s] = ix[perm[s]];
    r[r.offset(ix)] = t[t.offset(src)];
  });
  return r;
}

// Contraction of covariant slots i < j against h^{-1}; rank drops by two.
template <class S>
Tensor<S> contract(const MetricSpace<S>& sp, const Tensor<S>& t, std::size_t i, std::size_t j) {
  if (i >= j || j >= t.rank()) throw std::out_of_range("contract: need 0 <= i < j < rank");
  const std::size_t n = sp.dim();
  Tensor<S> r(n, t.rank() - 2);
  std::vector<std::size_t> full(t.rank());
  detail::for_each_index(n, t.rank() - 2, [&](const std::vector<std::size_t>& ix) {
    std::size_t pos = 0;
    for (std::size_t s = 0; s < t.rank(); ++s)
      if (s != i && s != j) full[s] = ix[pos++];
    S acc = scalar_traits<S>::zero();
    for (std::size_t p = 0; p < n; ++p) {
      full[i] = p;
      if (sp.is_euclidean()) {
        full[j] = p;
        acc += t[t.offset(full)];
      } else {
        for (std::size_t q = 0; q < n; ++q) {
          full[j] = q;
          acc += sp.h_inv()(p, q) * t[t.offset(full)];
        }
      }
    }
    r[r.offset(ix)] = acc;
  });
  return r;
}

// Raises every index: T^{i_1...i_k} as a flat array in the same layout.
template <class S>
Tensor<S> raise_all(const MetricSpace<S>& sp, const Tensor<S>& t) {
  if (sp.is_euclidean()) return t;
  const std::size_t n = sp.dim();
  Tensor<S> cur = t;
  for (std::size_t slot = 0; slot < t.rank(); ++slot) {
    Tensor<S> next(n, t.rank());
    std::vector<std::size_t> src;
    detail::for_each_index(n, t.rank(), [&](const std::vector<std::size_t>& ix) {
      S acc = scalar_traits<S>::zero();
      src = ix;
      for (std::size_t p = 0; p < n; ++p) {
        src[slot] = p;
        acc += sp.h_inv()(ix[slot], p) * cur[cur.offset(src)];
      }
      next[next.offset(ix)] = acc;
    });
    cur = std::move(next);
  }
  return cur;
}

// Complete contraction <A, B> through the metric; symmetric bilinear and
// positive definite in Riemannian signature.
template <class S>
S inner(const MetricSpace<S>& sp, const Tensor<S>& a, const Tensor<S>& b) {
  if (a.rank() != b.rank()) throw std::invalid_argument("inner: rank mismatch");
  const Tensor<S> braised = raise_all(sp, b);
  S acc = scalar_traits<S>::zero();
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * braised[i];
  return acc;
}

// Dot against an already-raised tensor; the hot path for Gram matrices.
template <class S>
S dot_raised(const Tensor<S>& a, const Tensor<S>& b_raised) {
  S acc = scalar_traits<S>::zero();
  const auto& x = a.data();
  const auto& y = b_raised.data();
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

template <class S>
S norm_squared(const MetricSpace<S>& sp, const Tensor<S>& a) {
  return inner(sp, a, a);
}

namespace detail {

template <class S>
Tensor<S> symmetrize_impl(const Tensor<S>& t, const std::vector<std::size_t>& slots, bool anti) {
  for (std::size_t a = 0; a < slots.size(); ++a)
    for (std::size_t b = a + 1; b < slots.size(); ++b)
      if (slots[a] == slots[b]) throw std::invalid_argument("duplicate slots");
  for (std::size_t s : slots)
    if (s >= t.rank()) throw std::out_of_range("slot out of range");
  std::vector<std::pair<std::vector<std::size_t>, int>> perms;
  permutations(slots.size(), perms);
  Tensor<S> r(t.dim(), t.rank());
  std::vector<std::size_t> src(t.rank());
  const S inv_fact = scalar_traits<S>::one() / scalar_traits<S>::from_int(static_cast<long>(perms.size()));
  for_each_index(t.dim(), t.rank(), [&](const std::vector<std::size_t>& ix) {
    S acc = scalar_traits<S>::zero();
    for (const auto& [p, sign] : perms) {
      src = ix;
      for (std::size_t s = 0; s < slots.size(); ++s) src[slots[s]] = ix[slots[p[s]]];
      if (anti && sign < 0)
        acc -= t[t.offset(src)];
      else
        acc += t[t.offset(src)];
    }
    r[r.offset(ix)] = acc * inv_fact;
  });
  return r;
}

}  // namespace detail

// Complete symmetrization over the given slots, with the 1/p! normalization.
template <class S>
Tensor<S> symmetrize(const Tensor<S>& t, const std::vector<std::size_t>& slots) {
  return detail::symmetrize_impl(t, slots, false);
}

// Complete antisymmetrization over the given slots, with the 1/p! normalization.
template <class S>
Tensor<S> antisymmetrize(const Tensor<S>& t, const std::vector<std::size_t>& slots) {
  return detail::symmetrize_impl(t, slots, true);
}

template <class S>
Tensor<S> random_tensor(const MetricSpace<S>& sp, std::size_t rank, Prng& rng) {
  Tensor<S> t(sp.dim(), rank);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.template next_scalar<S>();
  return t;
}

}  // namespace curvalg
