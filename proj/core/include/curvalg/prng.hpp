#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvalg/scalar.hpp"

namespace curvalg {

// Deterministic 64-bit generator (splitmix64). Used instead of <random>
// engines/distributions so that streams are identical across platforms.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [-1, 1).
  double next_symmetric() { return 2.0 * next_double() - 1.0; }

  // Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

  long next_int(long lo, long hi) {  // inclusive range
    return lo + static_cast<long>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  template <class S>
  S next_scalar();

 private:
  std::uint64_t state_;
};

template <>
inline double Prng::next_scalar<double>() {
  return next_symmetric();
}

// Small rationals p/q with p in [-12, 12], q in [1, 7]; keeps exact-mode
// intermediates from blowing up.
template <>
inline Rational Prng::next_scalar<Rational>() {
  long p = next_int(-12, 12);
  long q = next_int(1, 7);
  return Rational(p, q);
}

// FNV-1a; std::hash is implementation-defined, this is not.
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// One independent stream per (global seed, check id) pair.
inline std::uint64_t derive_seed(std::uint64_t global_seed, const std::string& id) {
  std::uint64_t h = fnv1a(id);
  h ^= global_seed + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace curvalg
