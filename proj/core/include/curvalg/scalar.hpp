#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace curvalg {

// Exact scalar: arbitrary-precision rational, never rounds.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses "p/q" or "p"; also accepts a plain decimal integer with sign.
inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(BigInt(s));
  return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

inline std::string to_string(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double from_int(long v) { return static_cast<double>(v); }
  static double from_fraction(long p, long q) {
    return static_cast<double>(p) / static_cast<double>(q);
  }
  static double abs(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
  static constexpr bool has_sqrt = true;
  static double sqrt(double x) { return std::sqrt(x); }
  static std::string str(double x) { return std::to_string(x); }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational from_int(long v) { return Rational(v); }
  static Rational from_fraction(long p, long q) { return Rational(p, q); }
  static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
  static constexpr bool has_sqrt = false;
  // Exact square root; only perfect rational squares are representable.
  static Rational sqrt(const Rational& x) {
    if (x < 0) throw std::domain_error("sqrt of negative rational");
    const BigInt num = boost::multiprecision::numerator(x);
    const BigInt den = boost::multiprecision::denominator(x);
    const BigInt rn = boost::multiprecision::sqrt(num);
    const BigInt rd = boost::multiprecision::sqrt(den);
    if (rn * rn != num || rd * rd != den)
      throw std::domain_error("rational is not a perfect square");
    return Rational(rn, rd);
  }
  static std::string str(const Rational& x) { return to_string(x); }
};

template <class S>
inline double to_double(const S& x) {
  return scalar_traits<S>::to_double(x);
}

}  // namespace curvalg
