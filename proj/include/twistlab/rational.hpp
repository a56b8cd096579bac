#pragma once

#include <stdexcept>
#include <string>

#include "twistlab/defs.hpp"

namespace twistlab {

// Exact fractions on __int128. Just the operations the exact cusp-constant
// evaluations and conductor bookkeeping need; any overflow is a hard error,
// never a silent wrap.

inline i128 gcd_i128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline std::string i128_to_string(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  u128 u = neg ? u128(-(v + 1)) + 1 : u128(v);
  std::string s;
  while (u > 0) {
    s.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

struct Rational {
  i128 num = 0;
  i128 den = 1;

  Rational() = default;
  Rational(i64 n) : num(n), den(1) {}
  Rational(i128 n, i128 d) : num(n), den(d) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    normalize();
  }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    i128 g = gcd_i128(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  static i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r))
      throw std::overflow_error("Rational: 128-bit multiply overflow");
    return r;
  }

  Rational operator+(const Rational& o) const {
    i128 n;
    if (__builtin_add_overflow(checked_mul(num, o.den), checked_mul(o.num, den), &n))
      throw std::overflow_error("Rational: 128-bit add overflow");
    return {n, checked_mul(den, o.den)};
  }
  Rational operator-(const Rational& o) const {
    return *this + Rational{-o.num, o.den};
  }
  Rational operator*(const Rational& o) const {
    // cross-reduce first so products like prod 1/(p+1) over many primes
    // stay far from the 128-bit ceiling
    i128 g1 = gcd_i128(num, o.den);
    i128 g2 = gcd_i128(o.num, den);
    return {checked_mul(num / g1, o.num / g2), checked_mul(den / g2, o.den / g1)};
  }
  Rational operator/(const Rational& o) const {
    if (o.num == 0) throw std::domain_error("Rational: division by zero");
    return *this * Rational{o.den, o.num};
  }
  Rational operator-() const { return {-num, den}; }

  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rational& o) const { return !(*this == o); }

  bool is_zero() const { return num == 0; }

  // integer exponents only; e < 0 inverts
  Rational pow(int e) const {
    if (e < 0) return (Rational{1} / *this).pow(-e);
    Rational r{1};
    Rational b = *this;
    while (e > 0) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  double to_double() const {
    return double(static_cast<long double>(num) / static_cast<long double>(den));
  }

  std::string to_string() const {
    if (den == 1) return i128_to_string(num);
    return i128_to_string(num) + "/" + i128_to_string(den);
  }
};

inline Rational rational_pow_u64(u64 base, int e) {
  return Rational{i128(base), 1}.pow(e);
}

} // namespace twistlab
