#pragma once

#include <string>
#include <vector>

#include "twistlab/defs.hpp"
#include "twistlab/forms.hpp"

namespace twistlab::spectral {

// One evaluation point of the truncated shifted-convolution double series.
// s and w must sit in the certified-tail region Re s >= 2.5, Re w >= 2.5;
// outside it the d(n)-envelope sums behind tail_bound stop converging.
struct ShiftedConvolutionPoint {
  cplx s;
  cplx w;
  u64 l1 = 2;
  u64 l2 = 3;
  u64 Q = 5;
  u64 m_max = 1000;
  u64 h_max = 1000;
  cplx value;              // filled by z_q_direct
  double tail_bound = 0.0; // envelope on everything beyond (m_max, h_max)
  std::string note;        // set when the divisibility constraint empties the range
};

// Sum over m2 <= m_max, h0 <= h_max with l1 | (m2 l2 + h0 Q) of
//   A(m1) A(m2) (1 + h0 Q / (l2 m2))^{(k-1)/2}
//     / ((l2 m2)^s (h0 Q)^{w + (k-1)/2}),    m1 = (m2 l2 + h0 Q) / l1.
// The caller's coefficient table must cover m1 up to
// (m_max l2 + h_max Q) / l1. tail_bound comes from d(n) <= 2 sqrt(n) plus
// the separable splits (1+u)^p <= 2^p (1 + u^p) and
// sqrt(m1) <= l1^{-1/2} (sqrt(m2 l2) + sqrt(h0 Q)), so it is crude but
// certified, and it shrinks monotonically as (m_max, h_max) grow.
// Parallelizes over h0 blocks with a deterministic reduction.
cplx z_q_direct(ShiftedConvolutionPoint& pt, const forms::HeckeEigenform& f,
                int threads = 1);

// sqrt(pi) 2^{1/2-s} Gamma(s-1/2+z) Gamma(s-1/2-z) Gamma(1-s)
//   / (Gamma(1/2+z) Gamma(1/2-z)), even in z. Arguments closer than 1e-6
// to a pole of any of the five Gamma factors throw, naming the factor.
cplx m_closed_form(cplx s, cplx z);

// Residue of m_closed_form at s = 1/2 +- z - r (sign = +1 picks the
// s = 1/2 + z - r chain):
//   (-1)^r sqrt(pi) 2^{-+z+r} Gamma(+-2z-r) Gamma(1/2-+z+r)
//     / (r! Gamma(1/2+z) Gamma(1/2-z)).
// At z = +-1/2 (sign-adjusted) the generic quotient is 0/0; those points
// return the closed special values
//   c_r(-1/2) = -2^{r+1/2} sqrt(pi) / (2 (r+1)!),
//   c_0(+1/2) = sqrt(pi/2),   c_r(+1/2) = 2^{r-1/2} sqrt(pi) / (2 r!).
// Any other pole of the quotient throws.
cplx c_r_residue(unsigned r, cplx z, int sign);

// Exact rational scalar, just big enough for the kappa special values.
struct Rational {
  long long num = 0;
  long long den = 1; // always > 0 after normalize()

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}
  Rational(long long n, long long d);

  double to_double() const { return double(num) / double(den); }
  bool operator==(const Rational& o) const {
    return num == o.num && den == o.den;
  }
};

Rational operator+(const Rational& a, const Rational& b);
Rational operator-(const Rational& a, const Rational& b);
Rational operator*(const Rational& a, const Rational& b);
Rational operator/(const Rational& a, const Rational& b);

// Eisenstein-coefficient Euler product attached to the cusp 1/w of level N,
// twisted to modulus Q. The value is the displayed product for
// kappa_{a,Q}(s', -z); z enters with the sign conventions of that display.
struct KappaParams {
  u64 N = 1; // square-free level
  u64 w = 1; // cusp denominator, w | N (w = 1 is the cusp 0)
  u64 Q = 1; // gcd(Q, N) = 1
  cplx s_prime;
  cplx z;
};

// Q^{-(s'+z)} (1/(wN))^{1/2-z}
//   prod_{p|N} (1 - p^{-(1-2z)})^{-1}
//   prod_{p|N/w} (1 - p^{-(s'-z)})
//   prod_{p|w} (-1 + p^{1-(s'+z)})
//   prod_{p^gamma || Q} (1 - p^{2z})^{-1}
//                       ((1 - p^{-(s'-z)}) - p^{2(gamma+1)z} (1 - p^{-(s'+z)}))
// Factors within 1e-9 of zero in a denominator position throw, naming the
// factor and the prime.
cplx kappa(const KappaParams& p);

// Same product in exact arithmetic for half-odd-integer s' and z (passed
// doubled: two_s_prime = 2s', two_z = 2z). The z = 1/2 wall, where
// (1 - p^{-(1-2z)})^{-1} blows up, is continued along the line s' = 1 - z:
// there each p | N/w factor cancels the singular factor exactly and each
// p | w factor is identically zero, so w = 1 survives with a finite value
// and every w > 1 gives exactly 0.
Rational kappa_exact(u64 N, u64 w, u64 Q, int two_s_prime, int two_z);

// max over the imaginary-z grid of |kappa(1/2, -z)| * sqrt(Q), the
// empirical size against the Q^{-1/2+eps} decay claim. Exploratory: the
// trend across Q is logged by callers, not asserted. Grid points need
// |Im z| >= 1e-3.
double kappa_bound_probe(u64 N, u64 w, u64 Q,
                         const std::vector<double>& z_imag_grid);

} // namespace twistlab::spectral
