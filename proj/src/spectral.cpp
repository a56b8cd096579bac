#include "twistlab/spectral.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "twistlab/ntheory.hpp"
#include "twistlab/special.hpp"
#include "twistlab/summation.hpp"

namespace twistlab::spectral {

namespace {

// distance from a to the nearest nonpositive integer (the Gamma pole set)
double pole_distance(cplx a) {
  const double n0 = std::min(0.0, std::round(a.real()));
  return std::abs(a - cplx(n0, 0.0));
}

double factorial(unsigned n) {
  double f = 1.0;
  for (unsigned i = 2; i <= n; ++i) f *= double(i);
  return f;
}

cplx cpow(double base, cplx e) { return std::exp(e * std::log(base)); }

u64 modpow(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

long long checked_ipow(u64 p, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > (long long)(4e18) / (long long)p)
      throw std::overflow_error("kappa_exact: prime power exceeds 64 bits");
    r *= (long long)p;
  }
  return r;
}

// p^e as an exact rational, e of either sign
Rational pow_rat(u64 p, int e) {
  if (e >= 0) return Rational(checked_ipow(p, e), 1);
  return Rational(1, checked_ipow(p, -e));
}

void validate_kappa_shape(u64 N, u64 w, u64 Q, const char* who) {
  if (N == 0 || w == 0 || Q == 0)
    throw std::invalid_argument(std::string(who) + ": N, w, Q must be positive");
  for (const auto& pp : nt::factorize(N).factors)
    if (pp.e > 1)
      throw std::invalid_argument(std::string(who) + ": level N must be square-free");
  if (N % w != 0)
    throw std::invalid_argument(std::string(who) + ": cusp denominator w must divide N");
  if (std::gcd(Q, N) != 1)
    throw std::invalid_argument(std::string(who) + ": Q must be coprime to N");
}

} // namespace

// ---------------------------------------------------------------------------
// shifted convolution series

cplx z_q_direct(ShiftedConvolutionPoint& pt, const forms::HeckeEigenform& f,
                int threads) {
  if (!nt::is_prime(pt.l1) || !nt::is_prime(pt.l2))
    throw std::invalid_argument("z_q_direct: l1 and l2 must be prime");
  if (pt.Q == 0 || pt.m_max == 0 || pt.h_max == 0)
    throw std::invalid_argument("z_q_direct: Q and the truncation must be positive");
  const double sig_s = pt.s.real();
  const double sig_w = pt.w.real();
  if (!(sig_s >= 2.5) || !(sig_w >= 2.5))
    throw std::invalid_argument(
        "z_q_direct: certified tail needs Re s >= 2.5 and Re w >= 2.5");

  const double k2 = (double(f.weight) - 1.0) / 2.0;
  const u64 l1 = pt.l1, l2 = pt.l2, Q = pt.Q;
  // m2 must hit a fixed residue class mod l1 (empty class handled below)
  const u64 l2_inv = (l1 == l2) ? 0 : modpow(l2 % l1, l1 - 2, l1);

  std::atomic<u64> terms{0};
  auto block = [&](std::size_t lo, std::size_t hi) -> cplx {
    NeumaierCplx acc;
    u64 local_terms = 0;
    for (u64 h0 = lo + 1; h0 <= hi; ++h0) {
      const u64 hQ = h0 * Q;
      u64 m2_start, m2_step;
      if (l1 == l2) {
        if (hQ % l1 != 0) continue; // same-prime case thins the h-sum
        m2_start = 1;
        m2_step = 1;
      } else {
        const u64 r0 = (l1 - hQ % l1) % l1 * l2_inv % l1;
        m2_start = (r0 == 0) ? l1 : r0;
        m2_step = l1;
      }
      const double lhQ = std::log(double(hQ));
      for (u64 m2 = m2_start; m2 <= pt.m_max; m2 += m2_step) {
        const u64 m1 = (m2 * l2 + hQ) / l1;
        const double n2 = double(m2) * double(l2);
        const cplx expo = k2 * std::log1p(double(hQ) / n2) -
                          pt.s * std::log(n2) - (pt.w + k2) * lhQ;
        acc.add(forms::coefficient(f, m1) * forms::coefficient(f, m2) *
                std::exp(expo));
        ++local_terms;
      }
    }
    terms.fetch_add(local_terms, std::memory_order_relaxed);
    return acc.value();
  };
  pt.value = parallel_reduce_blocks(pt.h_max, 32,
                                    unsigned(threads < 1 ? 1 : threads), block);
  pt.note.clear();
  if (terms.load() == 0) {
    pt.value = cplx(0.0, 0.0);
    pt.note = "no admissible (m2, h0) pair: l1 never divides m2 l2 + h0 Q "
              "inside the truncation box";
  }

  // certified tail: |A(m1) A(m2)| <= 4 sqrt(m1 m2),
  // sqrt(m1) <= l1^{-1/2} (sqrt(m2 l2) + sqrt(h0 Q)), and
  // (1+u)^{k2} <= 2^{k2} (1 + u^{k2}) split the dropped mass into four
  // separable m2/h0 products, each bounded by integral comparison.
  const auto tail_from = [](double a, double cut) {
    return std::pow(cut, a + 1.0) / (-a - 1.0);
  };
  const auto full_sum = [](double a) { return 1.0 + 1.0 / (-a - 1.0); };
  const double K = 4.0 * std::pow(2.0, k2) / std::sqrt(double(l1));
  const double piece_a[4] = {1.0 - sig_s, 0.5 - sig_s, 1.0 - sig_s - k2,
                             0.5 - sig_s - k2};
  const double piece_la[4] = {0.5 - sig_s, -sig_s, 0.5 - sig_s - k2,
                              -sig_s - k2};
  const double piece_b[4] = {-sig_w - k2, 0.5 - sig_w - k2, -sig_w,
                             0.5 - sig_w};
  double tail = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double coef =
        std::pow(double(l2), piece_la[i]) * std::pow(double(Q), piece_b[i]);
    tail += coef * (tail_from(piece_a[i], double(pt.m_max)) * full_sum(piece_b[i]) +
                    full_sum(piece_a[i]) * tail_from(piece_b[i], double(pt.h_max)));
  }
  pt.tail_bound = K * tail;
  return pt.value;
}

// ---------------------------------------------------------------------------
// closed form of the M limit and its residues

cplx m_closed_form(cplx s, cplx z) {
  struct Fac {
    cplx arg;
    const char* name;
  };
  const Fac facs[] = {
      {s - 0.5 + z, "Gamma(s - 1/2 + z)"},
      {s - 0.5 - z, "Gamma(s - 1/2 - z)"},
      {1.0 - s, "Gamma(1 - s)"},
      {0.5 + z, "Gamma(1/2 + z)"},
      {0.5 - z, "Gamma(1/2 - z)"},
  };
  for (const auto& fc : facs)
    if (pole_distance(fc.arg) < 1e-6)
      throw std::invalid_argument(std::string("m_closed_form: ") + fc.name +
                                  " within 1e-6 of a pole");
  return std::sqrt(PI) * cpow(2.0, 0.5 - s) *
         special::complex_gamma(s - 0.5 + z) *
         special::complex_gamma(s - 0.5 - z) *
         special::complex_gamma(1.0 - s) /
         (special::complex_gamma(0.5 + z) * special::complex_gamma(0.5 - z));
}

cplx c_r_residue(unsigned r, cplx z, int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("c_r_residue: sign must be +1 or -1");
  const cplx xi = (sign == 1) ? z : -z; // the table argument of c_r(.)

  // exact special points first: the generic quotient is 0/0 there
  if (std::abs(xi - cplx(0.5, 0.0)) < 1e-12) {
    if (r == 0) return std::sqrt(PI / 2.0);
    return std::pow(2.0, double(r) - 0.5) * std::sqrt(PI) /
           (2.0 * factorial(r));
  }
  if (std::abs(xi + cplx(0.5, 0.0)) < 1e-12)
    return -std::pow(2.0, double(r) + 0.5) * std::sqrt(PI) /
           (2.0 * factorial(r + 1));

  const cplx num1 = 2.0 * xi - double(r);       // Gamma(+-2z - r)
  const cplx num2 = 0.5 - xi + double(r);       // Gamma(1/2 -+ z + r)
  if (pole_distance(num1) < 1e-6)
    throw std::invalid_argument(
        "c_r_residue: Gamma(+-2z - r) within 1e-6 of a pole with no "
        "special-value coverage");
  if (pole_distance(num2) < 1e-6)
    throw std::invalid_argument(
        "c_r_residue: Gamma(1/2 -+ z + r) within 1e-6 of a pole with no "
        "special-value coverage");
  // a denominator Gamma exactly at a pole kills the quotient
  if (pole_distance(0.5 + xi) < 1e-12 || pole_distance(0.5 - xi) < 1e-12)
    return cplx(0.0, 0.0);

  const double sgn_r = (r % 2 == 0) ? 1.0 : -1.0;
  return sgn_r * std::sqrt(PI) * std::exp((double(r) - xi) * std::log(2.0)) *
         special::complex_gamma(num1) * special::complex_gamma(num2) /
         (factorial(r) * special::complex_gamma(0.5 + xi) *
          special::complex_gamma(0.5 - xi));
}

// ---------------------------------------------------------------------------
// exact rationals

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) den = 1;
}

Rational operator*(const Rational& a, const Rational& b) {
  // cross-reduce before multiplying so intermediates stay small
  const long long g1 = std::gcd(a.num < 0 ? -a.num : a.num, b.den);
  const long long g2 = std::gcd(b.num < 0 ? -b.num : b.num, a.den);
  return Rational((a.num / g1) * (b.num / g2), (a.den / g2) * (b.den / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num == 0) throw std::invalid_argument("Rational: division by zero");
  return a * Rational(b.den, b.num);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
}

// ---------------------------------------------------------------------------
// kappa Euler products

cplx kappa(const KappaParams& p) {
  validate_kappa_shape(p.N, p.w, p.Q, "kappa");
  const cplx s = p.s_prime, z = p.z;
  cplx out = cpow(double(p.Q), -(s + z)) *
             cpow(double(p.w) * double(p.N), -(0.5 - z));
  for (const auto& pp : nt::factorize(p.N).factors) {
    const double pd = double(pp.p);
    const cplx den = 1.0 - cpow(pd, -(1.0 - 2.0 * z));
    if (std::abs(den) < 1e-9)
      throw std::invalid_argument(
          "kappa: (1 - p^{-(1-2z)}) factor within 1e-9 of zero at p = " +
          std::to_string(pp.p));
    out /= den;
    if ((p.N / p.w) % pp.p == 0)
      out *= 1.0 - cpow(pd, -(s - z));
    else
      out *= -1.0 + cpow(pd, 1.0 - (s + z));
  }
  for (const auto& pp : nt::factorize(p.Q).factors) {
    const double pd = double(pp.p);
    const cplx den = 1.0 - cpow(pd, 2.0 * z);
    if (std::abs(den) < 1e-9)
      throw std::invalid_argument(
          "kappa: (1 - p^{2z}) factor within 1e-9 of zero at p = " +
          std::to_string(pp.p));
    out *= ((1.0 - cpow(pd, -(s - z))) -
            cpow(pd, 2.0 * double(pp.e + 1) * z) * (1.0 - cpow(pd, -(s + z)))) /
           den;
  }
  return out;
}

Rational kappa_exact(u64 N, u64 w, u64 Q, int two_s_prime, int two_z) {
  validate_kappa_shape(N, w, Q, "kappa_exact");
  if (two_s_prime % 2 == 0 || two_z % 2 == 0)
    throw std::invalid_argument(
        "kappa_exact: s' and z must be half-odd-integers (pass 2s', 2z)");
  const int e1 = 1 - two_z;                  // exponent of (1 - p^{-e1})
  const int e2 = (two_s_prime - two_z) / 2;  // s' - z
  const int e3 = (two_s_prime + two_z) / 2;  // s' + z
  const int ewn = (1 - two_z) / 2;           // 1/2 - z

  const bool singular_wall = (e1 == 0); // z = 1/2
  if (singular_wall && two_s_prime != 1)
    throw std::invalid_argument(
        "kappa_exact: (1 - p^{-(1-2z)}) is singular at z = 1/2; only the "
        "s' = 1 - z line is continued through it");
  if (singular_wall && w > 1)
    return Rational(0); // each p | w factor vanishes identically on the line

  Rational out = pow_rat(Q, -e3) * pow_rat(w * N, -ewn);
  if (!singular_wall) {
    for (const auto& pp : nt::factorize(N).factors) {
      out = out / (Rational(1) - pow_rat(pp.p, -e1));
      if ((N / w) % pp.p == 0)
        out = out * (Rational(1) - pow_rat(pp.p, -e2));
      else
        out = out * (Rational(-1) + pow_rat(pp.p, 1 - e3));
    }
  }
  // on the wall with w = 1 every p | N pair (1-p^{-e1})^{-1} (1-p^{-e2})
  // cancels exactly (e2 = e1 there), so the N-part is 1 and only the
  // Q-part below remains
  for (const auto& pp : nt::factorize(Q).factors) {
    const Rational bracket =
        (Rational(1) - pow_rat(pp.p, -e2)) -
        pow_rat(pp.p, (pp.e + 1) * two_z) * (Rational(1) - pow_rat(pp.p, -e3));
    out = out * (bracket / (Rational(1) - pow_rat(pp.p, two_z)));
  }
  return out;
}

double kappa_bound_probe(u64 N, u64 w, u64 Q,
                         const std::vector<double>& z_imag_grid) {
  if (z_imag_grid.empty())
    throw std::invalid_argument("kappa_bound_probe: empty z grid");
  double sup = 0.0;
  for (double y : z_imag_grid) {
    if (std::abs(y) < 1e-3)
      throw std::invalid_argument(
          "kappa_bound_probe: grid must stay 1e-3 away from z = 0");
    KappaParams p;
    p.N = N;
    p.w = w;
    p.Q = Q;
    p.s_prime = cplx(0.5, 0.0);
    p.z = cplx(0.0, y);
    sup = std::max(sup, std::abs(kappa(p)));
  }
  return sup * std::sqrt(double(Q));
}

} // namespace twistlab::spectral
