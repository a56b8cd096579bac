#pragma once

#include <vector>

#include "twistlab/defs.hpp"

namespace twistlab::nt {

struct PrimePower {
  u64 p;
  int e;
};

// sorted by p; the empty list is the factorization of 1
struct Factorization {
  std::vector<PrimePower> factors;

  u64 value() const;
  bool has_prime(u64 p) const;
};

// Accepts 1 <= n <= 2^63. Trial division by the sieved primes below 1e6
// covers everything this lab actually touches; the (prime / prime^2 /
// semiprime) cofactor cases left over for general 64-bit input are settled
// by deterministic Miller-Rabin, integer sqrt, and Brent's rho with a fixed
// parameter schedule, in that order.
Factorization factorize(u64 n);

u64 divisor_count(u64 n);
u64 euler_phi(u64 n);

// Deterministic Miller-Rabin with the fixed base set {2,3,...,37}, which is
// known to be exact for every n < 2^64.
bool is_prime(u64 n);

// Primes p with lo < p <= hi and gcd(p, coprime_to) = 1, ascending. The
// endpoints are real numbers on purpose: amplifier windows like
// (Q^{1/4}, 2 Q^{1/4}] land on non-integers.
std::vector<u64> primes_in_window(double lo, double hi, u64 coprime_to);

// primes below 1e6, sieved once per process
const std::vector<u32>& small_primes();

} // namespace twistlab::nt
