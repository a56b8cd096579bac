#include "twistlab/ntheory.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

namespace twistlab::nt {

namespace {

constexpr u32 SIEVE_LIMIT = 1000000;

std::vector<u32> sieve_primes(u32 limit) {
  std::vector<bool> composite(limit + 1, false);
  std::vector<u32> out;
  for (u32 i = 2; i <= limit; ++i) {
    if (!composite[i]) {
      out.push_back(i);
      for (u64 j = u64(i) * i; j <= limit; j += i) composite[j] = true;
    }
  }
  return out;
}

u64 mulmod(u64 a, u64 b, u64 m) { return u64(u128(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1;
  a %= m;
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool miller_rabin(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 0; i < s - 1; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

u64 isqrt_u64(u64 n) {
  u64 r = u64(std::sqrt(double(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Brent's cycle variant of Pollard rho. Deterministic: the increment c walks
// a fixed schedule 1, 2, 3, ... until a factor shows up, which for the only
// reachable inputs here (odd semiprimes pq with p, q > 1e6 and no small
// part) terminates quickly.
u64 brent_rho(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 x = 2, y = 2, d = 1;
    u64 power = 1, lam = 1;
    auto step = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    while (d == 1) {
      if (power == lam) {
        x = y;
        power *= 2;
        lam = 0;
      }
      y = step(y);
      ++lam;
      u64 diff = x > y ? x - y : y - x;
      if (diff == 0) break; // cycle without factor, bump c
      d = std::gcd(diff, n);
    }
    if (d != 1 && d != n) return d;
  }
}

} // namespace

const std::vector<u32>& small_primes() {
  static const std::vector<u32> primes = sieve_primes(SIEVE_LIMIT);
  return primes;
}

bool is_prime(u64 n) {
  if (n <= SIEVE_LIMIT) {
    const auto& ps = small_primes();
    return std::binary_search(ps.begin(), ps.end(), u32(n));
  }
  return miller_rabin(n);
}

u64 Factorization::value() const {
  u64 v = 1;
  for (const auto& [p, e] : factors)
    for (int i = 0; i < e; ++i) v *= p;
  return v;
}

bool Factorization::has_prime(u64 p) const {
  for (const auto& f : factors)
    if (f.p == p) return true;
  return false;
}

Factorization factorize(u64 n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive");
  if (n > (u64(1) << 63))
    throw std::invalid_argument("factorize: n exceeds 2^63");

  Factorization out;
  u64 r = n;
  for (u32 p : small_primes()) {
    if (u64(p) * p > r) break;
    if (r % p == 0) {
      int e = 0;
      while (r % p == 0) {
        r /= p;
        ++e;
      }
      out.factors.push_back({p, e});
    }
  }

  auto push_sorted = [&out](u64 p, int e) {
    out.factors.push_back({p, e});
  };

  if (r > 1) {
    if (r <= u64(SIEVE_LIMIT) * SIEVE_LIMIT && is_prime(r)) {
      // below 1e12 the trial division already reached sqrt(r), so r is prime
      push_sorted(r, 1);
    } else if (miller_rabin(r)) {
      push_sorted(r, 1);
    } else {
      u64 s = isqrt_u64(r);
      if (s * s == r && miller_rabin(s)) {
        push_sorted(s, 2);
      } else {
        u64 d = brent_rho(r);
        u64 q = r / d;
        if (!miller_rabin(d) || !miller_rabin(q))
          throw std::runtime_error(
              "factorize: cofactor " + std::to_string(r) +
              " did not split into two primes; input out of supported shape");
        if (d > q) std::swap(d, q);
        if (d == q)
          push_sorted(d, 2);
        else {
          push_sorted(d, 1);
          push_sorted(q, 1);
        }
      }
    }
  }

  std::sort(out.factors.begin(), out.factors.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.p < b.p; });
  return out;
}

u64 divisor_count(u64 n) {
  u64 d = 1;
  for (const auto& [p, e] : factorize(n).factors) d *= u64(e) + 1;
  return d;
}

u64 euler_phi(u64 n) {
  u64 phi = n;
  for (const auto& [p, e] : factorize(n).factors) {
    phi -= phi / p;
    (void)e;
  }
  return phi;
}

std::vector<u64> primes_in_window(double lo, double hi, u64 coprime_to) {
  if (!(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("primes_in_window: need 0 < lo < hi");
  if (coprime_to == 0)
    throw std::invalid_argument("primes_in_window: coprime_to must be positive");
  if (hi >= 9.2e18)
    throw std::invalid_argument("primes_in_window: hi too large for 64-bit scan");

  std::vector<u64> out;
  u64 start = u64(std::floor(lo)) + 1; // smallest integer strictly above lo
  if (double(start) <= lo) ++start;    // lo was integral
  if (start < 2) start = 2;
  for (u64 p = start; double(p) <= hi; ++p) {
    if (!is_prime(p)) continue;
    if (std::gcd(p, coprime_to) != 1) continue;
    out.push_back(p);
  }
  return out;
}

} // namespace twistlab::nt
