#include <doctest.h>

#include <numeric>
#include <random>

#include "twistlab/ntheory.hpp"

using namespace twistlab;
using namespace twistlab::nt;

namespace {

// oracle: naive trial division, no sieve, no cleverness
std::vector<std::pair<u64, int>> naive_factor(u64 n) {
  std::vector<std::pair<u64, int>> out;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.emplace_back(p, e);
    }
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

bool naive_is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

u64 naive_phi(u64 n) {
  u64 c = 0;
  for (u64 a = 1; a <= n; ++a)
    if (std::gcd(a, n) == 1) ++c;
  return c;
}

} // namespace

TEST_CASE("factorize matches the documented examples") {
  CHECK(factorize(1).factors.empty());

  auto f12 = factorize(12);
  REQUIRE(f12.factors.size() == 2);
  CHECK(f12.factors[0].p == 2);
  CHECK(f12.factors[0].e == 2);
  CHECK(f12.factors[1].p == 3);
  CHECK(f12.factors[1].e == 1);

  auto f = factorize(9699690); // product of the first eight primes
  REQUIRE(f.factors.size() == 8);
  const u64 first8[] = {2, 3, 5, 7, 11, 13, 17, 19};
  for (size_t i = 0; i < 8; ++i) {
    CHECK(f.factors[i].p == first8[i]);
    CHECK(f.factors[i].e == 1);
  }
}

TEST_CASE("factorize agrees with naive trial division") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<u64> dist(1, 100000);
  for (int i = 0; i < 2000; ++i) {
    u64 n = dist(rng);
    auto got = factorize(n);
    auto want = naive_factor(n);
    REQUIRE(got.factors.size() == want.size());
    for (size_t j = 0; j < want.size(); ++j) {
      CHECK(got.factors[j].p == want[j].first);
      CHECK(got.factors[j].e == want[j].second);
    }
  }
}

TEST_CASE("factorize round-trips and certifies primality of each factor") {
  std::mt19937_64 rng(987654321);
  std::uniform_int_distribution<u64> dist(1, u64(1) << 32);
  for (int i = 0; i < 100000; ++i) {
    u64 n = dist(rng);
    auto f = factorize(n);
    CHECK(f.value() == n);
    for (const auto& [p, e] : f.factors) {
      CHECK(e >= 1);
      CHECK(is_prime(p));
    }
  }
}

TEST_CASE("factorize handles 64-bit cofactor shapes past the sieve") {
  // prime cofactor above the sieve bound
  auto f1 = factorize(u64(1000003) * 7);
  REQUIRE(f1.factors.size() == 2);
  CHECK(f1.factors[1].p == 1000003);

  // square of a prime above the sieve bound
  auto f2 = factorize(u64(1000003) * 1000003);
  REQUIRE(f2.factors.size() == 1);
  CHECK(f2.factors[0].p == 1000003);
  CHECK(f2.factors[0].e == 2);

  // semiprime with both factors above the sieve bound
  auto f3 = factorize(u64(1000003) * 1000033);
  REQUIRE(f3.factors.size() == 2);
  CHECK(f3.factors[0].p == 1000003);
  CHECK(f3.factors[1].p == 1000033);

  // large prime (2^61 - 1 is Mersenne prime)
  auto f4 = factorize((u64(1) << 61) - 1);
  REQUIRE(f4.factors.size() == 1);
  CHECK(f4.factors[0].e == 1);

  CHECK(factorize(u64(1) << 63).factors[0].e == 63);
  CHECK_THROWS_AS(factorize(0), std::invalid_argument);
  CHECK_THROWS_AS(factorize((u64(1) << 63) + 1), std::invalid_argument);
}

TEST_CASE("is_prime agrees with naive scan near the sieve boundary") {
  for (u64 n = 999980; n <= 1000020; ++n) CHECK(is_prime(n) == naive_is_prime(n));
  for (u64 n = 0; n < 300; ++n) CHECK(is_prime(n) == naive_is_prime(n));
}

TEST_CASE("divisor_count examples") {
  CHECK(divisor_count(1) == 1);
  CHECK(divisor_count(12) == 6);
  CHECK(divisor_count(u64(1) << 10) == 11);
}

TEST_CASE("euler_phi examples and brute force") {
  CHECK(euler_phi(1) == 1);
  CHECK(euler_phi(5) == 4);
  CHECK(euler_phi(60) == 16);
  for (u64 n = 1; n <= 500; ++n) CHECK(euler_phi(n) == naive_phi(n));
}

TEST_CASE("euler_phi is multiplicative on coprime pairs") {
  std::mt19937_64 rng(424242);
  std::uniform_int_distribution<u64> dist(1, 1000000);
  int done = 0;
  while (done < 300) {
    u64 a = dist(rng), b = dist(rng);
    if (std::gcd(a, b) != 1) continue;
    CHECK(euler_phi(a) * euler_phi(b) == euler_phi(a * b));
    ++done;
  }
}

TEST_CASE("sum of euler_phi over divisors recovers n") {
  for (u64 n = 1; n <= 10000; ++n) {
    u64 s = 0;
    for (u64 d = 1; d * d <= n; ++d) {
      if (n % d) continue;
      s += euler_phi(d);
      if (d != n / d) s += euler_phi(n / d);
    }
    CHECK(s == n);
  }
}

TEST_CASE("primes_in_window documented examples") {
  CHECK(primes_in_window(2, 4, 35) == std::vector<u64>{3});
  CHECK(primes_in_window(2, 10, 3) == std::vector<u64>{5, 7});
  CHECK(primes_in_window(10, 30, 1) == std::vector<u64>{11, 13, 17, 19, 23, 29});
}

TEST_CASE("primes_in_window respects open/closed endpoints and coprimality") {
  // left endpoint excluded, right included
  CHECK(primes_in_window(3, 7, 1) == std::vector<u64>{5, 7});
  CHECK(primes_in_window(2.9, 7.1, 1) == std::vector<u64>{3, 5, 7});
  // fractional amplifier-style window
  CHECK(primes_in_window(1.82, 3.64, 55) == std::vector<u64>{2, 3});
  CHECK(primes_in_window(1.82, 3.64, 10) == std::vector<u64>{3});
  CHECK(primes_in_window(1.82, 3.64, 3) == std::vector<u64>{2});
  CHECK(primes_in_window(31, 36, 1).empty());

  CHECK_THROWS_AS(primes_in_window(0, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(primes_in_window(5, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(primes_in_window(1, 10, 0), std::invalid_argument);
}
