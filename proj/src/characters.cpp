#include "twistlab/characters.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "twistlab/ntheory.hpp"
#include "twistlab/summation.hpp"

namespace twistlab::chars {

namespace {

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e > 0) {
    if (e & 1) r = u64(u128(r) * a % m);
    a = u64(u128(a) * a % m);
    e >>= 1;
  }
  return r;
}

// smallest primitive root mod an odd prime p
u64 primitive_root_mod_p(u64 p) {
  u64 phi = p - 1;
  auto fac = nt::factorize(phi);
  for (u64 g = 2; g < p; ++g) {
    bool ok = true;
    for (const auto& [q, e] : fac.factors) {
      if (powmod(g, phi / q, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("primitive_root_mod_p: none found (p not prime?)");
}

// generator of (Z/p^k)^* for odd p: the smallest primitive root of p, bumped
// by +p in the rare case g^{p-1} = 1 mod p^2 (then g would have order
// dividing p^{k-2}(p-1) rather than p^{k-1}(p-1))
u64 generator_odd_prime_power(u64 p, int k) {
  u64 g = primitive_root_mod_p(p);
  if (k >= 2 && powmod(g, p - 1, p * p) == 1) g += p;
  return g;
}

Component make_component(u64 pk, u64 generator, u64 order) {
  Component c;
  c.pk = pk;
  c.generator = generator % pk;
  c.order = order;
  c.dlog.assign(pk, 0);
  u64 v = 1 % pk;
  for (u64 j = 0; j < order; ++j) {
    c.dlog[v] = u32(j);
    v = u64(u128(v) * c.generator % pk);
  }
  if (v != 1 % pk)
    throw std::logic_error("character component generator has wrong order");
  return c;
}

// (Z/2^e)^* for e >= 3 is <-1> x <5>, not cyclic, so the two dlog tables have
// to be filled from the joint decomposition n = (-1)^s 5^t
std::pair<Component, Component> make_two_power_components(int e) {
  u64 pk = u64(1) << e;
  u64 half = u64(1) << (e - 2);
  Component cm, c5;
  cm.pk = c5.pk = pk;
  cm.generator = pk - 1;
  cm.order = 2;
  c5.generator = 5;
  c5.order = half;
  cm.dlog.assign(pk, 0);
  c5.dlog.assign(pk, 0);
  u64 v = 1;
  for (u64 t = 0; t < half; ++t) {
    cm.dlog[v] = 0;
    c5.dlog[v] = u32(t);
    u64 neg = pk - v;
    cm.dlog[neg] = 1;
    c5.dlog[neg] = u32(t);
    v = u64(u128(v) * 5 % pk);
  }
  if (v != 1)
    throw std::logic_error("make_two_power_components: 5 has unexpected order");
  return {cm, c5};
}

u64 character_order(const CharacterGroup& g, const std::vector<u32>& a) {
  u64 ord = 1;
  for (size_t i = 0; i < g.components.size(); ++i) {
    u64 m = g.components[i].order;
    u64 d = m / std::gcd<u64>(a[i], m); // order of the i-th coordinate
    ord = std::lcm(ord, d);
  }
  return ord;
}

// conductor, assembled per CRT leg. Odd p^e leg with coordinate order d:
// contributes 1 if d = 1, else p^{v_p(d)+1}. The 2^e legs (exponent a0 on
// <-1>, a1 on <5>): trivial -> 1; a1 = 0, a0 = 1 -> 4; a1 != 0 -> 2^{u+2}
// where 2^u is the order of the <5>-coordinate.
u64 character_conductor(u64 Q, const CharacterGroup& g, const std::vector<u32>& a) {
  u64 cond = 1;
  size_t i = 0;
  auto qfac = nt::factorize(Q);
  for (const auto& [p, e] : qfac.factors) {
    if (p == 2) {
      if (e == 1) continue; // (Z/2)^* trivial, no components
      if (e == 2) {
        // single order-2 component generated by 3
        u64 d = 2 / std::gcd<u64>(a[i], 2);
        if (d > 1) cond *= 4;
        ++i;
        continue;
      }
      // e >= 3: components are <-1> (order 2) then <5> (order 2^{e-2})
      u64 a0 = a[i], m1 = g.components[i + 1].order, a1 = a[i + 1];
      u64 d1 = m1 / std::gcd<u64>(a1, m1);
      if (d1 > 1) {
        u64 f = 4; // 2^{u+2} with d1 = 2^u
        for (u64 t = d1; t > 1; t /= 2) f *= 2;
        cond *= f;
      } else if (a0 % 2 == 1) {
        cond *= 4;
      }
      i += 2;
      continue;
    }
    u64 m = g.components[i].order;
    u64 d = m / std::gcd<u64>(a[i], m);
    if (d > 1) {
      u64 f = p;
      while (d % p == 0) {
        f *= p;
        d /= p;
      }
      cond *= f;
    }
    ++i;
  }
  return cond;
}

} // namespace

CharacterGroup character_group(u64 Q) {
  if (Q == 0) throw std::invalid_argument("character_group: Q must be positive");
  CharacterGroup g;
  g.Q = Q;
  g.phi = (Q == 1) ? 1 : nt::euler_phi(Q);

  auto qfac = nt::factorize(Q);
  for (const auto& [p, e] : qfac.factors) {
    if (p == 2) {
      if (e == 1) continue;
      u64 pk = u64(1) << e;
      if (e == 2) {
        g.components.push_back(make_component(4, 3, 2));
      } else {
        auto [cm, c5] = make_two_power_components(e);
        g.components.push_back(std::move(cm));
        g.components.push_back(std::move(c5));
      }
    } else {
      u64 pk = 1;
      for (int i = 0; i < e; ++i) pk *= p;
      u64 order = pk / p * (p - 1);
      g.components.push_back(make_component(pk, generator_odd_prime_power(p, e), order));
    }
  }

  g.exponent = 1;
  u64 count = 1;
  for (const auto& c : g.components) {
    g.exponent = std::lcm(g.exponent, c.order);
    count *= c.order;
  }
  if (count != g.phi)
    throw std::logic_error("character_group: component orders do not multiply to phi(Q)");

  g.roots.resize(g.exponent);
  for (u64 j = 0; j < g.exponent; ++j) {
    long double ang = 2.0L * 3.14159265358979323846264338327950288L *
                      (long double)(j) / (long double)(g.exponent);
    g.roots[j] = cplx(double(std::cos(ang)), double(std::sin(ang)));
  }

  // enumerate characters in mixed-radix order, least significant component first
  g.characters.resize(g.phi);
  std::vector<u32> a(g.components.size(), 0);
  for (u64 idx = 0; idx < g.phi; ++idx) {
    Character chi;
    chi.exponents = a;
    chi.index = idx;
    chi.order = character_order(g, a);
    chi.principal = (chi.order == 1);
    chi.conductor = character_conductor(Q, g, a);
    g.characters[idx] = std::move(chi);

    for (size_t i = 0; i < a.size(); ++i) {
      if (++a[i] < g.components[i].order) break;
      a[i] = 0;
    }
  }
  return g;
}

cplx evaluate(const CharacterGroup& g, const Character& chi, u64 n) {
  if (std::gcd(n, g.Q) != 1) return {0.0, 0.0};
  if (chi.exponents.size() != g.components.size())
    throw std::invalid_argument("evaluate: character does not belong to this group");

  // phase = sum_i a_i * dlog_i(n) / m_i, reduced mod 1 over the common
  // denominator M = lcm(m_i), so the final value is a single exact root e(j/M)
  u64 M = g.exponent;
  u64 j = 0;
  for (size_t i = 0; i < g.components.size(); ++i) {
    const Component& c = g.components[i];
    u64 d = c.dlog[n % c.pk];
    u64 term = u64(u128(chi.exponents[i]) * d % c.order * (M / c.order) % M);
    j = (j + term) % M;
  }
  return g.roots[j];
}

cplx orthogonality_sum(const CharacterGroup& g, u64 a, u64 b) {
  if (std::gcd(a, g.Q) != 1 || std::gcd(b, g.Q) != 1)
    throw std::invalid_argument(
        "orthogonality_sum: a and b must be coprime to Q");
  NeumaierCplx acc;
  for (const Character& chi : g.characters)
    acc.add(evaluate(g, chi, a) * std::conj(evaluate(g, chi, b)));
  return acc.value();
}

cplx orthogonality_sum(u64 Q, u64 a, u64 b) {
  if (Q == 0) throw std::invalid_argument("orthogonality_sum: Q must be positive");
  return orthogonality_sum(character_group(Q), a, b);
}

} // namespace twistlab::chars
