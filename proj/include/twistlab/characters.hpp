#pragma once

#include <memory>
#include <vector>

#include "twistlab/defs.hpp"

namespace twistlab::chars {

// One cyclic component of (Z/Q)^*. For odd prime powers p^k this is the whole
// unit group mod p^k with the smallest primitive root of p (lifted by +p when
// g^{p-1} = 1 mod p^2); for 2^e with e >= 3 the group splits into <-1> and
// <5>, contributing two components.
struct Component {
  u64 pk;               // modulus of this CRT leg (the 2^e leg appears twice)
  u64 generator;        // generator residue mod pk
  u64 order;            // component order m_i
  std::vector<u32> dlog; // dlog[n mod pk] wrt generator, only for units
};

struct Character {
  std::vector<u32> exponents; // one exponent per component, 0 <= a_i < m_i
  u64 index = 0;              // canonical mixed-radix index
  u64 order = 1;              // multiplicative order of the character
  u64 conductor = 1;          // metadata only, nothing filters on it
  bool principal = true;
};

struct CharacterGroup {
  u64 Q = 1;
  u64 phi = 1;
  u64 exponent = 1; // lcm of component orders; all values are exponent-th roots of unity
  std::vector<Component> components;
  std::vector<Character> characters; // all phi(Q) of them, by canonical index
  std::vector<cplx> roots;           // roots[j] = e(j / exponent)
};

// Deterministic for fixed Q: a second call builds the identical group,
// generator choices included.
CharacterGroup character_group(u64 Q);

// chi(n): an exact root of unity (assembled from one exact rational phase,
// not by repeated multiplication), or 0 when gcd(n, Q) > 1.
cplx evaluate(const CharacterGroup& g, const Character& chi, u64 n);

// sum over all characters mod Q of chi(a) * conj(chi(b)); requires a, b
// coprime to Q. Summed term by term through evaluate() on purpose: this is
// the orthogonality probe for the whole evaluation path. The group overload
// amortizes construction when sweeping many (a, b) pairs.
cplx orthogonality_sum(const CharacterGroup& g, u64 a, u64 b);
cplx orthogonality_sum(u64 Q, u64 a, u64 b);

} // namespace twistlab::chars
