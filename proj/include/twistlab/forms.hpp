#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "twistlab/defs.hpp"

namespace twistlab::forms {

// Holomorphic Hecke eigenform of even weight k >= 4 and squarefree level N,
// given by its Hecke eigenvalues at primes. Coefficients are stored in the
// unitary normalization A(n) = a(n) / n^{(k-1)/2} (|A(p)| <= 2), because the
// raw integer a(p) of a weight-12 form near p = 1e5 has ~28 digits and does
// not fit a double.
struct HeckeEigenform {
  std::string name;
  int weight = 0;
  u64 level = 1;
  u64 prime_limit = 0;                  // A(p) known for all primes p <= prime_limit
  std::unordered_map<u64, double> ap;   // p -> A(p)

  // dense A(1..n) cache, filled by materialize(); A_dense[0] unused
  std::vector<double> A_dense;

  // prime-power cache for the Hecke recursion, keyed by p * 64 + e
  mutable std::unordered_map<u64, double> power_cache;
};

// Exact integer coefficients of q * prod_{m>=1} (1 - q^m)^24 up to q^n_max,
// n_max <= 1e5. Index n holds the n-th coefficient; [0] is zero. Values near
// n = 1e5 reach ~1e29, hence __int128. Computed once per process and cached.
const std::vector<i128>& eta24_expansion(std::size_t n_max);

// weight-12 level-1 form with eigenvalues taken from eta24_expansion
HeckeEigenform builtin_delta(u64 prime_limit = 100000);

// Text format: 'weight = <even int>', 'level = <squarefree int>', then one
// 'p a_p' pair per line under 'primes:'. Raw a_p are normalized on load.
// Parse errors name the line and field.
HeckeEigenform load_eigenform(const std::string& path);

// A(n) via multiplicativity and the Hecke recursion
//   A(p^{r+1}) = A(p) A(p^r) - A(p^{r-1})   (p coprime to N)
//   A(p^r)     = A(p)^r                     (p | N, N squarefree)
// Throws "table exhausted" naming the prime when n needs an unknown A(p).
double coefficient(const HeckeEigenform& f, u64 n);

// Pre-computes A(1..n_max) into f.A_dense with a linear sieve. Call before
// handing f to parallel loops; coefficient() itself only touches shared
// mutable state when it has to fall off the dense table.
void materialize(HeckeEigenform& f, u64 n_max);

// Ratio of the two Dirichlet series sum_m A(l2 m) A(l1 m) m^{-s} and
// sum_m A(m)^2 m^{-s}, which collapses to the product of the two modified
// local factors at l1 and l2:
//   at p = l2:  [sum_j A(l2^{j+1}) A(l2^j) l2^{-js}] / [sum_j A(l2^j)^2 l2^{-js}]
//   at p = l1:  the mirror ratio with the shift on the conjugate side.
// Requires l1 != l2 prime, gcd(l1 l2, N) = 1, Re s > 0. The j-sums stop once
// the Deligne bound (j+2)^2 p^{-j Re s} drops below 1e-14.
cplx euler_ratio(const HeckeEigenform& f, u64 l1, u64 l2, cplx s);

// 1/l1 when l1 = l2, else (l1 l2)^{-1} * euler_ratio(f, l1, l2, 1)
double b_constant(const HeckeEigenform& f, u64 l1, u64 l2);

struct RankinFit {
  double c = 0.0;         // slope of D(x) against log x
  double intercept = 0.0;
  double fit_residual = 0.0; // rms residual of the linear fit
};

// D(x) = sum_m |A(m)|^2 m^{-1} V(m/x)^2 grows like c log x; fit c by least
// squares over the given x grid (>= 4 points spanning at least a decade).
RankinFit rankin_selberg_constant(const HeckeEigenform& f,
                                  const std::vector<double>& x_grid);

// pole-residue probe for the same constant from the partial sums
// P(X) = w * sum_{m<=X} |A(m)|^2 m^{-1-w} at X = M/4 and X = M:
// c = (P(M) - P(M/4)) / ((M/4)^{-w} - M^{-w}). The difference removes the
// Laurent-constant offset that a single truncated sum keeps at O(w); at
// w = 0.05, M = 1e5 this lands well within 10% of the fitted slope.
double rankin_probe(const HeckeEigenform& f, double w, u64 M);

} // namespace twistlab::forms
