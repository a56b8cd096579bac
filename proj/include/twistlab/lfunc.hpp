#pragma once

#include <functional>
#include <vector>

#include "twistlab/characters.hpp"
#include "twistlab/defs.hpp"
#include "twistlab/forms.hpp"

namespace twistlab::lfunc {

// Reference exponents for |L(1/2+it, f_chi)| in the Q aspect, kept in one
// place so scan output can print the comparison table. theta is the current
// bound toward Ramanujan-Petersson for Maass forms; 7/64 is the best known.
struct ExponentTable {
  double theta = 7.0 / 64.0;

  static constexpr double convexity = 0.5;
  static constexpr double q_aspect = 3.0 / 8.0;
  static constexpr double blomer_harcos = 0.5 - 1.0 / 40.0;
  static constexpr double munshi = 0.5 - 1.0 / 18.0;

  double wu() const { return 3.0 / 8.0 + theta / 4.0; }
  // t-aspect exponent of the hybrid bound; 32/89 exactly at theta = 7/64
  double hybrid_t() const { return 1.0 / (3.0 - 2.0 * theta); }
};

struct DirichletValue {
  cplx value;
  double tail_bound; // certified bound on the dropped |A(n) chi(n) n^{-s}| mass
};

// Sum_{n<=n_max} A(n) chi(n) n^{-s} in the absolute-convergence region.
// Requires Re s > 3/2. The reported tail bound uses d(n) <= 2 sqrt(n):
//   sum_{n>N} d(n) n^{-sigma} <= 2 N^{3/2-sigma}/(sigma-3/2) + 2 N^{3/2-sigma}.
DirichletValue dirichlet_series(const forms::HeckeEigenform& f,
                                const chars::CharacterGroup& group,
                                std::size_t chi_index, cplx s, u64 n_max);

// Smoothed sum Sum_{n<=2.06x} A(n) w(n) n^{-s} V(n/x) with arbitrary complex
// weights w(n); the term filter is exposed so tests can superpose synthetic
// characters. x >= 10. The 2.06 cutoff leaves V < 1e-16 on dropped terms.
cplx smoothed_series(const forms::HeckeEigenform& f,
                     const std::function<cplx(u64)>& weight, cplx s, double x);

// Same sum with w = chi from a character group.
cplx smoothed_series(const forms::HeckeEigenform& f,
                     const chars::CharacterGroup& group, std::size_t chi_index,
                     cplx s, double x);

// Critical-line evaluator: Sum A(n) chi(n) n^{-1/2-it} V(n/x). One-sided by
// design (no dual sum), so magnitudes are only honest for x well above
// Q(1+|t|); the scan command enforces x = 3 Q (1+|t|).
cplx smoothed_L(const forms::HeckeEigenform& f,
                const chars::CharacterGroup& group, std::size_t chi_index,
                double t, double x);

struct ExponentSample {
  double Q;
  double t;
  double abs_L;
};

struct ExponentFit {
  double slope_Q = 0.0;
  double slope_t = 0.0; // against log(1+|t|)
  double r2 = 0.0;
};

// Bivariate least squares of log|L| against (log Q, log(1+|t|)). Purely
// descriptive. Needs >= 8 samples, a decade of span in both Q and 1+|t|,
// positive |L|, and a non-singular design matrix.
ExponentFit exponent_fit(const std::vector<ExponentSample>& samples);

} // namespace twistlab::lfunc
