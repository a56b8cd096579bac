#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twistlab/characters.hpp"
#include "twistlab/defs.hpp"
#include "twistlab/forms.hpp"

namespace twistlab::amp {

// Everything the amplified-moment evaluators need, bundled so the derived
// quantities (alpha, A, G, L, the prime window) travel together with the
// givens (Q, t, level).
struct AmplifierParams {
  u64 Q = 0;
  double t = 0.0;
  u64 level = 1;
  double theta = 7.0 / 64.0;
  double a_exp = 0.0;    // t-exponent used for G in derived mode
  double alpha = 0.0;    // 1 / log(Q(1+|t|))
  double A = 0.0;        // sqrt(10 log(Q(1+|t|)))
  double G = 0.0;
  double L = 0.0;
  double x = 0.0;
  double r_offset = 0.0; // shift of the evaluation point inside |r| <= A
  std::vector<u64> window; // primes in (L, 2L] coprime to Q * level
  bool window_empty = false;
  std::string warning;

  double t_tilde() const { return t + r_offset; }
};

enum class DeriveMode { theorem, manual };

struct ParamOverrides {
  u64 level = 1;
  std::optional<double> G;
  std::optional<double> L;
  std::optional<double> x;
  std::optional<double> a_exp;
  std::optional<double> r_offset;
  std::optional<std::vector<u64>> window; // explicit prime window
};

// alpha and A as functions of the real effective modulus Q(1+|t|); split out
// so they can be evaluated at non-integer arguments
double alpha_for(double Q_eff);
double amplitude_for(double Q_eff);

// theorem mode: G = (1+|t|)^{2/(3-2theta)} (log Q)^5 floored at 2A, and
// L = Q^{1/4}. manual mode: G/L/x come from the overrides. Q >= 3; L < Q
// enforced in both modes. x defaults to 3 Q (1+|t|).
AmplifierParams derive_params(u64 Q, double t, double theta, DeriveMode mode,
                              const ParamOverrides& over = {});

// G e^{-G |theta_log|}: closed form of the Cauchy-weight Fourier integral
// integral e^{i theta_log r} dr / (pi (1 + (r/G)^2))
double cauchy_kernel_mass(double G, double theta_log);

// shared off-diagonal truncation: a pair is dropped once the folded kernel
// falls below e^{-40}; the direct form and the decomposition must use the
// same predicate or the identity between them degrades to the cut size
constexpr double KERNEL_LOG_CUT = 40.0;
inline bool kernel_cut(double G, double log_ratio) {
  return G * (log_ratio < 0 ? -log_ratio : log_ratio) > KERNEL_LOG_CUT;
}

struct SDirectResult {
  double value = 0.0;
  u64 term_count = 0;   // (m, l) terms entering the bilinear form
  u64 pair_count = 0;   // unordered same-class pairs before the kernel cut
  u64 pairs_cut = 0;
  bool cross_checked = false;   // naive all-pairs loop ran (small instances)
  double cross_check_rel_err = 0.0;
};

// phi(Q) * sum over same-residue-class term pairs of
// w(m1,l1) conj(w(m2,l2)) G e^{-G |log(l1 m1 / (l2 m2))|} with
// w(m,l) = A(m) conj(chi(l)) l^alpha m^{-1/2 - i t~} V(m/x), m <= 2.06 x.
// Grouped by class a mod Q (O(T^2/Q) instead of O(T^2)); rejects instances
// whose raw pair count exceeds 1e9 with guidance to lower x or raise Q.
SDirectResult compute_S_direct(const AmplifierParams& p,
                               const forms::HeckeEigenform& f,
                               const chars::CharacterGroup& group,
                               std::size_t chi_index, int threads = 1);

struct TruncationRecord {
  u64 m_cap = 0;        // m-range truncation, ceil(2.06 x)
  u64 h_max_seen = 0;   // largest h reached before the kernel cut
  u64 chains_cut = 0;   // (l1, l2, m) chains stopped by the kernel cut
  double dropped_bound = 0.0; // crude envelope on everything dropped
};

struct MomentDecomposition {
  double S_d1 = 0.0; // real and nonnegative by construction
  cplx S_d2;
  cplx S_o1;
  cplx S_o2;
  TruncationRecord trunc;
  bool off_diagonal_empty = false; // Q exceeds every n1 - n2, so h >= 1 is impossible

  cplx total() const { return S_d1 + S_d2 + S_o1 + S_o2; }
};

// The same bilinear form split by the defining constraints: l1 = l2 with
// m1 = m2 (S_d1), m1 l1 = m2 l2 with l1 != l2 via m1 = l2 m, m2 = l1 m
// (S_d2), m1 l1 = m2 l2 + hQ with h >= 1 (S_o1) and its mirror (S_o2).
// S_o1 and S_o2 are enumerated independently; conj symmetry is a check,
// not an assumption.
MomentDecomposition compute_decomposition(const AmplifierParams& p,
                                          const forms::HeckeEigenform& f,
                                          const chars::CharacterGroup& group,
                                          std::size_t chi_index,
                                          int threads = 1);

struct Sd1Prediction {
  double main = 0.0;           // phi(Q) G (sum_l l^{2 alpha}) c log x
  double error_envelope = 0.0; // Q G L^{1 + 2 alpha}
};

// diagonal main term; c is the Rankin-Selberg slope from
// forms::rankin_selberg_constant
Sd1Prediction predict_S_d1(const AmplifierParams& p, double c);

// phi(Q) G sum_{l1 != l2} conj(chi(l1)) chi(l2) (l1 l2)^alpha
//   l2^{-1/2 - i t~} l1^{-1/2 + i t~} c E_{l1,l2}(1) log(x / l2)
cplx predict_S_d2_main(const AmplifierParams& p,
                       const forms::HeckeEigenform& f,
                       const chars::CharacterGroup& group,
                       std::size_t chi_index, double c);

struct SmoothingPoint {
  double G = 0.0;
  cplx T;             // kernel e^{-G log(1 + hQ/(m2 l2))}
  cplx T_tilde;       // kernel e^{-G hQ/(m2 l2)}
  cplx T_small_shift; // T restricted to hQ < m2 l2
  double large_shift_abs_sum = 0.0; // sum |A A m^{-1/2} m^{-1/2} V V| over hQ >= m2 l2
  u64 large_shift_count = 0;
  double rel_err = 0.0; // |T - T_tilde| / |T_tilde|
  bool skipped = false; // T_tilde numerically zero
};

struct SmoothingComparison {
  std::vector<SmoothingPoint> points;
  double fitted_slope = 0.0; // log rel_err against log G
};

// Off-diagonal smoothing experiment for one (l1, l2) slice: the exact
// kernel against its linearized version, across an increasing G list
// (>= 4 values, each >= 20). The two sums share every other factor, so
// rel_err isolates the kernel replacement; the expected decay is G^{-1/2}.
SmoothingComparison compare_T_smoothing(const forms::HeckeEigenform& f,
                                        u64 l1, u64 l2, u64 Q,
                                        const std::vector<double>& G_list,
                                        double x, double t);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// |L(1/2+it, f_chi)|^2 |sum_l 1|^2 against
// sum_psi |L(1/2+it, f_psi)|^2 |sum_l conj(chi)(l) psi(l)|^2, both sides
// through smoothed_L at the same x. The psi-sum runs over all phi(Q)
// characters, so keep Q small.
InequalityCheck amplifier_inequality_check(const AmplifierParams& p,
                                           const forms::HeckeEigenform& f,
                                           const chars::CharacterGroup& group,
                                           std::size_t chi_index, double x);

} // namespace twistlab::amp
