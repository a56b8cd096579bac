#pragma once

#include <string>
#include <vector>

#include "twistlab/config.hpp"
#include "twistlab/forms.hpp"
#include "twistlab/report.hpp"

namespace twistlab::cli {

// One amplified-moment instance of the verification grid.
struct CheckInstance {
  u64 Q = 5;
  double t = 0.0;
  double G = 12.0;
  std::vector<u64> window = {3};
  double x = 20.0;
  std::size_t chi_index = 1;
};

// Shared inputs for the check functions. Defaults reproduce the acceptance
// gate; a config can substitute its own orthogonality range and instance
// grid (that is how the degenerate Q = 1 and empty-off-diagonal runs are
// driven).
struct CheckContext {
  const forms::HeckeEigenform* f = nullptr; // materialized through 1e5
  int threads = 1;
  u64 seed = 42;
  std::vector<u64> ortho_Q;             // empty: 1..200
  std::vector<CheckInstance> instances; // empty: the builtin five-instance grid
};

// builds the context from a config; materializes the form on first use
CheckContext make_context(const RunConfig& cfg, forms::HeckeEigenform& f);

// the builtin grid: five instances across Q in {5,11,13}, t in {0,2.7},
// G in {12,40}, x <= 100, plus one instance whose Q exceeds every reachable
// shift so the off-diagonal branch runs empty
std::vector<CheckInstance> builtin_instances();

// Verification checks. measured/tolerance semantics per check are stated in
// the implementation next to the pinned constants.
CheckResult check_orthogonality(const CheckContext& ctx);
CheckResult check_coefficients(const CheckContext& ctx);
CheckResult check_decomposition(const CheckContext& ctx);
CheckResult check_diagonal_main(const CheckContext& ctx);
CheckResult check_euler_ratios(const CheckContext& ctx);
CheckResult check_smoothing_rate(const CheckContext& ctx);
CheckResult check_beta_mellin(const CheckContext& ctx);
CheckResult check_appendix_values(const CheckContext& ctx);
CheckResult check_mellin_pair(const CheckContext& ctx);
CheckResult check_amplifier_inequality(const CheckContext& ctx);
CheckResult check_zq_consistency(const CheckContext& ctx);

// identities | decomposition | smoothing | appendix | all
std::vector<CheckResult> run_suite(const std::string& suite,
                                   const CheckContext& ctx);

} // namespace twistlab::cli
