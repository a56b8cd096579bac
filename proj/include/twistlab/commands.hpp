#pragma once

#include <string>

#include "twistlab/config.hpp"
#include "twistlab/forms.hpp"

namespace twistlab::cli {

struct KappaArgs {
  u64 N = 1, w = 1, Q = 1;
  double sp_re = 0.5, sp_im = 0.0;
  double z_re = -0.5, z_im = 0.0;
  bool exact = false; // evaluate the rational closed form at half-integers
};

struct ZqArgs {
  double s_re = 3.0, s_im = 0.0;
  double w_re = 3.0, w_im = 0.0;
  u64 l1 = 2, l2 = 3, Q = 5;
  u64 m_max = 1000, h_max = 1000;
};

// "delta" or a path to an eigenform file
forms::HeckeEigenform load_form(const std::string& name);

// Subcommand drivers. Each writes its report to cfg.out and returns the
// process exit code: verify returns 1 when a check fails, everything else
// reports problems by throwing.
int cmd_verify(RunConfig cfg, const std::string& suite);
int cmd_decompose(RunConfig cfg);
int cmd_scan(RunConfig cfg);
int cmd_fit(RunConfig cfg, const std::string& csv_path);
int cmd_kappa(RunConfig cfg, const KappaArgs& args);
int cmd_zq(RunConfig cfg, const ZqArgs& args);

} // namespace twistlab::cli
