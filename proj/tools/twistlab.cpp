#include <cstdio>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "twistlab/commands.hpp"
#include "twistlab/config.hpp"

using twistlab::cli::KappaArgs;
using twistlab::cli::RunConfig;
using twistlab::cli::ZqArgs;

int main(int argc, char** argv) {
  CLI::App app{"amplified second moments of twisted modular L-series:\n"
               "verification suites, decompositions, scans, and fits"};
  app.require_subcommand(1);

  std::string config_path, out, format, eigenform;
  int threads = 1;
  double theta = 7.0 / 64.0;
  unsigned long long seed = 42;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration file");
    sub->add_option("--threads", threads, "worker threads");
    sub->add_option("--format", format, "output format: auto | json | csv");
    sub->add_option("--out", out, "output path, '-' for stdout");
    sub->add_option("--theta", theta,
                    "Ramanujan-Petersson parameter in [0, 1/2)");
    sub->add_option("--seed", seed, "seed for the sampled property checks");
    sub->add_option("--eigenform", eigenform,
                    "builtin form name or eigenform file path");
  };

  std::string suite, csv_path;
  auto* sub_verify =
      app.add_subcommand("verify", "run a verification suite, exit 0 iff all pass");
  sub_verify
      ->add_option("suite", suite,
                   "identities | appendix | decomposition | smoothing | all")
      ->required();
  add_common(sub_verify);

  auto* sub_decompose = app.add_subcommand(
      "decompose", "four-piece moment decomposition on the configured grid");
  add_common(sub_decompose);

  auto* sub_scan = app.add_subcommand(
      "scan", "smoothed critical-line magnitudes over a (Q, t) grid");
  add_common(sub_scan);

  auto* sub_fit =
      app.add_subcommand("fit", "aspect-exponent fit of scan output");
  sub_fit->add_option("csv", csv_path, "csv file produced by scan")->required();
  add_common(sub_fit);

  KappaArgs ka;
  auto* sub_kappa =
      app.add_subcommand("kappa", "cusp Eisenstein coefficient product");
  sub_kappa->add_option("--N", ka.N, "squarefree level");
  sub_kappa->add_option("--w", ka.w, "cusp denominator, w | N");
  sub_kappa->add_option("--Q", ka.Q, "twist modulus, coprime to N");
  sub_kappa->add_option("--sp", ka.sp_re, "Re s'");
  sub_kappa->add_option("--sp-im", ka.sp_im, "Im s'");
  sub_kappa->add_option("--z", ka.z_re, "Re z");
  sub_kappa->add_option("--z-im", ka.z_im, "Im z");
  sub_kappa->add_flag("--exact", ka.exact,
                      "rational closed form at half-integer (s', z)");
  add_common(sub_kappa);

  ZqArgs za;
  auto* sub_zq =
      app.add_subcommand("zq", "shifted-convolution double Dirichlet series");
  sub_zq->add_option("--s", za.s_re, "Re s (>= 2.5)");
  sub_zq->add_option("--s-im", za.s_im, "Im s");
  sub_zq->add_option("--w", za.w_re, "Re w (>= 2.5)");
  sub_zq->add_option("--w-im", za.w_im, "Im w");
  sub_zq->add_option("--l1", za.l1, "first prime");
  sub_zq->add_option("--l2", za.l2, "second prime");
  sub_zq->add_option("--Q", za.Q, "shift modulus");
  sub_zq->add_option("--m-max", za.m_max, "m-truncation");
  sub_zq->add_option("--h-max", za.h_max, "h-truncation");
  add_common(sub_zq);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = twistlab::cli::parse_config_file(config_path);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--threads")) {
      if (threads < 1) throw std::invalid_argument("--threads must be >= 1");
      cfg.threads = threads;
    }
    if (sub->count("--format")) {
      if (format != "auto" && format != "json" && format != "csv")
        throw std::invalid_argument("--format must be auto, json, or csv");
      cfg.format = format;
    }
    if (sub->count("--out")) cfg.out = out;
    if (sub->count("--theta")) {
      if (!(theta >= 0.0) || theta >= 0.5)
        throw std::invalid_argument("--theta must lie in [0, 1/2)");
      cfg.theta = theta;
    }
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--eigenform")) cfg.eigenform = eigenform;

    if (sub == sub_verify) return twistlab::cli::cmd_verify(cfg, suite);
    if (sub == sub_decompose) return twistlab::cli::cmd_decompose(cfg);
    if (sub == sub_scan) return twistlab::cli::cmd_scan(cfg);
    if (sub == sub_fit) return twistlab::cli::cmd_fit(cfg, csv_path);
    if (sub == sub_kappa) return twistlab::cli::cmd_kappa(cfg, ka);
    return twistlab::cli::cmd_zq(cfg, za);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
