#include "twistlab/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "twistlab/amplifier.hpp"
#include "twistlab/characters.hpp"
#include "twistlab/checks.hpp"
#include "twistlab/lfunc.hpp"
#include "twistlab/ntheory.hpp"
#include "twistlab/report.hpp"
#include "twistlab/spectral.hpp"

namespace twistlab::cli {

namespace {

constexpr u64 SCAN_POINT_LIMIT = 10000;
constexpr u64 SCAN_TERM_LIMIT = 100000000; // per-point series length cap

ordered_json cplx_json(const cplx& z) {
  ordered_json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

std::size_t pick_chi(const chars::CharacterGroup& g,
                     const std::optional<u64>& override_idx) {
  if (override_idx) {
    if (*override_idx >= g.phi)
      throw std::invalid_argument(
          "chi_index " + std::to_string(*override_idx) +
          " out of range for Q = " + std::to_string(g.Q) +
          " (phi = " + std::to_string(g.phi) + ")");
    return std::size_t(*override_idx);
  }
  return g.phi > 1 ? 1 : 0; // first nonprincipal in canonical order
}

struct UniFit {
  double slope = 0.0;
  double r2 = 1.0;
};

UniFit univariate_fit(const std::vector<double>& xs,
                      const std::vector<double>& ys) {
  const double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-12)
    throw std::invalid_argument("fit: degenerate design (no spread)");
  UniFit out;
  out.slope = (n * sxy - sx * sy) / det;
  const double icept = (sy - out.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (icept + out.slope * xs[i]);
    ss_res += e * e;
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  out.r2 = ss_tot < 1e-30 ? 1.0 : 1.0 - ss_res / ss_tot;
  return out;
}

} // namespace

forms::HeckeEigenform load_form(const std::string& name) {
  if (name == "delta") return forms::builtin_delta();
  return forms::load_eigenform(name);
}

int cmd_verify(RunConfig cfg, const std::string& suite) {
  cfg.subcommand = "verify";
  cfg.format = "json";
  auto f = load_form(cfg.eigenform);
  const auto ctx = make_context(cfg, f);
  const auto checks = run_suite(suite, ctx);
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;

  ordered_json doc = report_header("verify", cfg);
  doc["suite"] = suite;
  doc["checks"] = checks_json(checks);
  doc["all_pass"] = all;
  write_json(cfg.out, doc);
  return all ? 0 : 1;
}

int cmd_decompose(RunConfig cfg) {
  cfg.subcommand = "decompose";
  cfg.format = "json";
  auto f = load_form(cfg.eigenform);
  const auto ctx = make_context(cfg, f);
  const auto& insts =
      ctx.instances.empty() ? builtin_instances() : ctx.instances;

  ordered_json rows = ordered_json::array();
  for (const auto& in : insts) {
    amp::ParamOverrides over;
    over.G = in.G;
    over.L = in.window.empty()
                 ? 1.5
                 : std::min(double(in.window.front()), double(in.Q) - 0.5);
    over.x = in.x;
    over.window = in.window;
    const auto p = amp::derive_params(in.Q, in.t, cfg.theta,
                                      amp::DeriveMode::manual, over);
    const auto group = chars::character_group(in.Q);
    const std::size_t chi = in.chi_index;
    const auto dec =
        amp::compute_decomposition(p, f, group, chi, cfg.threads);

    ordered_json row;
    row["Q"] = in.Q;
    row["chi_index"] = chi;
    row["t"] = in.t;
    row["G"] = in.G;
    row["x"] = in.x;
    row["window"] = in.window;
    row["S_d1"] = dec.S_d1;
    row["S_d2"] = cplx_json(dec.S_d2);
    row["S_o1"] = cplx_json(dec.S_o1);
    row["S_o2"] = cplx_json(dec.S_o2);
    row["total"] = cplx_json(dec.total());
    row["off_diagonal_empty"] = dec.off_diagonal_empty;
    row["m_cap"] = dec.trunc.m_cap;
    row["h_max_seen"] = dec.trunc.h_max_seen;
    row["chains_cut"] = dec.trunc.chains_cut;
    row["dropped_bound"] = dec.trunc.dropped_bound;

    // the all-pairs reference is quadratic in the term count; keep it to
    // instances where that is still instant
    const u64 terms = dec.trunc.m_cap * in.window.size();
    if (terms > 0 && terms <= 2500) {
      const auto dir = amp::compute_S_direct(p, f, group, chi, cfg.threads);
      const double scale =
          std::max({std::abs(dir.value), std::abs(dec.total().real()), 1e-12});
      row["direct"] = dir.value;
      row["direct_rel_err"] =
          std::abs(dir.value - dec.total().real()) / scale;
    } else {
      row["direct"] = nullptr;
      row["direct_rel_err"] = nullptr;
    }
    rows.push_back(std::move(row));
  }

  ordered_json doc = report_header("decompose", cfg);
  doc["rows"] = std::move(rows);
  write_json(cfg.out, doc);
  return 0;
}

int cmd_scan(RunConfig cfg) {
  cfg.subcommand = "scan";
  if (cfg.format == "auto") cfg.format = "csv";

  struct Point {
    u64 Q = 0;
    std::size_t chi = 0;
    double t = 0.0, x = 0.0;
    u64 n_terms = 0;
    cplx L;
    long millis = 0;
  };

  const u64 n_points = u64(cfg.Q_grid.size()) * u64(cfg.t_grid.size());
  if (n_points > SCAN_POINT_LIMIT)
    throw std::invalid_argument(
        "scan grid has " + std::to_string(n_points) + " points; the limit is " +
        std::to_string(SCAN_POINT_LIMIT));

  // groups are shared read-only by the workers; build them up front
  std::vector<chars::CharacterGroup> groups;
  groups.reserve(cfg.Q_grid.size());
  for (u64 Q : cfg.Q_grid) groups.push_back(chars::character_group(Q));

  std::vector<Point> pts;
  pts.reserve(n_points);
  u64 max_terms = 0;
  for (std::size_t qi = 0; qi < cfg.Q_grid.size(); ++qi)
    for (double t : cfg.t_grid) {
      Point p;
      p.Q = cfg.Q_grid[qi];
      p.chi = pick_chi(groups[qi], cfg.chi_index);
      p.t = t;
      p.x = cfg.x ? *cfg.x : 3.0 * double(p.Q) * (1.0 + std::abs(t));
      p.n_terms = u64(std::ceil(2.06 * p.x));
      if (p.n_terms > SCAN_TERM_LIMIT)
        throw std::invalid_argument(
            "scan point (Q=" + std::to_string(p.Q) + ", t=" + format_double(t) +
            "): x = " + format_double(p.x) + " needs " +
            std::to_string(p.n_terms) + " terms; the per-point limit is " +
            std::to_string(SCAN_TERM_LIMIT));
      max_terms = std::max(max_terms, p.n_terms);
      pts.push_back(p);
    }

  auto f = load_form(cfg.eigenform);
  forms::materialize(f, max_terms);

  // worker pool, one point at a time; the collector below writes in grid
  // order, so scheduling cannot reorder the output
  auto run_point = [&](Point& p) {
    const auto& g = groups[std::size_t(
        std::find(cfg.Q_grid.begin(), cfg.Q_grid.end(), p.Q) -
        cfg.Q_grid.begin())];
    const auto t0 = std::chrono::steady_clock::now();
    p.L = lfunc::smoothed_L(f, g, p.chi, p.t, p.x);
    const auto t1 = std::chrono::steady_clock::now();
    p.millis = long(
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
  };
  if (cfg.threads <= 1 || pts.size() <= 1) {
    for (auto& p : pts) run_point(p);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= pts.size()) return;
        run_point(pts[i]);
      }
    };
    std::vector<std::thread> pool;
    const unsigned nt =
        std::min<std::size_t>(unsigned(cfg.threads), pts.size());
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (cfg.format == "json") {
    ordered_json doc = report_header("scan", cfg);
    ordered_json rows = ordered_json::array();
    for (const auto& p : pts) {
      ordered_json row;
      row["Q"] = p.Q;
      row["chi_index"] = p.chi;
      row["t"] = p.t;
      row["x"] = p.x;
      row["re_L"] = p.L.real();
      row["im_L"] = p.L.imag();
      row["abs_L"] = std::abs(p.L);
      row["n_terms"] = p.n_terms;
      row["millis"] = p.millis;
      rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    write_json(cfg.out, doc);
    return 0;
  }

  std::ostringstream csv;
  csv << "# twistlab scan\n";
  for (const auto& [k, v] : config_echo(cfg)) csv << "# " << k << " = " << v << "\n";
  csv << "# fingerprint = " << config_fingerprint(cfg) << "\n";
  csv << "Q,chi_index,t,x,re_L,im_L,abs_L,n_terms,millis\n";
  for (const auto& p : pts)
    csv << p.Q << "," << p.chi << "," << format_double(p.t) << ","
        << format_double(p.x) << "," << format_double(p.L.real()) << ","
        << format_double(p.L.imag()) << "," << format_double(std::abs(p.L))
        << "," << p.n_terms << "," << p.millis << "\n";
  write_output(cfg.out, csv.str());
  return 0;
}

int cmd_fit(RunConfig cfg, const std::string& csv_path) {
  cfg.subcommand = "fit";
  cfg.format = "json";

  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open csv file '" + csv_path + "'");
  const std::string expected_header =
      "Q,chi_index,t,x,re_L,im_L,abs_L,n_terms,millis";
  std::vector<lfunc::ExponentSample> samples;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != expected_header)
        throw std::runtime_error(csv_path + ":" + std::to_string(lineno) +
                                 ": unexpected header; want '" +
                                 expected_header + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    if (fields.size() != 9)
      throw std::runtime_error(csv_path + ":" + std::to_string(lineno) +
                               ": malformed row: expected 9 fields, got " +
                               std::to_string(fields.size()));
    try {
      lfunc::ExponentSample s;
      s.Q = std::stod(fields[0]);
      s.t = std::stod(fields[2]);
      s.abs_L = std::stod(fields[6]);
      if (!(s.abs_L > 0.0))
        throw std::invalid_argument("abs_L must be positive");
      samples.push_back(s);
    } catch (const std::exception& e) {
      throw std::runtime_error(csv_path + ":" + std::to_string(lineno) +
                               ": bad row: " + e.what());
    }
  }
  if (!header_seen)
    throw std::runtime_error(csv_path + ": no header row found");
  if (samples.empty())
    throw std::runtime_error(csv_path + ": no data rows");

  double qmin = samples[0].Q, qmax = samples[0].Q;
  double umin = 1.0 + std::abs(samples[0].t), umax = umin;
  for (const auto& s : samples) {
    qmin = std::min(qmin, s.Q);
    qmax = std::max(qmax, s.Q);
    const double u = 1.0 + std::abs(s.t);
    umin = std::min(umin, u);
    umax = std::max(umax, u);
  }
  const bool q_span = qmax >= 10.0 * qmin - 1e-9;
  const bool t_span = umax >= 10.0 * umin - 1e-9;

  ordered_json doc = report_header("fit", cfg);
  doc["input"] = csv_path;
  doc["n_samples"] = samples.size();
  if (q_span && t_span) {
    const auto fit = lfunc::exponent_fit(samples);
    doc["mode"] = "bivariate";
    doc["slope_Q"] = fit.slope_Q;
    doc["slope_t"] = fit.slope_t;
    doc["r2"] = fit.r2;
  } else if (q_span || t_span) {
    std::vector<double> xs, ys;
    for (const auto& s : samples) {
      xs.push_back(q_span ? std::log(s.Q) : std::log(1.0 + std::abs(s.t)));
      ys.push_back(std::log(s.abs_L));
    }
    const auto fit = univariate_fit(xs, ys);
    doc["mode"] = q_span ? "Q-only" : "t-only";
    doc["slope_Q"] = q_span ? ordered_json(fit.slope) : ordered_json(nullptr);
    doc["slope_t"] = q_span ? ordered_json(nullptr) : ordered_json(fit.slope);
    doc["r2"] = fit.r2;
  } else {
    throw std::invalid_argument(
        "fit needs at least a decade of span in Q or in 1+|t|");
  }

  lfunc::ExponentTable table;
  table.theta = cfg.theta;
  ordered_json ref;
  ref["convexity"] = lfunc::ExponentTable::convexity;
  ref["q_aspect"] = lfunc::ExponentTable::q_aspect;
  ref["wu"] = table.wu();
  ref["blomer_harcos"] = lfunc::ExponentTable::blomer_harcos;
  ref["munshi"] = lfunc::ExponentTable::munshi;
  ref["hybrid_t"] = table.hybrid_t();
  doc["reference_exponents"] = std::move(ref);

  write_json(cfg.out, doc);
  return 0;
}

int cmd_kappa(RunConfig cfg, const KappaArgs& args) {
  cfg.subcommand = "kappa";
  cfg.format = "json";
  ordered_json doc = report_header("kappa", cfg);
  doc["N"] = args.N;
  doc["w"] = args.w;
  doc["cusp_Q"] = args.Q;
  doc["s_prime"] = cplx_json(cplx(args.sp_re, args.sp_im));
  doc["z"] = cplx_json(cplx(args.z_re, args.z_im));

  if (args.exact) {
    const long long ts = std::llround(2.0 * args.sp_re);
    const long long tz = std::llround(2.0 * args.z_re);
    if (std::abs(2.0 * args.sp_re - double(ts)) > 1e-9 ||
        std::abs(2.0 * args.z_re - double(tz)) > 1e-9 ||
        args.sp_im != 0.0 || args.z_im != 0.0)
      throw std::invalid_argument(
          "exact mode needs real half-integer s' and z");
    const auto r =
        spectral::kappa_exact(args.N, args.w, args.Q, int(ts), int(tz));
    ordered_json ex;
    ex["num"] = r.num;
    ex["den"] = r.den;
    doc["exact"] = std::move(ex);
    doc["value"] = cplx_json(cplx(r.to_double(), 0.0));
  } else {
    spectral::KappaParams kp;
    kp.N = args.N;
    kp.w = args.w;
    kp.Q = args.Q;
    kp.s_prime = cplx(args.sp_re, args.sp_im);
    kp.z = cplx(args.z_re, args.z_im);
    doc["value"] = cplx_json(spectral::kappa(kp));
  }
  write_json(cfg.out, doc);
  return 0;
}

int cmd_zq(RunConfig cfg, const ZqArgs& args) {
  cfg.subcommand = "zq";
  cfg.format = "json";
  if (args.m_max > 1000000 || args.h_max > 1000000)
    throw std::invalid_argument(
        "zq truncation too large; m_max and h_max are capped at 1e6");

  auto f = load_form(cfg.eigenform);
  const u128 top = u128(args.m_max) * args.l2 + u128(args.h_max) * args.Q;
  const u128 needed128 = top / args.l1 + 1;
  if (needed128 > 10000000)
    throw std::invalid_argument(
        "zq needs coefficients past 1e7; shrink the truncation box");
  const u64 needed = std::max<u64>(args.m_max, u64(needed128));
  forms::materialize(f, needed);

  spectral::ShiftedConvolutionPoint pt;
  pt.s = cplx(args.s_re, args.s_im);
  pt.w = cplx(args.w_re, args.w_im);
  pt.l1 = args.l1;
  pt.l2 = args.l2;
  pt.Q = args.Q;
  pt.m_max = args.m_max;
  pt.h_max = args.h_max;
  spectral::z_q_direct(pt, f, cfg.threads);

  ordered_json doc = report_header("zq", cfg);
  doc["s"] = cplx_json(pt.s);
  doc["w"] = cplx_json(pt.w);
  doc["l1"] = pt.l1;
  doc["l2"] = pt.l2;
  doc["shift_Q"] = pt.Q;
  doc["m_max"] = pt.m_max;
  doc["h_max"] = pt.h_max;
  doc["value"] = cplx_json(pt.value);
  doc["tail_bound"] = pt.tail_bound;
  doc["note"] = pt.note;
  write_json(cfg.out, doc);
  return 0;
}

} // namespace twistlab::cli
