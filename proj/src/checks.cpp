#include "twistlab/checks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "twistlab/amplifier.hpp"
#include "twistlab/characters.hpp"
#include "twistlab/lfunc.hpp"
#include "twistlab/ntheory.hpp"
#include "twistlab/special.hpp"
#include "twistlab/spectral.hpp"
#include "twistlab/summation.hpp"

namespace twistlab::cli {

namespace {

// Pinned gate tolerances. These are the contract of the verification suites;
// loosening one is a behavior change, not a tuning knob.
constexpr double TOL_ORTHOGONALITY = 1e-12;  // absolute, per (Q, a, b)
constexpr double TOL_COEFF_REL = 1e-10;      // recursion vs eta product
constexpr double TOL_DECOMP_REL = 1e-9;      // decomposition == direct == oracle
constexpr double TOL_CONJ_PAIR = 1e-12;      // S_o2 against conj(S_o1)
constexpr double TOL_DIAGONAL_SLOPE = 0.10;  // relative, slope vs Rankin c
constexpr double TOL_EULER_REL = 1e-8;       // local factors vs series ratio
constexpr double SMOOTHING_CENTER = -0.5;    // expected kernel-replacement rate
constexpr double SMOOTHING_HALF_WIDTH = 0.15;
constexpr double TOL_BETA_MELLIN = 1e-8;     // abs, 27-point grid
constexpr double TOL_RESIDUE_TABLE = 1e-4;   // Richardson limit vs table
constexpr double TOL_RESIDUE_CONTOUR = 1e-6; // generic formula vs contour
constexpr double TOL_MELLIN_PAIR = 1e-8;     // abs, inverse transform vs V
constexpr double TOL_MELLIN_SHIFT = 2e-8;    // abs, abscissa 2 vs 3
constexpr double TOL_ZQ_TAIL = 1e-8;         // tail bound at (1e4, 1e4)

std::string num(double v) { return format_double(v); }

forms::HeckeEigenform& builtin_delta_1e5() {
  static forms::HeckeEigenform f = [] {
    auto g = forms::builtin_delta();
    forms::materialize(g, 100000);
    return g;
  }();
  return f;
}

// slope of the least-squares line through (x_i, y_i)
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

amp::AmplifierParams instance_params(const CheckInstance& in) {
  amp::ParamOverrides over;
  over.G = in.G;
  // L only feeds validation here; the explicit window overrides the (L, 2L]
  // selection entirely
  over.L = in.window.empty()
               ? 1.5
               : std::min(double(in.window.front()), double(in.Q) - 0.5);
  over.x = in.x;
  over.window = in.window;
  return amp::derive_params(in.Q, in.t, 7.0 / 64.0, amp::DeriveMode::manual,
                            over);
}

// Naive quadruple loop over (m1, l1, m2, l2) with the residue-class filter,
// no pair grouping and no kernel cut. Everything the library computes with
// structure, this recomputes without it.
double brute_moment(const amp::AmplifierParams& p,
                    const forms::HeckeEigenform& f,
                    const chars::CharacterGroup& group,
                    std::size_t chi_index) {
  const auto& chi = group.characters.at(chi_index);
  const u64 m_cap = u64(std::ceil(2.06 * p.x));
  const double tt = p.t_tilde();
  auto w = [&](u64 m, u64 l) {
    const double lm = std::log(double(m));
    return forms::coefficient(f, m) * std::pow(double(l), p.alpha) *
           std::exp(-std::pow(double(m) / p.x, 5.0)) *
           std::conj(chars::evaluate(group, chi, l)) *
           std::exp(cplx(-0.5 * lm, -tt * lm));
  };
  double acc = 0.0;
  for (u64 l1 : p.window)
    for (u64 l2 : p.window)
      for (u64 m1 = 1; m1 <= m_cap; ++m1)
        for (u64 m2 = 1; m2 <= m_cap; ++m2) {
          if ((m1 * l1) % p.Q != (m2 * l2) % p.Q) continue;
          const double dlog =
              std::abs(std::log(double(m1 * l1) / double(m2 * l2)));
          const cplx term = w(m1, l1) * std::conj(w(m2, l2)) * p.G *
                            std::exp(-p.G * dlog);
          acc += term.real();
        }
  return double(nt::euler_phi(p.Q)) * acc;
}

// A(l * m) without indexing past the dense table: split off the l-part of m
// and use multiplicativity across the coprime split.
double coeff_l_times(const forms::HeckeEigenform& f, u64 l, u64 m) {
  int e = 0;
  u64 rest = m;
  while (rest % l == 0) {
    rest /= l;
    ++e;
  }
  u64 lp = l;
  for (int i = 0; i < e; ++i) lp *= l;
  return forms::coefficient(f, lp) * forms::coefficient(f, rest);
}

const std::vector<CheckInstance>& active_instances(const CheckContext& ctx) {
  static const std::vector<CheckInstance> builtin = builtin_instances();
  return ctx.instances.empty() ? builtin : ctx.instances;
}

} // namespace

std::vector<CheckInstance> builtin_instances() {
  return {
      {5, 0.0, 12.0, {3}, 20.0, 1},
      {5, 0.0, 12.0, {3}, 20.0, 0}, // principal character
      {11, 2.7, 40.0, {3, 5}, 60.0, 3},
      {11, 0.0, 40.0, {3, 5}, 60.0, 1},
      {13, 0.0, 12.0, {3, 7}, 100.0, 2},
      // Q larger than any reachable n1 - n2: the h >= 1 ranges are empty and
      // the off-diagonal branch must come back as exact zeros
      {211, 0.0, 12.0, {3, 5}, 10.0, 1},
  };
}

CheckContext make_context(const RunConfig& cfg, forms::HeckeEigenform& f) {
  forms::materialize(f, 100000);
  CheckContext ctx;
  ctx.f = &f;
  ctx.threads = cfg.threads;
  ctx.seed = cfg.seed;
  if (!cfg.grid_explicit && !cfg.G && !cfg.L && !cfg.x) return ctx;

  ctx.ortho_Q = cfg.Q_grid;
  for (u64 Q : cfg.Q_grid) {
    if (Q < 3) continue; // no amplifier instance below Q = 3
    const u64 phi = nt::euler_phi(Q);
    for (double t : cfg.t_grid) {
      amp::ParamOverrides over;
      over.G = cfg.G;
      over.L = cfg.L;
      over.x = cfg.x;
      const auto mode = (cfg.G && cfg.L) ? amp::DeriveMode::manual
                                         : amp::DeriveMode::theorem;
      const auto p = amp::derive_params(Q, t, cfg.theta, mode, over);
      CheckInstance in;
      in.Q = Q;
      in.t = t;
      in.G = p.G;
      in.window = p.window;
      in.x = p.x;
      if (cfg.chi_index) {
        if (*cfg.chi_index >= phi)
          throw std::invalid_argument(
              "chi_index " + std::to_string(*cfg.chi_index) +
              " out of range for Q = " + std::to_string(Q) +
              " (phi = " + std::to_string(phi) + ")");
        in.chi_index = *cfg.chi_index;
      } else {
        in.chi_index = phi > 1 ? 1 : 0;
      }
      ctx.instances.push_back(std::move(in));
    }
  }
  return ctx;
}

// --------------------------------------------------------------------------
// character orthogonality: sum over all characters of psi(a) conj(psi(b))
// equals phi(Q) when a = b and 0 otherwise, for every coprime pair

CheckResult check_orthogonality(const CheckContext& ctx) {
  std::vector<u64> Qs = ctx.ortho_Q;
  if (Qs.empty())
    for (u64 Q = 1; Q <= 200; ++Q) Qs.push_back(Q);

  struct PerQ {
    double err = 0.0;
    u64 a = 0, b = 0;
  };
  std::vector<PerQ> slot(Qs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= Qs.size()) return;
      const u64 Q = Qs[i];
      const auto g = chars::character_group(Q);

      // cache psi(a) per unit so the pair sweep is a pure inner product;
      // same products, same order, same compensation as orthogonality_sum
      std::vector<u64> units;
      for (u64 a = 1; a <= Q; ++a)
        if (std::gcd(a, Q) == 1) units.push_back(a);
      const std::size_t nchi = g.characters.size();
      std::vector<std::vector<cplx>> cols(units.size(),
                                          std::vector<cplx>(nchi));
      for (std::size_t ai = 0; ai < units.size(); ++ai)
        for (std::size_t ci = 0; ci < nchi; ++ci)
          cols[ai][ci] = chars::evaluate(g, g.characters[ci], units[ai]);

      PerQ w;
      if (!units.empty()) w.a = w.b = units[0];
      for (std::size_t ai = 0; ai < units.size(); ++ai) {
        for (std::size_t bi = 0; bi < units.size(); ++bi) {
          NeumaierCplx acc;
          for (std::size_t ci = 0; ci < nchi; ++ci)
            acc.add(cols[ai][ci] * std::conj(cols[bi][ci]));
          const double expected = ai == bi ? double(g.phi) : 0.0;
          const double err = std::abs(acc.value() - expected);
          if (err > w.err) w = {err, units[ai], units[bi]};
        }
      }
      // route the worst pair through the public entry point as well, so a
      // cache bug cannot silently stand in for the library sum
      if (!units.empty()) {
        const double expected = w.a == w.b ? double(g.phi) : 0.0;
        const double lib_err =
            std::abs(chars::orthogonality_sum(g, w.a, w.b) - expected);
        w.err = std::max(w.err, lib_err);
      }
      slot[i] = w;
    }
  };
  const unsigned nt_ = std::min<std::size_t>(std::max(1, ctx.threads), Qs.size());
  if (nt_ <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nt_; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  CheckResult r;
  r.id = "orthogonality";
  r.tolerance = TOL_ORTHOGONALITY;
  u64 wq = Qs.empty() ? 0 : Qs[0];
  PerQ w;
  for (std::size_t i = 0; i < Qs.size(); ++i)
    if (slot[i].err > w.err) {
      w = slot[i];
      wq = Qs[i];
    }
  r.measured = w.err;
  r.pass = w.err <= r.tolerance;
  r.detail = std::to_string(Qs.size()) + " moduli; worst " + num(w.err) +
             " at Q=" + std::to_string(wq) + " a=" + std::to_string(w.a) +
             " b=" + std::to_string(w.b);
  return r;
}

// --------------------------------------------------------------------------
// coefficient engine: Hecke recursion against the eta-product expansion
// through 1e4, and the divisor-bound envelope through 1e5

CheckResult check_coefficients(const CheckContext&) {
  auto& f = builtin_delta_1e5();
  const auto& eta = forms::eta24_expansion(10000);

  double worst = 0.0;
  u64 worst_n = 1;
  for (u64 n = 1; n <= 10000; ++n) {
    const double ref = double(eta[n]) / std::pow(double(n), 5.5);
    const double got = forms::coefficient(f, n);
    const double err =
        std::abs(got - ref) / std::max(1.0, std::abs(ref));
    if (err > worst) {
      worst = err;
      worst_n = n;
    }
  }

  u64 violations = 0;
  double max_ratio = 0.0;
  for (u64 n = 1; n <= 100000; ++n) {
    const double bound = double(nt::divisor_count(n));
    const double a = std::abs(forms::coefficient(f, n));
    if (a > bound) ++violations;
    max_ratio = std::max(max_ratio, a / bound);
  }

  CheckResult r;
  r.id = "coefficients";
  r.measured = worst;
  r.tolerance = TOL_COEFF_REL;
  r.pass = worst <= TOL_COEFF_REL && violations == 0;
  r.detail = "recursion vs eta worst " + num(worst) + " at n=" +
             std::to_string(worst_n) + "; divisor-bound violations " +
             std::to_string(violations) + " (max |A|/d = " + num(max_ratio) +
             ")";
  return r;
}

// --------------------------------------------------------------------------
// moment decomposition: the four-piece split, the residue-class direct form,
// and the naive quadruple loop must agree pairwise

CheckResult check_decomposition(const CheckContext& ctx) {
  const auto& insts = active_instances(ctx);
  CheckResult r;
  r.id = "decomposition";
  r.tolerance = TOL_DECOMP_REL;
  if (insts.empty()) {
    r.detail = "no usable instances in configured grid";
    return r;
  }

  double worst = 0.0, worst_conj = 0.0;
  std::size_t empty_branch = 0;
  bool ok = true;
  for (const auto& in : insts) {
    const auto p = instance_params(in);
    const auto group = chars::character_group(in.Q);
    if (in.chi_index >= group.characters.size()) {
      ok = false;
      r.detail = "chi_index out of range at Q=" + std::to_string(in.Q);
      break;
    }
    const auto dec =
        amp::compute_decomposition(p, *ctx.f, group, in.chi_index, ctx.threads);
    const auto dir =
        amp::compute_S_direct(p, *ctx.f, group, in.chi_index, ctx.threads);
    const double oracle = brute_moment(p, *ctx.f, group, in.chi_index);

    const double total = dec.total().real();
    const double scale =
        std::max({std::abs(total), std::abs(dir.value), std::abs(oracle), 1e-12});
    worst = std::max(worst, std::abs(total - dir.value) / scale);
    worst = std::max(worst, std::abs(total - oracle) / scale);
    worst = std::max(worst, std::abs(dir.value - oracle) / scale);

    const double conj_err = std::abs(dec.S_o2 - std::conj(dec.S_o1)) /
                            std::max(1.0, std::abs(dec.S_o1));
    worst_conj = std::max(worst_conj, conj_err);

    if (dec.S_d1 < 0.0) ok = false;
    if (dec.off_diagonal_empty) {
      ++empty_branch;
      if (dec.S_o1 != cplx(0.0, 0.0) || dec.S_o2 != cplx(0.0, 0.0)) ok = false;
    }
  }
  r.measured = worst;
  r.pass = ok && worst <= TOL_DECOMP_REL && worst_conj <= TOL_CONJ_PAIR;
  r.detail = std::to_string(insts.size()) + " instances; worst pairwise rel " +
             num(worst) + "; worst |S_o2 - conj(S_o1)| rel " + num(worst_conj) +
             " (tol " + num(TOL_CONJ_PAIR) + "); off-diagonal-empty cases " +
             std::to_string(empty_branch);
  return r;
}

// --------------------------------------------------------------------------
// diagonal main term: the normalized diagonal grows like c log x with c the
// Rankin-Selberg constant, estimated independently from the pole probe

CheckResult check_diagonal_main(const CheckContext& ctx) {
  const auto& f = *ctx.f;
  const u64 Q = 11;
  const double G = 12.0;
  const std::vector<u64> window = {3, 5};
  const double alpha = amp::alpha_for(double(Q));
  const double phi = double(nt::euler_phi(Q));
  double suml = 0.0;
  for (u64 l : window) suml += std::pow(double(l), 2.0 * alpha);

  // The diagonal is separable: S_d1 = phi G (sum_l l^{2 alpha}) D(x) with
  // D(x) = sum_m A(m)^2 m^{-1} V(m/x)^2, so the normalized regression target
  // is D(x) itself. The small-x instance below ties this form back to the
  // full decomposition before the large-x points lean on it.
  auto D = [&](double x) {
    const u64 m_cap = u64(std::ceil(2.06 * x));
    NeumaierSum s;
    for (u64 m = 1; m <= m_cap; ++m) {
      const double a = forms::coefficient(f, m);
      const double v = special::kernel_V(double(m) / x);
      s.add(a * a / double(m) * v * v);
    }
    return s.value();
  };

  CheckInstance anchor{Q, 0.0, G, window, 100.0, 1};
  const auto p = instance_params(anchor);
  const auto group = chars::character_group(Q);
  const auto dec = amp::compute_decomposition(p, f, group, anchor.chi_index,
                                              ctx.threads);
  const double sep_100 = phi * G * suml * D(100.0);
  const double anchor_rel =
      std::abs(dec.S_d1 - sep_100) / std::max(1.0, std::abs(dec.S_d1));

  std::vector<double> lx, dy;
  for (double e : {2.0, 2.5, 3.0, 3.5, 4.0}) {
    const double x = std::pow(10.0, e);
    lx.push_back(std::log(x));
    dy.push_back(D(x));
  }
  const double slope = fit_slope(lx, dy);
  const double c = forms::rankin_probe(f, 0.05, 100000);

  CheckResult r;
  r.id = "diagonal_main";
  r.measured = std::abs(slope - c) / std::abs(c);
  r.tolerance = TOL_DIAGONAL_SLOPE;
  r.pass = r.measured <= r.tolerance && anchor_rel <= TOL_DECOMP_REL;
  r.detail = "Q=11 slope " + num(slope) + " vs probe c " + num(c) +
             "; decomposition anchor rel " + num(anchor_rel);
  return r;
}

// --------------------------------------------------------------------------
// Euler-product ratios at s = 2 against the Richardson limit of smooth
// truncated Dirichlet quotients (sharp truncation cannot reach 1e-8; its
// tail is O(1/M) by the linear growth of both counting functions)

CheckResult check_euler_ratios(const CheckContext& ctx) {
  const auto& f = *ctx.f;
  std::vector<u64> primes;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19})
    if (f.level % p != 0) primes.push_back(p);

  // pair-independent pieces of the three smoothed sums
  const double M1 = 12000.0;
  std::vector<std::vector<double>> weight(3);
  double den[3];
  for (int i = 0; i < 3; ++i) {
    const double M = M1 * double(1 << i);
    const u64 m_max = u64(std::ceil(2.06 * M));
    weight[i].resize(m_max + 1, 0.0);
    NeumaierSum d;
    for (u64 m = 1; m <= m_max; ++m) {
      const double v = special::kernel_V(double(m) / M);
      weight[i][m] = v * v / (double(m) * double(m));
      const double a = forms::coefficient(f, m);
      d.add(a * a * weight[i][m]);
    }
    den[i] = d.value();
  }

  double worst = 0.0;
  u64 wl1 = 0, wl2 = 0;
  std::size_t pairs = 0;
  for (u64 l1 : primes)
    for (u64 l2 : primes) {
      if (l1 == l2) continue;
      ++pairs;
      double ratio[3];
      for (int i = 0; i < 3; ++i) {
        NeumaierSum n;
        for (u64 m = 1; m < weight[i].size(); ++m)
          n.add(coeff_l_times(f, l1, m) * coeff_l_times(f, l2, m) *
                weight[i][m]);
        ratio[i] = n.value() / den[i];
      }
      // r(M) = R + b/M + c/M^2 solved through M, 2M, 4M
      const double d1 = ratio[0] - ratio[1], d2 = ratio[1] - ratio[2];
      const double cc = (d1 - 2.0 * d2) * 8.0 * M1 * M1 / 3.0;
      const double bb = 4.0 * M1 * (d2 - 3.0 * cc / (16.0 * M1 * M1));
      const double limit = ratio[2] - bb / (4.0 * M1) - cc / (16.0 * M1 * M1);

      const cplx got = forms::euler_ratio(f, l1, l2, 2.0);
      const double err = std::abs(got.real() - limit) /
                         std::max(1.0, std::abs(got.real()));
      if (err > worst || std::abs(got.imag()) > worst) {
        worst = std::max(err, std::abs(got.imag()));
        wl1 = l1;
        wl2 = l2;
      }
    }

  CheckResult r;
  r.id = "euler_ratios";
  r.measured = worst;
  r.tolerance = TOL_EULER_REL;
  r.pass = worst <= TOL_EULER_REL;
  r.detail = std::to_string(pairs) + " ordered pairs; worst " + num(worst) +
             " at (" + std::to_string(wl1) + ", " + std::to_string(wl2) + ")";
  return r;
}

// --------------------------------------------------------------------------
// kernel-replacement rate on the frozen off-diagonal slice: the fitted decay
// of |T - T~|/|T~| against G must sit in a band around -1/2

CheckResult check_smoothing_rate(const CheckContext&) {
  auto& f = builtin_delta_1e5();
  const std::vector<double> G_list = {32, 64, 128, 256, 512, 1024};
  const auto cmp = amp::compare_T_smoothing(f, 2, 3, 5, G_list, 2000.0, 0.0);

  bool usable = true;
  std::string rels;
  for (const auto& pt : cmp.points) {
    if (pt.skipped) usable = false;
    if (!rels.empty()) rels += ",";
    rels += num(pt.rel_err);
  }

  CheckResult r;
  r.id = "smoothing_rate";
  r.measured = std::abs(cmp.fitted_slope - SMOOTHING_CENTER);
  r.tolerance = SMOOTHING_HALF_WIDTH;
  r.pass = usable && r.measured <= r.tolerance;
  r.detail = "l1=2 l2=3 Q=5 x=2000: slope " + num(cmp.fitted_slope) +
             ", band [-0.65, -0.35]; rel errs " + rels;
  return r;
}

// --------------------------------------------------------------------------
// negative-binomial Mellin identity on the 3 x 3 x 3 parameter grid

CheckResult check_beta_mellin(const CheckContext&) {
  double worst = 0.0;
  std::string at;
  for (double t : {0.2, 1.0, 5.0})
    for (double br : {0.8, 1.5, 2.5})
      for (double bi : {0.0, 1.0, 2.0}) {
        const auto [lhs, rhs] =
            special::beta_mellin_identity(t, cplx(br, bi), 0.5 * br);
        const double err = std::abs(lhs - rhs);
        if (err > worst) {
          worst = err;
          at = "t=" + num(t) + " beta=" + num(br) + "+" + num(bi) + "i";
        }
      }
  CheckResult r;
  r.id = "beta_mellin";
  r.measured = worst;
  r.tolerance = TOL_BETA_MELLIN;
  r.pass = worst <= TOL_BETA_MELLIN;
  r.detail = "27 grid points; worst " + num(worst) + " at " + at;
  return r;
}

// --------------------------------------------------------------------------
// residue constants and cusp products: tables as limits of the generic
// formula, the generic formula against contour residues, and the exact
// rational cusp values

CheckResult check_appendix_values(const CheckContext& ctx) {
  using spectral::Rational;
  bool ok = true;
  std::string fail;

  // the two closed-form anchors
  const double root = std::sqrt(PI / 2.0);
  if (std::abs(spectral::c_r_residue(0, cplx(0.5, 0.0), 1).real() - root) >
      1e-14 * root)
    ok = false, fail += "[c0(+1/2)]";
  if (std::abs(spectral::c_r_residue(0, cplx(-0.5, 0.0), 1).real() + root) >
      1e-14 * root)
    ok = false, fail += "[c0(-1/2)]";

  // tables as limits: quadratic extrapolation through offsets 1e-2..1e-4
  const double eps[3] = {1e-2, 1e-3, 1e-4};
  double worst_rich = 0.0;
  for (unsigned r = 0; r <= 3; ++r)
    for (int side = 0; side < 2; ++side) {
      const double xi0 = side == 0 ? 0.5 : -0.5;
      cplx lim = 0.0;
      for (int i = 0; i < 3; ++i) {
        double wgt = 1.0;
        for (int j = 0; j < 3; ++j)
          if (j != i) wgt *= (0.0 - eps[j]) / (eps[i] - eps[j]);
        const double xi = xi0 - (side == 0 ? eps[i] : -eps[i]);
        lim += wgt * spectral::c_r_residue(r, cplx(xi, 0.0), 1);
      }
      const cplx tab = spectral::c_r_residue(r, cplx(xi0, 0.0), 1);
      worst_rich =
          std::max(worst_rich, std::abs(lim - tab) / std::abs(tab));
    }
  if (worst_rich > TOL_RESIDUE_TABLE) ok = false, fail += "[richardson]";

  // generic formula vs numeric contour residues of the closed form M
  std::mt19937 rng(ctx.seed);
  std::uniform_real_distribution<double> re(-0.45, 0.45), im(0.1, 0.6);
  double worst_cont = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const unsigned r = unsigned(rng() % 4);
    const int sign = (trial % 2 == 0) ? 1 : -1;
    const cplx z(re(rng), im(rng));
    const cplx center = cplx(0.5, 0.0) + double(sign) * z - double(r);
    const double rad = 1e-3;
    const int n = 256;
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * PI * double(j) / n;
      const cplx dir(std::cos(th), std::sin(th));
      acc += spectral::m_closed_form(center + rad * dir, z) * rad * dir;
    }
    acc /= double(n);
    const cplx expect = spectral::c_r_residue(r, z, sign);
    worst_cont = std::max(worst_cont, std::abs(acc - expect) / std::abs(expect));
  }
  if (worst_cont > TOL_RESIDUE_CONTOUR) ok = false, fail += "[contour]";

  // exact rational cusp products; the second family sits on the continued line
  struct Cusp {
    u64 N;
    long long den;
  };
  for (const auto& [N, den] : {Cusp{1, 1}, Cusp{6, 12}, Cusp{30, 72}})
    for (u64 w = 1; w <= N; ++w) {
      if (N % w != 0) continue;
      if (!(spectral::kappa_exact(N, w, 7, 1, -1) == Rational(1, den)))
        ok = false, fail += "[kappa N=" + std::to_string(N) + "]";
    }
  for (u64 N : {1ull, 6ull, 30ull})
    if (!(spectral::kappa_exact(N, 1, 7, 1, 1) == Rational(1)))
      ok = false, fail += "[kappa cusp0 N=" + std::to_string(N) + "]";

  CheckResult r;
  r.id = "appendix_values";
  r.measured = worst_cont;
  r.tolerance = TOL_RESIDUE_CONTOUR;
  r.pass = ok;
  r.detail = "anchors exact; richardson worst " + num(worst_rich) + " (tol " +
             num(TOL_RESIDUE_TABLE) + "); contour worst " + num(worst_cont) +
             " over 20 seeded points; cusp rationals exact" +
             (fail.empty() ? "" : "; FAILED " + fail);
  return r;
}

// --------------------------------------------------------------------------
// Mellin pair: the numeric inverse transform of v must reproduce V, and must
// not care which admissible vertical line carries the contour

CheckResult check_mellin_pair(const CheckContext&) {
  double worst = 0.0, worst_shift = 0.0;
  for (double x : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const cplx a2 = special::inverse_mellin(special::kernel_v_line(2.0), 2.0, x);
    const cplx a3 = special::inverse_mellin(special::kernel_v_line(3.0), 3.0, x);
    worst = std::max(worst, std::abs(a2 - cplx(special::kernel_V(x))));
    worst_shift = std::max(worst_shift, std::abs(a2 - a3));
  }
  CheckResult r;
  r.id = "mellin_pair";
  r.measured = worst;
  r.tolerance = TOL_MELLIN_PAIR;
  r.pass = worst <= TOL_MELLIN_PAIR && worst_shift <= TOL_MELLIN_SHIFT;
  r.detail = "five abscissae; worst vs V " + num(worst) +
             "; worst contour shift " + num(worst_shift) + " (tol " +
             num(TOL_MELLIN_SHIFT) + ")";
  return r;
}

// --------------------------------------------------------------------------
// amplifier inequality: dropping every character but one from the averaged
// second moment can only lose mass; checked with the smoothed evaluator on
// both sides at the same x

CheckResult check_amplifier_inequality(const CheckContext& ctx) {
  const auto& insts = active_instances(ctx);
  CheckResult r;
  r.id = "amplifier_inequality";
  r.tolerance = 0.0;
  if (insts.empty()) {
    r.detail = "no usable instances in configured grid";
    return r;
  }
  bool ok = true;
  double min_margin = 1.0;
  for (const auto& in : insts) {
    const auto p = instance_params(in);
    const auto group = chars::character_group(in.Q);
    const double xL = 3.0 * double(in.Q) * (1.0 + std::abs(in.t));
    const auto chk =
        amp::amplifier_inequality_check(p, *ctx.f, group, in.chi_index, xL);
    if (!chk.holds) ok = false;
    if (chk.rhs > 0.0)
      min_margin = std::min(min_margin, (chk.rhs - chk.lhs) / chk.rhs);
  }
  r.measured = min_margin;
  r.pass = ok;
  r.detail = std::to_string(insts.size()) +
             " instances; holds on all; min relative margin " +
             num(min_margin);
  if (!ok) r.detail = std::to_string(insts.size()) + " instances; VIOLATED";
  return r;
}

// --------------------------------------------------------------------------
// shifted-convolution series: doubling the truncation box must stay inside
// the previously certified tail, and the (1e4, 1e4) tail must be < 1e-8

CheckResult check_zq_consistency(const CheckContext& ctx) {
  spectral::ShiftedConvolutionPoint lo, hi, big;
  lo.s = hi.s = big.s = cplx(3.0, 0.0);
  lo.w = hi.w = big.w = cplx(3.0, 0.0);
  lo.m_max = lo.h_max = 1000;
  hi.m_max = hi.h_max = 2000;
  big.m_max = big.h_max = 10000;
  spectral::z_q_direct(lo, *ctx.f, ctx.threads);
  spectral::z_q_direct(hi, *ctx.f, ctx.threads);
  spectral::z_q_direct(big, *ctx.f, ctx.threads);

  const double change = std::abs(hi.value - lo.value);
  CheckResult r;
  r.id = "zq_consistency";
  r.measured = big.tail_bound;
  r.tolerance = TOL_ZQ_TAIL;
  r.pass = change < lo.tail_bound && big.tail_bound < TOL_ZQ_TAIL;
  r.detail = "(s,w)=(3,3) l1=2 l2=3 Q=5; doubling change " + num(change) +
             " vs certified tail " + num(lo.tail_bound) + "; tail(1e4,1e4) " +
             num(big.tail_bound) + "; value " + num(big.value.real());
  return r;
}

std::vector<CheckResult> run_suite(const std::string& suite,
                                   const CheckContext& ctx) {
  using Fn = CheckResult (*)(const CheckContext&);
  std::vector<Fn> fns;
  if (suite == "identities") {
    fns = {check_orthogonality, check_coefficients, check_beta_mellin,
           check_mellin_pair};
  } else if (suite == "decomposition") {
    fns = {check_decomposition, check_diagonal_main, check_euler_ratios,
           check_amplifier_inequality};
  } else if (suite == "smoothing") {
    fns = {check_smoothing_rate};
  } else if (suite == "appendix") {
    fns = {check_appendix_values, check_zq_consistency};
  } else if (suite == "all") {
    fns = {check_orthogonality,        check_coefficients,
           check_decomposition,        check_diagonal_main,
           check_euler_ratios,         check_smoothing_rate,
           check_beta_mellin,          check_appendix_values,
           check_mellin_pair,          check_amplifier_inequality,
           check_zq_consistency};
  } else {
    throw std::invalid_argument(
        "unknown suite '" + suite +
        "'; expected identities, appendix, decomposition, smoothing, or all");
  }
  std::vector<CheckResult> out;
  out.reserve(fns.size());
  for (Fn fn : fns) out.push_back(fn(ctx));
  return out;
}

} // namespace twistlab::cli
