#include "twistlab/amplifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "twistlab/lfunc.hpp"
#include "twistlab/ntheory.hpp"
#include "twistlab/special.hpp"
#include "twistlab/summation.hpp"

namespace twistlab::amp {

namespace {

// the m-dependent part of one bilinear-form term:
// A(m) m^{-1/2} V(m/x) e^{-i t~ log m}
struct MBase {
  double mag = 0.0;  // A(m) m^{-1/2} V(m/x), signed
  double logm = 0.0;
  cplx phase;        // e^{-i t~ log m}
};

std::vector<MBase> m_base_table(const forms::HeckeEigenform& f, u64 m_cap,
                                double x, double t_tilde) {
  std::vector<MBase> base(m_cap + 1);
  for (u64 m = 1; m <= m_cap; ++m) {
    const double A = forms::coefficient(f, m);
    const double lm = std::log(double(m));
    base[m].logm = lm;
    base[m].phase = std::exp(cplx(0.0, -t_tilde * lm));
    base[m].mag = A * std::exp(-0.5 * lm) * special::kernel_V(double(m) / x);
  }
  return base;
}

void validate_params(const AmplifierParams& p) {
  if (p.Q < 3) throw std::invalid_argument("amplifier: Q must be at least 3");
  if (!(p.G > 0) || !(p.x > 0))
    throw std::invalid_argument("amplifier: G and x must be positive");
}

double slope_of(const std::vector<double>& lx, const std::vector<double>& ly) {
  const double n = double(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

double alpha_for(double Q_eff) {
  if (!(Q_eff > 1.0))
    throw std::invalid_argument("alpha_for: needs Q(1+|t|) > 1");
  return 1.0 / std::log(Q_eff);
}

double amplitude_for(double Q_eff) {
  if (!(Q_eff > 1.0))
    throw std::invalid_argument("amplitude_for: needs Q(1+|t|) > 1");
  return std::sqrt(10.0 * std::log(Q_eff));
}

AmplifierParams derive_params(u64 Q, double t, double theta, DeriveMode mode,
                              const ParamOverrides& over) {
  if (Q < 3) throw std::invalid_argument("derive_params: Q must be at least 3");
  if (!(theta >= 0.0) || theta >= 0.5)
    throw std::invalid_argument("derive_params: theta must lie in [0, 1/2)");
  AmplifierParams p;
  p.Q = Q;
  p.t = t;
  p.level = over.level;
  p.theta = theta;
  const double Q_eff = double(Q) * (1.0 + std::abs(t));
  p.alpha = alpha_for(Q_eff);
  p.A = amplitude_for(Q_eff);
  p.a_exp = over.a_exp ? *over.a_exp : 2.0 / (3.0 - 2.0 * theta);
  p.r_offset = over.r_offset ? *over.r_offset : 0.0;
  if (std::abs(p.r_offset) > p.A)
    throw std::invalid_argument("derive_params: |r_offset| must stay within A");

  if (mode == DeriveMode::theorem) {
    const double logQ = std::log(double(Q));
    p.G = std::pow(1.0 + std::abs(t), p.a_exp) * std::pow(logQ, 5.0);
    p.G = std::max(p.G, 2.0 * p.A);
    p.L = std::pow(double(Q), 0.25);
  } else {
    if (!over.G || !over.L)
      throw std::invalid_argument("derive_params: manual mode needs G and L");
    p.G = *over.G;
    p.L = *over.L;
  }
  if (over.G) p.G = *over.G;
  if (over.L) p.L = *over.L;
  if (!(p.G > 0)) throw std::invalid_argument("derive_params: G must be positive");
  if (!(p.L > 0) || p.L >= double(Q))
    throw std::invalid_argument("derive_params: need 0 < L < Q");
  p.x = over.x ? *over.x : 3.0 * Q_eff;
  if (!(p.x > 0)) throw std::invalid_argument("derive_params: x must be positive");

  if (over.window) {
    p.window = *over.window;
    std::sort(p.window.begin(), p.window.end());
    for (u64 l : p.window) {
      if (!nt::is_prime(l))
        throw std::invalid_argument("derive_params: window entries must be prime");
      if (Q % l == 0 || p.level % l == 0)
        throw std::invalid_argument(
            "derive_params: window primes must be coprime to Q and the level");
    }
  } else {
    p.window = nt::primes_in_window(p.L, 2.0 * p.L, Q * p.level);
  }
  p.window_empty = p.window.empty();
  if (p.window_empty)
    p.warning = "amplifier window (L, 2L] contains no usable primes";
  return p;
}

double cauchy_kernel_mass(double G, double theta_log) {
  if (!(G > 0))
    throw std::invalid_argument("cauchy_kernel_mass: G must be positive");
  return G * std::exp(-G * std::abs(theta_log));
}

SDirectResult compute_S_direct(const AmplifierParams& p,
                               const forms::HeckeEigenform& f,
                               const chars::CharacterGroup& group,
                               std::size_t chi_index, int threads) {
  validate_params(p);
  if (group.Q != p.Q)
    throw std::invalid_argument("compute_S_direct: character group modulus != Q");
  const auto& chi = group.characters.at(chi_index);

  SDirectResult out;
  if (p.window.empty()) return out;

  const u64 m_cap = u64(std::ceil(2.06 * p.x));
  const auto base = m_base_table(f, m_cap, p.x, p.t_tilde());

  struct Term {
    u64 cls;
    u64 n;
    double logn;
    cplx w;
  };
  std::vector<Term> terms;
  terms.reserve(p.window.size() * m_cap);
  for (u64 l : p.window) {
    const cplx chibar = std::conj(chars::evaluate(group, chi, l));
    const double lfac = std::pow(double(l), p.alpha);
    const double logl = std::log(double(l));
    for (u64 m = 1; m <= m_cap; ++m) {
      if (base[m].mag == 0.0) continue;
      Term tm;
      tm.n = m * l;
      tm.cls = tm.n % p.Q;
      tm.logn = base[m].logm + logl;
      tm.w = base[m].mag * lfac * chibar * base[m].phase;
      terms.push_back(tm);
    }
  }
  out.term_count = terms.size();
  if (terms.empty()) return out;

  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    if (a.cls != b.cls) return a.cls < b.cls;
    return a.n < b.n;
  });

  // contiguous runs share a residue class
  std::vector<std::pair<u64, u64>> runs;
  for (u64 i = 0; i < terms.size();) {
    u64 j = i + 1;
    while (j < terms.size() && terms[j].cls == terms[i].cls) ++j;
    runs.emplace_back(i, j);
    i = j;
  }

  u64 raw_pairs = 0;
  for (auto [lo, hi] : runs) {
    const u64 len = hi - lo;
    raw_pairs += len * (len - 1) / 2;
  }
  if (raw_pairs > 1000000000ull)
    throw std::invalid_argument(
        "compute_S_direct: same-class pair count exceeds 1e9; lower x or "
        "raise Q");

  std::atomic<u64> kept{0}, cut{0};
  const double G = p.G;
  auto run_sum = [&](std::size_t rlo, std::size_t rhi) -> cplx {
    NeumaierSum acc;
    u64 local_kept = 0, local_cut = 0;
    for (std::size_t r = rlo; r < rhi; ++r) {
      const auto [lo, hi] = runs[r];
      for (u64 i = lo; i < hi; ++i) {
        acc.add(std::norm(terms[i].w));
        u64 j = i + 1;
        for (; j < hi; ++j) {
          const double dlog = terms[j].logn - terms[i].logn;
          if (G * dlog > KERNEL_LOG_CUT) break;
          const cplx prod = terms[i].w * std::conj(terms[j].w);
          acc.add(2.0 * prod.real() * std::exp(-G * dlog));
          ++local_kept;
        }
        local_cut += (hi - j);
      }
    }
    kept.fetch_add(local_kept, std::memory_order_relaxed);
    cut.fetch_add(local_cut, std::memory_order_relaxed);
    return {acc.value(), 0.0};
  };
  const cplx folded = parallel_reduce_blocks(
      runs.size(), 16, threads < 1 ? 1u : unsigned(threads), run_sum);

  const double phi = double(nt::euler_phi(p.Q));
  out.value = phi * G * folded.real();
  out.pair_count = kept.load() + cut.load();
  out.pairs_cut = cut.load();

  // small instances get an order-independent all-pairs recomputation with
  // plain accumulation; anything beyond ~2e7 pair visits is skipped
  if (out.term_count <= 4500) {
    double naive = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      naive += std::norm(terms[i].w);
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        if (terms[i].cls != terms[j].cls) continue;
        const double dlog = std::abs(terms[j].logn - terms[i].logn);
        if (G * dlog > KERNEL_LOG_CUT) continue;
        naive += 2.0 * (terms[i].w * std::conj(terms[j].w)).real() *
                 std::exp(-G * dlog);
      }
    }
    naive *= phi * G;
    out.cross_checked = true;
    out.cross_check_rel_err =
        std::abs(naive - out.value) / std::max(std::abs(out.value), 1e-300);
  }
  return out;
}

MomentDecomposition compute_decomposition(const AmplifierParams& p,
                                          const forms::HeckeEigenform& f,
                                          const chars::CharacterGroup& group,
                                          std::size_t chi_index, int threads) {
  validate_params(p);
  if (group.Q != p.Q)
    throw std::invalid_argument(
        "compute_decomposition: character group modulus != Q");
  const auto& chi = group.characters.at(chi_index);

  MomentDecomposition out;
  const u64 m_cap = u64(std::ceil(2.06 * p.x));
  out.trunc.m_cap = m_cap;
  if (p.window.empty()) {
    out.off_diagonal_empty = true;
    return out;
  }

  const double G = p.G;
  const double phi = double(nt::euler_phi(p.Q));
  const double t_tilde = p.t_tilde();
  const auto base = m_base_table(f, m_cap, p.x, t_tilde);

  // S_d1: the chi- and t-free diagonal
  {
    NeumaierSum inner;
    for (u64 m = 1; m <= m_cap; ++m) inner.add(base[m].mag * base[m].mag);
    NeumaierSum lsum;
    for (u64 l : p.window) lsum.add(std::pow(double(l), 2.0 * p.alpha));
    out.S_d1 = phi * G * lsum.value() * inner.value();
  }

  struct LPair {
    u64 l1, l2;
    cplx pre; // conj(chi(l1)) chi(l2) (l1 l2)^alpha
  };
  std::vector<LPair> pairs;
  for (u64 l1 : p.window)
    for (u64 l2 : p.window) {
      LPair lp;
      lp.l1 = l1;
      lp.l2 = l2;
      lp.pre = std::conj(chars::evaluate(group, chi, l1)) *
               chars::evaluate(group, chi, l2) *
               std::pow(double(l1) * double(l2), p.alpha);
      pairs.push_back(lp);
    }

  // S_d2: remaining diagonal, m1 l1 = m2 l2 via m1 = l2 m, m2 = l1 m
  {
    NeumaierCplx acc;
    for (const auto& lp : pairs) {
      if (lp.l1 == lp.l2) continue;
      const double ll1 = std::log(double(lp.l1)), ll2 = std::log(double(lp.l2));
      const cplx lfac = std::exp(cplx(-0.5 * ll2, -t_tilde * ll2)) *
                        std::exp(cplx(-0.5 * ll1, t_tilde * ll1));
      NeumaierSum inner;
      const u64 cap = m_cap / std::max(lp.l1, lp.l2);
      for (u64 m = 1; m <= cap; ++m) {
        const double a1 = forms::coefficient(f, lp.l2 * m);
        const double a2 = forms::coefficient(f, lp.l1 * m);
        if (a1 == 0.0 || a2 == 0.0) continue;
        inner.add(a1 * a2 / double(m) *
                  special::kernel_V(double(lp.l2 * m) / p.x) *
                  special::kernel_V(double(lp.l1 * m) / p.x));
      }
      acc.add(lp.pre * lfac * inner.value());
    }
    out.S_d2 = phi * G * acc.value();
  }

  // off-diagonal reach: n = m l <= m_cap * max l; h >= 1 needs n1 - n2 = hQ
  const u64 max_l = p.window.back();
  out.off_diagonal_empty = double(p.Q) >= double(m_cap) * double(max_l);

  std::atomic<u64> h_max{0}, chains_cut{0};
  std::atomic<double> dropped{0.0};
  double max_abs_base = 0.0;
  for (u64 m = 1; m <= m_cap; ++m)
    max_abs_base = std::max(max_abs_base, std::abs(base[m].mag));

  // S_o1 (m1 l1 = m2 l2 + hQ) and S_o2 (m2 l2 = m1 l1 + hQ), enumerated
  // separately so their conjugate symmetry stays a checkable output.
  // Work units: one (l1, l2) pair x one m-chunk of 2048.
  const u64 chunk = 2048;
  const u64 m_chunks = (m_cap + chunk - 1) / chunk;
  const std::size_t units = pairs.size() * m_chunks;
  const unsigned nthreads = threads < 1 ? 1u : unsigned(threads);

  auto off_diag = [&](bool mirror) {
    auto unit_sum = [&](std::size_t ulo, std::size_t uhi) -> cplx {
      NeumaierCplx acc;
      u64 local_hmax = 0, local_cut = 0;
      double local_drop = 0.0;
      for (std::size_t u = ulo; u < uhi; ++u) {
        const auto& lp = pairs[u / m_chunks];
        const u64 m_lo = (u % m_chunks) * chunk + 1;
        const u64 m_hi = std::min(m_cap, m_lo + chunk - 1);
        // near side: the term whose n the shift hQ is added to
        const u64 l_near = mirror ? lp.l1 : lp.l2;
        const u64 l_far = mirror ? lp.l2 : lp.l1;
        for (u64 m = m_lo; m <= m_hi; ++m) {
          if (base[m].mag == 0.0) continue;
          const u64 n_near = m * l_near;
          // conj side of the pairing carries e^{+i t~ log m}
          const cplx b_near = mirror ? base[m].mag * base[m].phase
                                     : base[m].mag * std::conj(base[m].phase);
          for (u64 h = 1;; ++h) {
            const u64 n_far = n_near + h * p.Q;
            if (n_far > m_cap * l_far) break;
            const double log_ratio = std::log1p(double(h * p.Q) / double(n_near));
            if (G * log_ratio > KERNEL_LOG_CUT) {
              ++local_cut;
              local_drop += std::exp(-KERNEL_LOG_CUT) * std::abs(base[m].mag) *
                            max_abs_base;
              break;
            }
            if (n_far % l_far != 0) continue;
            const u64 m_far = n_far / l_far;
            if (base[m_far].mag == 0.0) continue;
            local_hmax = std::max(local_hmax, h);
            const cplx b_far = mirror
                                   ? base[m_far].mag * std::conj(base[m_far].phase)
                                   : base[m_far].mag * base[m_far].phase;
            acc.add(lp.pre * b_far * b_near * std::exp(-G * log_ratio));
          }
        }
      }
      u64 seen = h_max.load(std::memory_order_relaxed);
      while (local_hmax > seen &&
             !h_max.compare_exchange_weak(seen, local_hmax)) {
      }
      chains_cut.fetch_add(local_cut, std::memory_order_relaxed);
      double d = dropped.load(std::memory_order_relaxed);
      while (!dropped.compare_exchange_weak(d, d + local_drop)) {
      }
      return acc.value();
    };
    return parallel_reduce_blocks(units, 4, nthreads, unit_sum);
  };

  out.S_o1 = phi * G * off_diag(false);
  out.S_o2 = phi * G * off_diag(true);
  out.trunc.h_max_seen = h_max.load();
  out.trunc.chains_cut = chains_cut.load();
  out.trunc.dropped_bound = phi * G * dropped.load();
  return out;
}

Sd1Prediction predict_S_d1(const AmplifierParams& p, double c) {
  if (!(c > 0))
    throw std::invalid_argument("predict_S_d1: c must be positive");
  NeumaierSum lsum;
  for (u64 l : p.window) lsum.add(std::pow(double(l), 2.0 * p.alpha));
  Sd1Prediction out;
  out.main = double(nt::euler_phi(p.Q)) * p.G * lsum.value() * c *
             std::log(p.x);
  out.error_envelope =
      double(p.Q) * p.G * std::pow(p.L, 1.0 + 2.0 * p.alpha);
  return out;
}

cplx predict_S_d2_main(const AmplifierParams& p,
                       const forms::HeckeEigenform& f,
                       const chars::CharacterGroup& group,
                       std::size_t chi_index, double c) {
  if (!(c > 0))
    throw std::invalid_argument("predict_S_d2_main: c must be positive");
  const auto& chi = group.characters.at(chi_index);
  const double t_tilde = p.t_tilde();
  NeumaierCplx acc;
  for (u64 l1 : p.window)
    for (u64 l2 : p.window) {
      if (l1 == l2) continue;
      const double ll1 = std::log(double(l1)), ll2 = std::log(double(l2));
      const cplx coef = std::conj(chars::evaluate(group, chi, l1)) *
                        chars::evaluate(group, chi, l2) *
                        std::pow(double(l1) * double(l2), p.alpha) *
                        std::exp(cplx(-0.5 * ll2, -t_tilde * ll2)) *
                        std::exp(cplx(-0.5 * ll1, t_tilde * ll1));
      const cplx E1 = forms::euler_ratio(f, l1, l2, 1.0);
      acc.add(coef * c * E1 * std::log(p.x / double(l2)));
    }
  return double(nt::euler_phi(p.Q)) * p.G * acc.value();
}

SmoothingComparison compare_T_smoothing(const forms::HeckeEigenform& f,
                                        u64 l1, u64 l2, u64 Q,
                                        const std::vector<double>& G_list,
                                        double x, double t) {
  if (G_list.size() < 4)
    throw std::invalid_argument("compare_T_smoothing: need at least 4 G values");
  for (std::size_t i = 0; i < G_list.size(); ++i) {
    if (!(G_list[i] >= 20.0))
      throw std::invalid_argument("compare_T_smoothing: every G must be >= 20");
    if (i > 0 && !(G_list[i] > G_list[i - 1]))
      throw std::invalid_argument("compare_T_smoothing: G list must increase");
  }
  if (!nt::is_prime(l1) || !nt::is_prime(l2))
    throw std::invalid_argument("compare_T_smoothing: l1 and l2 must be prime");
  if (!(x >= 10.0))
    throw std::invalid_argument("compare_T_smoothing: x must be at least 10");

  const u64 m_cap = u64(std::ceil(2.06 * x));
  std::vector<MBase> base;
  base.reserve(m_cap + 1);
  base = m_base_table(f, m_cap, x, t);

  SmoothingComparison out;
  std::vector<double> lg, le;
  for (double G : G_list) {
    SmoothingPoint pt;
    pt.G = G;
    NeumaierCplx T, Tt, Tsmall;
    for (u64 m2 = 1; m2 <= m_cap; ++m2) {
      if (base[m2].mag == 0.0) continue;
      const u64 n2 = m2 * l2;
      const cplx b2 = base[m2].mag * std::conj(base[m2].phase);
      for (u64 h = 1;; ++h) {
        const u64 n1 = n2 + h * Q;
        if (n1 > m_cap * l1) break;
        const double u = double(h * Q) / double(n2);
        const double log_ratio = std::log1p(u);
        if (G * log_ratio > KERNEL_LOG_CUT) break;
        if (n1 % l1 != 0) continue;
        const u64 m1 = n1 / l1;
        if (base[m1].mag == 0.0) continue;
        const cplx prod = base[m1].mag * base[m1].phase * b2;
        T.add(prod * std::exp(-G * log_ratio));
        Tt.add(prod * std::exp(-G * u));
        if (u >= 1.0) {
          ++pt.large_shift_count;
          pt.large_shift_abs_sum += std::abs(prod);
        } else {
          Tsmall.add(prod * std::exp(-G * log_ratio));
        }
      }
    }
    pt.T = T.value();
    pt.T_tilde = Tt.value();
    pt.T_small_shift = Tsmall.value();
    if (std::abs(pt.T_tilde) < 1e-100) {
      pt.skipped = true;
    } else {
      pt.rel_err = std::abs(pt.T - pt.T_tilde) / std::abs(pt.T_tilde);
      if (pt.rel_err > 0) {
        lg.push_back(std::log(G));
        le.push_back(std::log(pt.rel_err));
      }
    }
    out.points.push_back(pt);
  }
  if (lg.size() >= 2) out.fitted_slope = slope_of(lg, le);
  return out;
}

InequalityCheck amplifier_inequality_check(const AmplifierParams& p,
                                           const forms::HeckeEigenform& f,
                                           const chars::CharacterGroup& group,
                                           std::size_t chi_index, double x) {
  const auto& chi = group.characters.at(chi_index);
  InequalityCheck out;
  const double W = double(p.window.size());
  const cplx L_chi = lfunc::smoothed_L(f, group, chi_index, p.t, x);
  out.lhs = std::norm(L_chi) * W * W;
  NeumaierSum rhs;
  for (std::size_t psi = 0; psi < group.characters.size(); ++psi) {
    NeumaierCplx filt;
    for (u64 l : p.window)
      filt.add(std::conj(chars::evaluate(group, chi, l)) *
               chars::evaluate(group, group.characters.at(psi), l));
    const double weight = std::norm(filt.value());
    if (weight == 0.0) continue;
    rhs.add(std::norm(lfunc::smoothed_L(f, group, psi, p.t, x)) * weight);
  }
  out.rhs = rhs.value();
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

} // namespace twistlab::amp
