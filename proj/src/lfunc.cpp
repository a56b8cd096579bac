#include "twistlab/lfunc.hpp"

#include <cmath>
#include <stdexcept>

#include "twistlab/special.hpp"
#include "twistlab/summation.hpp"

namespace twistlab::lfunc {

namespace {

// n^{-s} through the real log; n is a positive integer so there is no
// branch choice to make
cplx int_pow_neg(u64 n, cplx s) {
  const double L = std::log(double(n));
  return std::exp(cplx(-s.real() * L, -s.imag() * L));
}

} // namespace

DirichletValue dirichlet_series(const forms::HeckeEigenform& f,
                                const chars::CharacterGroup& group,
                                std::size_t chi_index, cplx s, u64 n_max) {
  if (!(s.real() > 1.5))
    throw std::invalid_argument("dirichlet_series: Re s must exceed 3/2");
  if (n_max < 1)
    throw std::invalid_argument("dirichlet_series: n_max must be positive");
  const auto& chi = group.characters.at(chi_index);
  NeumaierCplx acc;
  for (u64 n = 1; n <= n_max; ++n) {
    const cplx c = chars::evaluate(group, chi, n);
    if (c == cplx(0.0)) continue;
    acc.add(forms::coefficient(f, n) * c * int_pow_neg(n, s));
  }
  const double sigma = s.real();
  // d(n) <= 2 sqrt(n), so the dropped mass is at most
  // 2 integral_{n_max}^{inf} u^{1/2-sigma} du plus one boundary term
  const double edge = 2.0 * std::pow(double(n_max), 1.5 - sigma);
  DirichletValue out;
  out.value = acc.value();
  out.tail_bound = edge / (sigma - 1.5) + edge;
  return out;
}

cplx smoothed_series(const forms::HeckeEigenform& f,
                     const std::function<cplx(u64)>& weight, cplx s,
                     double x) {
  if (!(x >= 10.0))
    throw std::invalid_argument("smoothed_series: x must be at least 10");
  const u64 n_max = u64(std::ceil(2.06 * x));
  NeumaierCplx acc;
  for (u64 n = 1; n <= n_max; ++n) {
    const cplx w = weight(n);
    if (w == cplx(0.0)) continue;
    const double V = special::kernel_V(double(n) / x);
    acc.add(forms::coefficient(f, n) * w * V * int_pow_neg(n, s));
  }
  return acc.value();
}

cplx smoothed_series(const forms::HeckeEigenform& f,
                     const chars::CharacterGroup& group, std::size_t chi_index,
                     cplx s, double x) {
  const auto& chi = group.characters.at(chi_index);
  return smoothed_series(
      f, [&](u64 n) { return chars::evaluate(group, chi, n); }, s, x);
}

cplx smoothed_L(const forms::HeckeEigenform& f,
                const chars::CharacterGroup& group, std::size_t chi_index,
                double t, double x) {
  return smoothed_series(f, group, chi_index, cplx(0.5, t), x);
}

ExponentFit exponent_fit(const std::vector<ExponentSample>& samples) {
  if (samples.size() < 8)
    throw std::invalid_argument("exponent_fit: need at least 8 samples");
  double q_lo = samples[0].Q, q_hi = q_lo;
  double t_lo = 1.0 + std::abs(samples[0].t), t_hi = t_lo;
  for (const auto& s : samples) {
    if (!(s.Q > 0) || !(s.abs_L > 0))
      throw std::invalid_argument(
          "exponent_fit: Q and |L| must be positive at every sample");
    q_lo = std::min(q_lo, s.Q);
    q_hi = std::max(q_hi, s.Q);
    const double u = 1.0 + std::abs(s.t);
    t_lo = std::min(t_lo, u);
    t_hi = std::max(t_hi, u);
  }
  if (q_hi < 10.0 * q_lo)
    throw std::invalid_argument("exponent_fit: Q must span a decade");
  if (t_hi < 10.0 * t_lo)
    throw std::invalid_argument("exponent_fit: 1+|t| must span a decade");

  // normal equations for y ~ b0 + b1 u + b2 v, u = log Q, v = log(1+|t|)
  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double rhs[3] = {0, 0, 0};
  double y_sum = 0.0;
  for (const auto& s : samples) {
    const double u = std::log(s.Q), v = std::log1p(std::abs(s.t));
    const double y = std::log(s.abs_L);
    const double row[3] = {1.0, u, v};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] += row[i] * row[j];
      rhs[i] += row[i] * y;
    }
    y_sum += y;
  }
  // Gaussian elimination with partial pivoting; the normal matrix of a sane
  // design has entries O(n log^2), so an absolute pivot floor works
  double b[3];
  {
    double a[3][4];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] = m[i][j];
      a[i][3] = rhs[i];
    }
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      if (std::abs(a[piv][col]) < 1e-9 * samples.size())
        throw std::invalid_argument(
            "exponent_fit: degenerate design matrix (collinear Q and t)");
      if (piv != col)
        for (int j = 0; j < 4; ++j) std::swap(a[col][j], a[piv][j]);
      for (int r = 0; r < 3; ++r) {
        if (r == col) continue;
        const double factor = a[r][col] / a[col][col];
        for (int j = col; j < 4; ++j) a[r][j] -= factor * a[col][j];
      }
    }
    for (int i = 0; i < 3; ++i) b[i] = a[i][3] / a[i][i];
  }

  const double y_mean = y_sum / double(samples.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& s : samples) {
    const double u = std::log(s.Q), v = std::log1p(std::abs(s.t));
    const double y = std::log(s.abs_L);
    const double pred = b[0] + b[1] * u + b[2] * v;
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - y_mean) * (y - y_mean);
  }
  ExponentFit out;
  out.slope_Q = b[1];
  out.slope_t = b[2];
  out.r2 = ss_tot < 1e-30 ? 1.0 : 1.0 - ss_res / ss_tot;
  return out;
}

} // namespace twistlab::lfunc
