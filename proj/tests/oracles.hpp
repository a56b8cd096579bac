#pragma once

// Independent cross-checks used by the unit tests and the acceptance gate.
// Everything here recomputes quantities from first principles, on purpose:
// none of it may call the code path it is checking.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "twistlab/defs.hpp"
#include "twistlab/forms.hpp"
#include "twistlab/special.hpp"
#include "twistlab/summation.hpp"

namespace oracles {

using twistlab::cplx;
using twistlab::u64;

// A(l * m) assembled without ever indexing past the dense table: strip the
// l-part of m, then multiply the prime-power value at l^{e+1} by the dense
// coprime rest.
inline double coeff_l_times(const twistlab::forms::HeckeEigenform& f, u64 l,
                            u64 m) {
  int e = 0;
  u64 rest = m;
  while (rest % l == 0) {
    rest /= l;
    ++e;
  }
  u64 lp = l;
  for (int i = 0; i < e; ++i) lp *= l;
  return twistlab::forms::coefficient(f, lp) *
         twistlab::forms::coefficient(f, rest);
}

struct EulerRatioOracle {
  double extrapolated = 0.0; // Richardson limit of the smoothed ratio
  double sharp_1e5 = 0.0;    // plain truncation at M = 1e5, ~1e-5 accurate
};

// Ratio of sum A(l2 m) A(l1 m) m^{-2} to sum A(m)^2 m^{-2}, taken to its
// M -> infinity limit. Sharp truncation at M leaves a deterministic c/M tail
// in both sums (their counting functions grow linearly), so the smoothed
// ratio with V(m/M)^2 weights is computed at M, 2M, 4M and the exact 3-point
// model r(M) = R + b/M + c/M^2 is solved for R. The smooth cutoff also kills
// the oscillatory part of the tail that a sharp cutoff would keep at ~1e-8.
inline EulerRatioOracle brute_euler_ratio_s2(
    const twistlab::forms::HeckeEigenform& f, u64 l1, u64 l2) {
  using twistlab::NeumaierSum;
  const double M1 = 12000.0;
  double r[3];
  for (int i = 0; i < 3; ++i) {
    const double M = M1 * double(1 << i);
    const u64 m_max = u64(std::ceil(2.06 * M));
    NeumaierSum num, den;
    for (u64 m = 1; m <= m_max; ++m) {
      const double w = twistlab::special::kernel_V(double(m) / M);
      const double w2 = w * w / (double(m) * double(m));
      num.add(coeff_l_times(f, l2, m) * coeff_l_times(f, l1, m) * w2);
      const double A = twistlab::forms::coefficient(f, m);
      den.add(A * A * w2);
    }
    r[i] = num.value() / den.value();
  }
  // r1 = R + b/M + c/M^2, r2 at 2M, r3 at 4M
  const double d1 = r[0] - r[1], d2 = r[1] - r[2];
  const double c = (d1 - 2.0 * d2) * 8.0 * M1 * M1 / 3.0;
  const double b = 4.0 * M1 * (d2 - 3.0 * c / (16.0 * M1 * M1));
  EulerRatioOracle out;
  out.extrapolated = r[2] - b / (4.0 * M1) - c / (16.0 * M1 * M1);

  NeumaierSum num, den;
  for (u64 m = 1; m <= 100000; ++m) {
    const double inv = 1.0 / (double(m) * double(m));
    num.add(coeff_l_times(f, l2, m) * coeff_l_times(f, l1, m) * inv);
    const double A = twistlab::forms::coefficient(f, m);
    den.add(A * A * inv);
  }
  out.sharp_1e5 = num.value() / den.value();
  return out;
}

} // namespace oracles
