#include "twistlab/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "twistlab/forms.hpp"

using namespace twistlab;
using spectral::Rational;

namespace {

forms::HeckeEigenform& delta() {
  static forms::HeckeEigenform f = [] {
    auto g = forms::builtin_delta();
    forms::materialize(g, 100000);
    return g;
  }();
  return f;
}

// plain double-loop reference: test the divisibility directly, sum in
// declaration order, no blocking
cplx brute_zq(const spectral::ShiftedConvolutionPoint& pt,
              const forms::HeckeEigenform& f) {
  const double k2 = (double(f.weight) - 1.0) / 2.0;
  cplx acc = 0.0;
  for (u64 h0 = 1; h0 <= pt.h_max; ++h0)
    for (u64 m2 = 1; m2 <= pt.m_max; ++m2) {
      const u64 n1 = m2 * pt.l2 + h0 * pt.Q;
      if (n1 % pt.l1 != 0) continue;
      const double n2 = double(m2) * double(pt.l2);
      const double hq = double(h0) * double(pt.Q);
      acc += forms::coefficient(f, n1 / pt.l1) * forms::coefficient(f, m2) *
             std::exp(k2 * std::log1p(hq / n2) - pt.s * std::log(n2) -
                      (pt.w + k2) * std::log(hq));
    }
  return acc;
}

// quadratic-through-three-points extrapolation to offset 0
cplx extrapolate3(const double* eps, const cplx* val) {
  cplx out = 0.0;
  for (int i = 0; i < 3; ++i) {
    double w = 1.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) w *= (0.0 - eps[j]) / (eps[i] - eps[j]);
    out += w * val[i];
  }
  return out;
}

} // namespace

// ---------------------------------------------------------------------------
// closed form of M

TEST_CASE("m_closed_form: value at (s, z) = (-1, 0)") {
  // sqrt(pi) 2^{3/2} Gamma(-3/2)^2 Gamma(2) / Gamma(1/2)^2
  //   = sqrt(pi) 2^{3/2} (16 pi / 9) / pi
  const auto v = spectral::m_closed_form(cplx(-1.0, 0.0), cplx(0.0, 0.0));
  CHECK(v.real() ==
        doctest::Approx(std::sqrt(PI) * std::pow(2.0, 1.5) * 16.0 / 9.0)
            .epsilon(1e-12));
  CHECK(std::abs(v.imag()) < 1e-12);
}

TEST_CASE("m_closed_form: even in z") {
  const cplx pts[][2] = {
      {cplx(-0.75, 0.3), cplx(0.4, 0.1)},
      {cplx(-2.2, -1.0), cplx(0.3, -0.7)},
      {cplx(0.2, 0.5), cplx(0.0, 1.3)},
  };
  for (const auto& p : pts) {
    const cplx a = spectral::m_closed_form(p[0], p[1]);
    const cplx b = spectral::m_closed_form(p[0], -p[1]);
    CHECK(std::abs(a - b) <= 1e-14 * std::abs(a));
  }
}

TEST_CASE("m_closed_form: pole guards name the factor") {
  CHECK_THROWS_WITH_AS(spectral::m_closed_form(cplx(1.0, 0.0), cplx(0.3, 0.0)),
                       doctest::Contains("Gamma(1 - s)"),
                       std::invalid_argument);
  // s - 1/2 + z = 0
  CHECK_THROWS_WITH_AS(spectral::m_closed_form(cplx(0.25, 0.0), cplx(0.25, 0.0)),
                       doctest::Contains("Gamma(s - 1/2 + z)"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(spectral::m_closed_form(cplx(0.25, 0.0), cplx(-0.25, 0.0)),
                       doctest::Contains("Gamma(s - 1/2 - z)"),
                       std::invalid_argument);
  // z = 1/2 kills Gamma(1/2 - z)
  CHECK_THROWS_WITH_AS(spectral::m_closed_form(cplx(-0.9, 0.0), cplx(0.5, 0.0)),
                       doctest::Contains("Gamma(1/2 - z)"),
                       std::invalid_argument);
}

// ---------------------------------------------------------------------------
// residue constants

TEST_CASE("c_r_residue: half-integer special values") {
  CHECK(spectral::c_r_residue(0, cplx(0.5, 0.0), 1).real() ==
        doctest::Approx(std::sqrt(PI / 2.0)).epsilon(1e-14));
  CHECK(spectral::c_r_residue(0, cplx(-0.5, 0.0), 1).real() ==
        doctest::Approx(-std::sqrt(PI / 2.0)).epsilon(1e-14));
  // sign flips reach the same table through -z
  CHECK(spectral::c_r_residue(0, cplx(-0.5, 0.0), -1).real() ==
        doctest::Approx(std::sqrt(PI / 2.0)).epsilon(1e-14));
  // r >= 1 rows of both tables
  CHECK(spectral::c_r_residue(2, cplx(0.5, 0.0), 1).real() ==
        doctest::Approx(std::pow(2.0, 1.5) * std::sqrt(PI) / 4.0).epsilon(1e-14));
  CHECK(spectral::c_r_residue(1, cplx(-0.5, 0.0), 1).real() ==
        doctest::Approx(-std::pow(2.0, 1.5) * std::sqrt(PI) / 4.0).epsilon(1e-14));
}

TEST_CASE("c_r_residue: special values are limits of the generic formula") {
  const double eps[3] = {1e-2, 1e-3, 1e-4};
  for (unsigned r = 0; r <= 3; ++r) {
    CAPTURE(r);
    cplx plus[3], minus[3];
    for (int i = 0; i < 3; ++i) {
      plus[i] = spectral::c_r_residue(r, cplx(0.5 - eps[i], 0.0), 1);
      minus[i] = spectral::c_r_residue(r, cplx(-0.5 + eps[i], 0.0), 1);
    }
    const cplx lim_p = extrapolate3(eps, plus);
    const cplx lim_m = extrapolate3(eps, minus);
    const cplx tab_p = spectral::c_r_residue(r, cplx(0.5, 0.0), 1);
    const cplx tab_m = spectral::c_r_residue(r, cplx(-0.5, 0.0), 1);
    CHECK(std::abs(lim_p - tab_p) <= 1e-4 * std::abs(tab_p));
    CHECK(std::abs(lim_m - tab_m) <= 1e-4 * std::abs(tab_m));
  }
}

TEST_CASE("c_r_residue: matches contour residues of m_closed_form") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> re(-0.45, 0.45), im(0.1, 0.6);
  for (int trial = 0; trial < 20; ++trial) {
    const unsigned r = unsigned(rng() % 4);
    const int sign = (trial % 2 == 0) ? 1 : -1;
    const cplx z(re(rng), im(rng));
    CAPTURE(trial);
    CAPTURE(r);
    CAPTURE(sign);
    // pole chain s = 1/2 +- z - r; every other pole is >= 0.1 away, so a
    // 1e-3 circle with trapezoid nodes converges geometrically
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
    CHECK(std::abs(acc - expect) <= 1e-6 * std::abs(expect));
  }
}

TEST_CASE("c_r_residue: pole handling") {
  CHECK_THROWS_AS(spectral::c_r_residue(0, cplx(0.5, 0.0), 2),
                  std::invalid_argument);
  // z = 3/2, r = 3: Gamma(2z - r) = Gamma(0) with no table coverage
  CHECK_THROWS_WITH_AS(spectral::c_r_residue(3, cplx(1.5, 0.0), 1),
                       doctest::Contains("no special-value coverage"),
                       std::invalid_argument);
  // z = 5/2, r = 3: only the denominator Gamma(1/2 - z) = Gamma(-2) poles,
  // so the quotient vanishes
  CHECK(spectral::c_r_residue(3, cplx(2.5, 0.0), 1) == cplx(0.0, 0.0));
  // near-special points between the snap and guard radii are rejected
  CHECK_THROWS_AS(spectral::c_r_residue(1, cplx(0.5 - 1e-9, 0.0), 1),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// kappa products

TEST_CASE("kappa_exact: value 1/prod(p+1) at (s', z) = (1/2, -1/2)") {
  // N = 1: empty product
  CHECK(spectral::kappa_exact(1, 1, 5, 1, -1) == Rational(1));
  CHECK(spectral::kappa_exact(1, 1, 35, 1, -1) == Rational(1));
  // N = 6: 1/((2+1)(3+1)), independent of the cusp
  for (u64 w : {1ull, 2ull, 3ull, 6ull})
    CHECK(spectral::kappa_exact(6, w, 5, 1, -1) == Rational(1, 12));
  // N = 30: 1/((2+1)(3+1)(5+1))
  for (u64 w : {1ull, 6ull, 10ull, 30ull})
    CHECK(spectral::kappa_exact(30, w, 7, 1, -1) == Rational(1, 72));
}

TEST_CASE("kappa_exact: cusp-0 value at z = 1/2 on the s' = 1 - z line") {
  for (u64 N : {1ull, 6ull, 30ull})
    for (u64 Q : {7ull, 11ull, 49ull})
      CHECK(spectral::kappa_exact(N, 1, Q, 1, 1) == Rational(1));
  // any other cusp vanishes identically on the line
  CHECK(spectral::kappa_exact(6, 2, 5, 1, 1) == Rational(0));
  CHECK(spectral::kappa_exact(30, 30, 7, 1, 1) == Rational(0));
}

TEST_CASE("kappa_exact: input rejection") {
  CHECK_THROWS_AS(spectral::kappa_exact(4, 1, 5, 1, -1), std::invalid_argument);
  CHECK_THROWS_AS(spectral::kappa_exact(6, 4, 5, 1, -1), std::invalid_argument);
  CHECK_THROWS_AS(spectral::kappa_exact(6, 1, 15, 1, -1), std::invalid_argument);
  CHECK_THROWS_AS(spectral::kappa_exact(6, 1, 5, 2, -1), std::invalid_argument);
  // z = 1/2 off the s' = 1 - z line has a genuine singularity
  CHECK_THROWS_WITH_AS(spectral::kappa_exact(6, 1, 5, 3, 1),
                       doctest::Contains("s' = 1 - z"), std::invalid_argument);
}

TEST_CASE("kappa: numeric product agrees with the exact rationals") {
  struct Pt {
    u64 N, w, Q;
    int ts, tz;
  };
  const Pt pts[] = {
      {1, 1, 5, 1, -1}, {6, 1, 5, 1, -1},  {6, 3, 5, 1, -1},
      {30, 10, 7, 1, -1}, {6, 2, 5, 3, -1}, {6, 6, 25, 5, -3},
  };
  for (const auto& q : pts) {
    CAPTURE(q.N);
    CAPTURE(q.ts);
    spectral::KappaParams kp;
    kp.N = q.N;
    kp.w = q.w;
    kp.Q = q.Q;
    kp.s_prime = cplx(0.5 * q.ts, 0.0);
    kp.z = cplx(0.5 * q.tz, 0.0);
    const cplx num = spectral::kappa(kp);
    const double exact = spectral::kappa_exact(q.N, q.w, q.Q, q.ts, q.tz).to_double();
    CHECK(num.real() == doctest::Approx(exact).epsilon(1e-12));
    CHECK(std::abs(num.imag()) <= 1e-12 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("kappa: singular factors are named") {
  spectral::KappaParams kp;
  kp.N = 6;
  kp.w = 1;
  kp.Q = 5;
  kp.s_prime = cplx(0.5, 0.0);
  kp.z = cplx(0.5, 0.0); // 1 - p^{-(1-2z)} = 0 for every p | N
  CHECK_THROWS_WITH_AS(spectral::kappa(kp), doctest::Contains("1 - p^{-(1-2z)}"),
                       std::invalid_argument);
  kp.z = cplx(0.0, 0.0); // 1 - p^{2z} = 0 for every p | Q
  CHECK_THROWS_WITH_AS(spectral::kappa(kp), doctest::Contains("1 - p^{2z}"),
                       std::invalid_argument);
  kp.z = cplx(0.3, 0.0);
  kp.w = 4;
  CHECK_THROWS_AS(spectral::kappa(kp), std::invalid_argument);
}

TEST_CASE("kappa_bound_probe: finite values and grid validation") {
  std::vector<double> grid;
  for (int j = 1; j <= 40; ++j) grid.push_back(0.05 * j);
  const double v1 = spectral::kappa_bound_probe(1, 1, 101, grid);
  const double v6 = spectral::kappa_bound_probe(6, 2, 101, grid);
  CHECK(v1 > 0.0);
  CHECK(std::isfinite(v1));
  CHECK(v6 > 0.0);
  CHECK(std::isfinite(v6));
  CHECK_THROWS_AS(spectral::kappa_bound_probe(1, 1, 101, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(spectral::kappa_bound_probe(1, 1, 101, {0.5, 1e-4}),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// shifted convolution series

TEST_CASE("z_q_direct: matches the brute double loop") {
  auto& f = delta();
  struct Pt {
    u64 l1, l2, Q;
    cplx s, w;
  };
  const Pt pts[] = {
      {2, 3, 5, cplx(3.0, 0.0), cplx(2.5, 0.0)},
      {3, 2, 7, cplx(2.5, 1.0), cplx(3.0, -2.0)},
      {2, 2, 5, cplx(3.0, 0.0), cplx(3.0, 0.0)}, // same prime thins the h-sum
      {5, 5, 10, cplx(2.5, 0.0), cplx(2.5, 0.0)}, // l | Q: every h survives
  };
  for (const auto& q : pts) {
    CAPTURE(q.l1);
    CAPTURE(q.Q);
    spectral::ShiftedConvolutionPoint pt;
    pt.s = q.s;
    pt.w = q.w;
    pt.l1 = q.l1;
    pt.l2 = q.l2;
    pt.Q = q.Q;
    pt.m_max = 200;
    pt.h_max = 150;
    const cplx v = spectral::z_q_direct(pt, f);
    const cplx ref = brute_zq(pt, f);
    CHECK(std::abs(v - ref) <= 1e-12 * std::abs(ref));
    CHECK(pt.note.empty());
    CHECK(pt.tail_bound > 0.0);
  }
}

TEST_CASE("z_q_direct: empty divisibility range is a note, not a value") {
  auto& f = delta();
  spectral::ShiftedConvolutionPoint pt;
  pt.s = cplx(3.0, 0.0);
  pt.w = cplx(3.0, 0.0);
  pt.l1 = 2;
  pt.l2 = 2;
  pt.Q = 5;       // l1 = l2 = 2 needs 2 | 5 h0, so h0 must be even
  pt.h_max = 1;   // ... and there is no even h0 <= 1
  pt.m_max = 50;
  CHECK(spectral::z_q_direct(pt, f) == cplx(0.0, 0.0));
  CHECK(!pt.note.empty());
}

TEST_CASE("z_q_direct: doubling stays inside the previously reported tail") {
  auto& f = delta();
  const cplx args[][2] = {
      {cplx(3.0, 0.0), cplx(3.0, 0.0)},
      {cplx(2.5, 0.0), cplx(2.5, 0.0)},
      {cplx(3.0, 2.0), cplx(2.5, -1.0)},
  };
  for (const auto& a : args) {
    CAPTURE(a[0].real());
    CAPTURE(a[1].real());
    spectral::ShiftedConvolutionPoint lo;
    lo.s = a[0];
    lo.w = a[1];
    lo.m_max = 1000;
    lo.h_max = 1000;
    auto hi = lo;
    hi.m_max = 2000;
    hi.h_max = 2000;
    spectral::z_q_direct(lo, f);
    spectral::z_q_direct(hi, f);
    CHECK(std::abs(hi.value - lo.value) < lo.tail_bound);
    CHECK(hi.tail_bound < lo.tail_bound);
  }
}

TEST_CASE("z_q_direct: converged value at the pinned (3,3) point" *
          doctest::timeout(60)) {
  auto& f = delta();
  spectral::ShiftedConvolutionPoint pt;
  pt.s = cplx(3.0, 0.0);
  pt.w = cplx(3.0, 0.0);
  pt.m_max = 10000;
  pt.h_max = 10000;
  spectral::z_q_direct(pt, f, 4);
  CHECK(pt.value.real() == doctest::Approx(-6.755812455297589e-06).epsilon(1e-9));
  CHECK(pt.value.imag() == 0.0);
  CHECK(pt.tail_bound < 1e-8);
}

TEST_CASE("z_q_direct: thread count does not change a single bit") {
  auto& f = delta();
  spectral::ShiftedConvolutionPoint a, b;
  a.s = b.s = cplx(2.5, 1.5);
  a.w = b.w = cplx(2.5, -0.5);
  a.m_max = b.m_max = 600;
  a.h_max = b.h_max = 600;
  const cplx va = spectral::z_q_direct(a, f, 1);
  const cplx vb = spectral::z_q_direct(b, f, 4);
  CHECK(va == vb);
}

TEST_CASE("z_q_direct: domain and input guards") {
  auto& f = delta();
  spectral::ShiftedConvolutionPoint pt;
  pt.s = cplx(2.4, 0.0);
  pt.w = cplx(3.0, 0.0);
  CHECK_THROWS_WITH_AS(spectral::z_q_direct(pt, f), doctest::Contains("2.5"),
                       std::invalid_argument);
  pt.s = cplx(3.0, 0.0);
  pt.w = cplx(2.4, 0.0);
  CHECK_THROWS_AS(spectral::z_q_direct(pt, f), std::invalid_argument);
  pt.w = cplx(3.0, 0.0);
  pt.l1 = 4;
  CHECK_THROWS_AS(spectral::z_q_direct(pt, f), std::invalid_argument);
  pt.l1 = 2;
  pt.h_max = 0;
  CHECK_THROWS_AS(spectral::z_q_direct(pt, f), std::invalid_argument);
}
