#include <doctest.h>

#include <cmath>
#include <random>

#include "twistlab/special.hpp"

using namespace twistlab;
using namespace twistlab::special;

namespace {

double rel_err(cplx got, cplx want) {
  return std::abs(got - want) / std::abs(want);
}

} // namespace

TEST_CASE("gamma at classical points") {
  CHECK(rel_err(complex_gamma(cplx(0.5, 0)), cplx(std::sqrt(PI), 0)) < 1e-14);
  CHECK(rel_err(complex_gamma(cplx(5, 0)), cplx(24, 0)) < 1e-14);
  CHECK(rel_err(complex_gamma(cplx(1, 0)), cplx(1, 0)) < 1e-14);
  // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y), an exact identity
  double got = std::abs(complex_gamma(cplx(0.5, 10)));
  double want = std::sqrt(PI / std::cosh(PI * 10));
  CHECK(std::abs(got - want) / want < 0.01);
  CHECK(std::abs(got - want) / want < 1e-12); // actually much better than 1%
}

TEST_CASE("gamma recurrence at random points") {
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> re(-50, 50), im(-50, 50);
  int tested = 0;
  while (tested < 1000) {
    cplx s(re(rng), im(rng));
    if (std::abs(s) > 50 || std::abs(s) < 0.1) continue;
    // keep away from poles so the relative comparison is meaningful
    if (s.imag() == 0 && s.real() <= 0) continue;
    if (std::abs(s.imag()) < 1e-3 && s.real() < 0.5) continue;
    cplx lhs = complex_gamma(s + 1.0);
    cplx rhs = s * complex_gamma(s);
    CHECK(rel_err(lhs, rhs) < 1e-11);
    ++tested;
  }
}

TEST_CASE("gamma reflection formula") {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> re(-40, 40), im(0.05, 40);
  for (int i = 0; i < 300; ++i) {
    cplx s(re(rng), im(rng));
    cplx lhs = complex_gamma(s) * complex_gamma(1.0 - s);
    cplx rhs = PI / std::sin(PI * s);
    CHECK(rel_err(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("gamma pole handling") {
  CHECK_THROWS_AS(complex_gamma(cplx(0, 0)), std::domain_error);
  CHECK_THROWS_AS(complex_gamma(cplx(-3, 0)), std::domain_error);
  CHECK_NOTHROW(complex_gamma(cplx(-3.0000001, 0)));
  CHECK_NOTHROW(complex_gamma(cplx(-3, 1e-9)));
}

TEST_CASE("zeta at classical points") {
  CHECK(rel_err(riemann_zeta(cplx(2, 0)), cplx(PI * PI / 6.0, 0)) < 1e-12);
  CHECK(std::abs(riemann_zeta(cplx(0, 0)) - cplx(-0.5, 0)) < 1e-12);
  CHECK(rel_err(riemann_zeta(cplx(3, 0)), cplx(1.2020569032, 0)) < 1e-10);
  CHECK(rel_err(riemann_zeta(cplx(4, 0)), cplx(std::pow(PI, 4) / 90.0, 0)) < 1e-12);
  // functional-equation side
  CHECK(rel_err(riemann_zeta(cplx(-1, 0)), cplx(-1.0 / 12.0, 0)) < 1e-10);
  CHECK(std::abs(riemann_zeta(cplx(-2, 0))) < 1e-14); // trivial zero
  CHECK_THROWS_AS(riemann_zeta(cplx(1, 0)), std::domain_error);
}

TEST_CASE("zeta matches a direct Dirichlet sum well inside convergence") {
  for (cplx s : {cplx(3.5, 7.0), cplx(4.0, -22.5), cplx(2.5, 60.0)}) {
    cplx direct = 0;
    for (int n = 400000; n >= 1; --n) direct += std::exp(-s * std::log(double(n)));
    // tail of the direct sum is ~ N^{1-Re s}/(Re s - 1), far below 1e-7
    CHECK(std::abs(riemann_zeta(s) - direct) < 1e-7);
  }
}

TEST_CASE("completed zeta: values, symmetry, poles") {
  CHECK(rel_err(completed_zeta(cplx(2, 0)), cplx(PI / 6.0, 0)) < 1e-12);
  CHECK(rel_err(completed_zeta(cplx(4, 0)), cplx(PI * PI / 90.0, 0)) < 1e-12);
  CHECK_THROWS_AS(completed_zeta(cplx(0, 0)), std::domain_error);
  CHECK_THROWS_AS(completed_zeta(cplx(1, 0)), std::domain_error);

  // documented example point
  {
    cplx a = completed_zeta(cplx(0.3, 2.0));
    cplx b = completed_zeta(cplx(0.7, -2.0));
    CHECK(std::abs(a - b) / std::abs(b) < 1e-10);
  }

  // symmetry on a sweep of 100 points, both strips and off-strip
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> re(-3.0, 4.0), im(-40.0, 40.0);
  int done = 0;
  while (done < 100) {
    cplx s(re(rng), im(rng));
    if (std::abs(s) < 0.2 || std::abs(s - 1.0) < 0.2) continue;
    if (s.imag() == 0.0) continue;
    cplx a = completed_zeta(s);
    cplx b = completed_zeta(1.0 - s);
    CHECK(std::abs(a - b) / std::max(1e-300, std::abs(b)) < 1e-9);
    ++done;
  }

  // finite at negative even integers despite the factor-form degeneracy
  CHECK(rel_err(completed_zeta(cplx(-2, 0)), completed_zeta(cplx(3, 0))) < 1e-14);
}

TEST_CASE("smoothing kernel and its Mellin transform") {
  CHECK(kernel_V(0.0) == 1.0);
  CHECK(kernel_V(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(kernel_V(10.0) == 0.0); // underflow, fine
  CHECK_THROWS_AS(kernel_V(-0.1), std::invalid_argument);

  // v(2) = Gamma(0.4)/5 ~ 0.4436
  CHECK(rel_err(kernel_v(cplx(2, 0)), cplx(std::tgamma(0.4) / 5.0, 0)) < 1e-13);
  CHECK(std::abs(kernel_v(cplx(2, 0)).real() - 0.4436) < 5e-4);
  CHECK_THROWS_AS(kernel_v(cplx(0, 0)), std::domain_error);
  CHECK_THROWS_AS(kernel_v(cplx(5, 0)), std::domain_error);
  CHECK_THROWS_AS(kernel_v(cplx(-5, 0)), std::domain_error);
  CHECK_NOTHROW(kernel_v(cplx(4.9, 0)));
}

TEST_CASE("inverse Mellin of v recovers V") {
  // documented: x = 1 -> e^{-1}, x = 0.5 -> e^{-1/32}
  auto li = kernel_v_line(2.0);
  CHECK(std::abs(inverse_mellin(li, 2.0, 1.0) - cplx(std::exp(-1.0), 0)) < 1e-8);
  CHECK(std::abs(inverse_mellin(li, 2.0, 0.5) - cplx(std::exp(-1.0 / 32.0), 0)) < 1e-8);

  for (double x : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    cplx got = inverse_mellin(li, 2.0, x);
    CHECK(std::abs(got - cplx(kernel_V(x), 0)) < 1e-8);
  }

  // moving the contour off sigma = 2 must not move the value
  auto li3 = kernel_v_line(3.0);
  for (double x : {0.5, 1.0, 2.0}) {
    cplx a = inverse_mellin(li, 2.0, x);
    cplx b = inverse_mellin(li3, 3.0, x);
    CHECK(std::abs(a - b) < 2e-8);
  }
}

TEST_CASE("inverse Mellin refuses a lying envelope") {
  LineIntegrand bad;
  bad.f = [](cplx s) { return kernel_v(s); };
  bad.amplitude = std::tgamma(0.4) / 50.0; // 10x too small at tau = 0
  bad.rate = 0.3;
  CHECK_THROWS_WITH_AS(inverse_mellin(bad, 2.0, 1.0),
                       doctest::Contains("envelope insufficient"),
                       std::runtime_error);

  // a rate faster than the integrand's true decay must also be caught
  LineIntegrand badrate;
  badrate.f = [](cplx s) { return kernel_v(s); };
  badrate.amplitude = 3.0 * std::tgamma(0.4) / 5.0;
  badrate.rate = 2.0;
  CHECK_THROWS_AS(inverse_mellin(badrate, 2.0, 1.0), std::runtime_error);
}

TEST_CASE("beta integral identity: documented examples") {
  {
    auto [lhs, rhs] = beta_mellin_identity(1.0, cplx(2, 0), 0.5);
    CHECK(std::abs(rhs - cplx(0.25, 0)) < 1e-15);
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
  {
    auto [lhs, rhs] = beta_mellin_identity(1e-6, cplx(1, 0), 0.5);
    CHECK(std::abs(rhs.real() - 1.0) < 1e-5);
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
  {
    auto [lhs, rhs] = beta_mellin_identity(3.0, cplx(1.5, 0.7), 0.6);
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
  CHECK_THROWS_AS(beta_mellin_identity(-1.0, cplx(2, 0), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(beta_mellin_identity(1.0, cplx(2, 0), 2.5), std::invalid_argument);
  CHECK_THROWS_AS(beta_mellin_identity(1.0, cplx(-1, 0), 0.5), std::invalid_argument);
}

TEST_CASE("beta integral identity on a parameter grid") {
  for (double t : {0.2, 1.0, 5.0}) {
    for (double br : {0.8, 1.5, 2.5}) {
      for (double bi : {0.0, 1.0, 2.0}) {
        cplx beta(br, bi);
        double gam = 0.5 * br;
        auto [lhs, rhs] = beta_mellin_identity(t, beta, gam);
        INFO("t=", t, " beta=", br, "+", bi, "i");
        CHECK(std::abs(lhs - rhs) < 1e-8);
      }
    }
  }
}
