#include "twistlab/special.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "twistlab/summation.hpp"

namespace twistlab::special {

namespace {

bool is_exact_nonpositive_integer(cplx s) {
  return s.imag() == 0.0 && s.real() <= 0.0 && s.real() == std::floor(s.real());
}

// Lanczos, g = 7, 9 terms. Good to ~1e-14 relative on Re s >= 1/2.
const double LANCZOS_G = 7.0;
const double LANCZOS_C[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

cplx lanczos_gamma(cplx z) {
  // valid for Re z >= 0.5
  z -= 1.0;
  cplx a = LANCZOS_C[0];
  for (int k = 1; k < 9; ++k) a += LANCZOS_C[k] / (z + double(k));
  cplx t = z + LANCZOS_G + 0.5;
  return std::sqrt(TWO_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

// Bernoulli numbers B_2 .. B_28
const double BERN[14] = {
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
};

// Euler-Maclaurin for Re s > 0, s != 1:
//   zeta(s) = sum_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2
//           + sum_{k=1}^{14} B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
// N tracks |Im s| so the correction series stays convergent-looking.
cplx zeta_euler_maclaurin(cplx s) {
  const int N = std::max(30, int(std::ceil(1.3 * std::abs(s.imag()))) + 10);
  NeumaierCplx acc;
  for (int n = 1; n < N; ++n) acc.add(std::exp(-s * std::log(double(n))));
  cplx Ns = std::exp(-s * std::log(double(N))); // N^{-s}
  acc.add(Ns * double(N) / (s - 1.0));
  acc.add(0.5 * Ns);
  cplx poch = s;                 // s(s+1)...(s+2k-2)
  double fact = 2.0;             // (2k)!
  cplx Npow = Ns / double(N);    // N^{-s-2k+1}
  for (int k = 1; k <= 14; ++k) {
    acc.add(BERN[k - 1] / fact * poch * Npow);
    // advance to k+1: multiply pochhammer by (s+2k-1)(s+2k), factorial to
    // (2k+2)!, N-power by N^{-2}
    poch *= (s + double(2 * k - 1)) * (s + double(2 * k));
    fact *= double(2 * k + 1) * double(2 * k + 2);
    Npow /= double(N) * double(N);
  }
  return acc.value();
}

} // namespace

cplx complex_gamma(cplx s) {
  if (is_exact_nonpositive_integer(s)) {
    std::ostringstream os;
    os << "complex_gamma: pole at s = " << s.real();
    throw std::domain_error(os.str());
  }
  if (s.real() >= 0.5) return lanczos_gamma(s);
  // reflection: Gamma(s) = pi / (sin(pi s) Gamma(1 - s))
  return PI / (std::sin(PI * s) * lanczos_gamma(1.0 - s));
}

cplx riemann_zeta(cplx s) {
  if (s == cplx(1.0, 0.0))
    throw std::domain_error("riemann_zeta: pole at s = 1");
  if (std::abs(s) < 1e-4) {
    // around s = 0 the reflection product is 0 * inf; three Taylor terms
    // leave ~1e-12 there (zeta''(0) only needs a few digits at this radius)
    const double zpp0 = -2.0063564559;
    return cplx(-0.5, 0.0) + s * (-0.5 * std::log(TWO_PI)) + 0.5 * zpp0 * s * s;
  }
  if (s.real() > 0.0) return zeta_euler_maclaurin(s);
  // functional equation: zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)
  cplx pref = std::pow(cplx(2.0, 0.0), s) * std::pow(cplx(PI, 0.0), s - 1.0) *
              std::sin(PI * s / 2.0);
  return pref * complex_gamma(1.0 - s) * zeta_euler_maclaurin(1.0 - s);
}

cplx completed_zeta(cplx s) {
  if (s == cplx(0.0, 0.0) || s == cplx(1.0, 0.0)) {
    std::ostringstream os;
    os << "completed_zeta: pole at s = " << s.real();
    throw std::domain_error(os.str());
  }
  // at exact negative even integers the factor form is 0 * inf; the function
  // itself is finite there and symmetric, so evaluate at the mirror point
  if (s.imag() == 0.0 && s.real() < 0.0 && s.real() == std::floor(s.real()) &&
      std::fmod(s.real(), 2.0) == 0.0)
    return completed_zeta(1.0 - s);
  return std::pow(cplx(PI, 0.0), -s / 2.0) * complex_gamma(s / 2.0) *
         riemann_zeta(s);
}

double kernel_V(double x) {
  if (x < 0.0) throw std::invalid_argument("kernel_V: x must be >= 0");
  return std::exp(-std::pow(x, 5));
}

cplx kernel_v(cplx s) {
  if (s == cplx(0.0, 0.0))
    throw std::domain_error("kernel_v: pole at s = 0 (residue 1)");
  if (std::abs(s.real()) >= 5.0)
    throw std::domain_error("kernel_v: outside the strip -5 < Re s < 5");
  return complex_gamma(s / 5.0) / 5.0;
}

cplx inverse_mellin(const LineIntegrand& integrand, double abscissa, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("inverse_mellin: x must be > 0");
  if (!(integrand.amplitude > 0.0) || !(integrand.rate > 0.0))
    throw std::invalid_argument(
        "inverse_mellin: integrand must declare a positive decay envelope");

  const double sigma = abscissa;
  const double xs = std::pow(x, -sigma);
  const double tol_tail = 1e-10;
  const double tol_step = 2.5e-10;

  // tail: (1/2pi) * 2 * int_T^inf amplitude e^{-rate tau} x^{-sigma} dtau < tol
  double T = std::log(integrand.amplitude * xs /
                      (PI * integrand.rate * tol_tail)) /
             integrand.rate;
  if (T < 10.0) T = 10.0;

  const double lx = std::log(x);
  auto node = [&](double tau) -> cplx {
    cplx s(sigma, tau);
    cplx fv = integrand.f(s);
    double bound = integrand.amplitude * std::exp(-integrand.rate * std::abs(tau));
    if (std::abs(fv) > bound * (1.0 + 1e-9) + 1e-300) {
      std::ostringstream os;
      os << "inverse_mellin: envelope insufficient: |f(" << sigma << " + "
         << tau << "i)| = " << std::abs(fv)
         << " exceeds the declared bound " << bound
         << "; refusing to certify the tail";
      throw std::runtime_error(os.str());
    }
    // times x^{-s} with |x^{-s}| = x^{-sigma}
    return fv * (xs * cplx(std::cos(tau * lx), -std::sin(tau * lx)));
  };

  // trapezoid at step h over [-T, T]; refine by adding midpoints
  double h = 0.25;
  long long n = llround(std::ceil(T / h));
  T = h * double(n); // snap T up to a grid multiple
  NeumaierCplx coarse;
  coarse.add(0.5 * (node(-T) + node(T)));
  for (long long j = -n + 1; j < n; ++j) coarse.add(node(h * double(j)));
  cplx sum = coarse.value(); // sum of weighted nodes at step h
  cplx prev_integral = sum * h;

  for (int level = 0; level < 7; ++level) {
    NeumaierCplx mids;
    long long m = 2 * n; // midpoints count at this refinement
    for (long long j = 0; j < m; ++j)
      mids.add(node(-T + h * (double(j) + 0.5)));
    h *= 0.5;
    n *= 2;
    sum += mids.value();
    cplx integral = sum * h;
    if (std::abs(integral - prev_integral) < tol_step)
      return integral / TWO_PI;
    prev_integral = integral;
  }
  throw std::runtime_error(
      "inverse_mellin: trapezoid refinement did not settle below 2.5e-10 by "
      "h = 1/512; integrand rougher than its envelope suggests");
}

LineIntegrand kernel_v_line(double sigma) {
  if (!(sigma > 0.0) || !(sigma < 5.0))
    throw std::invalid_argument("kernel_v_line: need 0 < sigma < 5");
  LineIntegrand li;
  li.f = [](cplx s) { return kernel_v(s); };
  li.amplitude = 3.0 * std::tgamma(sigma / 5.0) / 5.0;
  li.rate = 0.3;
  return li;
}

std::pair<cplx, cplx> beta_mellin_identity(double t, cplx beta, double gamma_line) {
  if (!(t > 0.0))
    throw std::invalid_argument("beta_mellin_identity: t must be > 0");
  if (!(beta.real() > 0.0))
    throw std::invalid_argument("beta_mellin_identity: Re beta must be > 0");
  if (!(gamma_line > 0.0) || !(gamma_line < beta.real()))
    throw std::invalid_argument(
        "beta_mellin_identity: contour must satisfy 0 < gamma < Re beta");

  const cplx gamma_beta = complex_gamma(beta);
  LineIntegrand li;
  li.f = [beta, gamma_beta](cplx u) {
    return complex_gamma(u) * complex_gamma(beta - u) / gamma_beta;
  };
  li.rate = 1.2;
  li.amplitude = 6.0 * std::tgamma(gamma_line) *
                 std::tgamma(beta.real() - gamma_line) / std::abs(gamma_beta) *
                 std::exp(1.2 * std::abs(beta.imag()));

  cplx lhs = inverse_mellin(li, gamma_line, t);
  cplx rhs = std::exp(-beta * std::log1p(t));
  return {lhs, rhs};
}

} // namespace twistlab::special
