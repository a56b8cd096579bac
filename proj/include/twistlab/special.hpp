#pragma once

#include <functional>
#include <utility>

#include "twistlab/defs.hpp"

namespace twistlab::special {

// Lanczos (g = 7, 9 coefficients) on Re s >= 1/2, reflection below. Relative
// error stays under 1e-12 for |s| <= 100; inputs past |s| ~ 1e3 are out of
// scope. Exact nonpositive-integer poles throw.
cplx complex_gamma(cplx s);

// Euler-Maclaurin on Re s > 0 (cutoff N grows with |Im s|, 14 Bernoulli
// correction terms), functional equation for Re s <= 0, and a short Taylor
// expansion around s = 0 where the functional-equation product degenerates
// to 0 * inf. Relative error < 1e-10 for |Im s| <= 100. s = 1 throws.
cplx riemann_zeta(cplx s);

// pi^{-s/2} Gamma(s/2) zeta(s); poles at s = 0 and s = 1 throw. At the
// negative even integers the product form is 0 * inf, so the value is taken
// at the reflected point 1 - s (the two are equal identically).
cplx completed_zeta(cplx s);

// smoothing kernel V(x) = exp(-x^5), x >= 0
double kernel_V(double x);

// Mellin transform of V on the strip -5 < Re s < 5: v(s) = Gamma(s/5)/5,
// with a simple pole (residue 1) at s = 0
cplx kernel_v(cplx s);

// Integrand on a vertical line with a self-declared decay envelope
//   |f(sigma + i tau)| <= amplitude * exp(-rate * |tau|).
// The envelope is a caller promise; the quadrature verifies it at every node
// it touches and refuses to return a value when it fails.
struct LineIntegrand {
  std::function<cplx(cplx)> f;
  double amplitude = 0.0;
  double rate = 0.0;
};

// (1/2 pi i) int_{(sigma)} f(s) x^{-s} ds via trapezoid sums on [-T, T],
// T from the envelope tail bound and the step halved until the update stalls
// below the budget. Absolute error certified < 1e-9.
cplx inverse_mellin(const LineIntegrand& integrand, double abscissa, double x);

// ready-made integrand for kernel_v on the line Re s = sigma, 0 < sigma < 5.
// The 3x amplitude headroom and the 0.3 rate (true decay is exp(-pi|tau|/10))
// hold comfortably for sigma <= 4; past that the quadrature's own node check
// is the arbiter.
LineIntegrand kernel_v_line(double sigma);

// Both sides of (1/2 pi i) int_{(gamma)} Gamma(u) Gamma(beta - u) / Gamma(beta)
// * t^{-u} du = (1 + t)^{-beta} for t > 0, 0 < gamma < Re beta.
// first = contour integral, second = closed form.
std::pair<cplx, cplx> beta_mellin_identity(double t, cplx beta, double gamma_line);

} // namespace twistlab::special
