#include "twistlab/forms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "twistlab/ntheory.hpp"
#include "twistlab/special.hpp"
#include "twistlab/summation.hpp"

namespace twistlab::forms {

namespace {

constexpr std::size_t ETA_MAX = 100000;

// q prod (1-q^m)^24 = q * J(q)^8 where J = sum_{j>=0} (-1)^j (2j+1) q^{j(j+1)/2}
// (the cube of Euler's product, by Jacobi). J is sparse (~sqrt(2n) terms up
// to q^n), so J^8 costs one sparse*sparse and then six in-place dense*sparse
// passes. All arithmetic exact in __int128; the largest coefficient of the
// final power near n = 1e5 is ~1e29, far inside the 1.7e38 ceiling, and the
// intermediate powers are smaller still.
std::vector<i128> compute_eta24(std::size_t n_max) {
  const std::size_t len = n_max; // coefficients of q^0 .. q^{n_max - 1} of J^8
  std::vector<i64> tri_idx;
  std::vector<i64> tri_coef;
  for (i64 j = 0;; ++j) {
    i64 T = j * (j + 1) / 2;
    if (std::size_t(T) >= len) break;
    tri_idx.push_back(T);
    tri_coef.push_back((j % 2 == 0 ? 1 : -1) * (2 * j + 1));
  }

  // J^2, sparse * sparse
  std::vector<i128> P(len, 0);
  for (std::size_t a = 0; a < tri_idx.size(); ++a) {
    for (std::size_t b = 0; b < tri_idx.size(); ++b) {
      i64 n = tri_idx[a] + tri_idx[b];
      if (std::size_t(n) >= len) break;
      P[n] += i128(tri_coef[a]) * tri_coef[b];
    }
  }

  // six more factors of J, each an in-place descending convolution; the
  // j = 0 kernel term is the identity so positions below n are still the
  // previous power when P[n] is formed
  for (int pass = 0; pass < 6; ++pass) {
    for (std::size_t n = len; n-- > 1;) {
      i128 acc = P[n]; // tri_idx[0] = 0, tri_coef[0] = +1
      for (std::size_t a = 1; a < tri_idx.size(); ++a) {
        i64 off = tri_idx[a];
        if (std::size_t(off) > n) break;
        acc += i128(tri_coef[a]) * P[n - off];
      }
      P[n] = acc;
    }
  }

  // shift by the leading q: coefficient of q^n in eta^24 is [q^{n-1}] J^8
  std::vector<i128> out(n_max + 1, 0);
  for (std::size_t n = 1; n <= n_max; ++n) out[n] = P[n - 1];
  return out;
}

double normalized_from_raw(double raw_ap, u64 p, int weight) {
  long double scale = std::pow((long double)p, (long double)(weight - 1) / 2.0L);
  return double((long double)raw_ap / scale);
}

} // namespace

const std::vector<i128>& eta24_expansion(std::size_t n_max) {
  if (n_max == 0 || n_max > ETA_MAX)
    throw std::invalid_argument("eta24_expansion: need 1 <= n_max <= 1e5");
  // computed once at the full limit; every later call is a lookup
  static std::once_flag flag;
  static std::vector<i128> table;
  std::call_once(flag, [] { table = compute_eta24(ETA_MAX); });
  return table;
}

HeckeEigenform builtin_delta(u64 prime_limit) {
  if (prime_limit < 2 || prime_limit > ETA_MAX)
    throw std::invalid_argument("builtin_delta: prime_limit must be in [2, 1e5]");
  const auto& tau = eta24_expansion(ETA_MAX);
  HeckeEigenform f;
  f.name = "delta";
  f.weight = 12;
  f.level = 1;
  f.prime_limit = prime_limit;
  for (u32 p : nt::small_primes()) {
    if (p > prime_limit) break;
    long double t = (long double)(tau[p]);
    f.ap[p] = double(t / std::pow((long double)p, 5.5L));
  }
  return f;
}

HeckeEigenform load_eigenform(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_eigenform: cannot open " + path);

  HeckeEigenform f;
  f.name = path;
  bool have_weight = false, have_level = false, in_primes = false;
  std::string line;
  int lineno = 0;
  std::vector<std::pair<u64, double>> raw;

  auto fail = [&](const std::string& what) {
    throw std::runtime_error("load_eigenform: " + path + ":" +
                             std::to_string(lineno) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string t = line;
    if (auto h = t.find('#'); h != std::string::npos) t.resize(h);
    // trim
    auto b = t.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    t = t.substr(b, t.find_last_not_of(" \t\r") - b + 1);

    if (!in_primes) {
      if (t == "primes:") {
        if (!have_weight) fail("'primes:' before 'weight ='");
        if (!have_level) fail("'primes:' before 'level ='");
        in_primes = true;
        continue;
      }
      std::istringstream ss(t);
      std::string key, eq;
      long long val;
      if (!(ss >> key >> eq >> val) || eq != "=")
        fail("expected 'weight = <int>' or 'level = <int>', got '" + t + "'");
      if (key == "weight") {
        if (val < 4 || val % 2 != 0) fail("field 'weight': must be even and >= 4");
        f.weight = int(val);
        have_weight = true;
      } else if (key == "level") {
        if (val < 1) fail("field 'level': must be positive");
        for (const auto& [p, e] : nt::factorize(u64(val)).factors)
          if (e > 1) fail("field 'level': must be squarefree");
        f.level = u64(val);
        have_level = true;
      } else {
        fail("unknown field '" + key + "'");
      }
    } else {
      std::istringstream ss(t);
      unsigned long long p;
      double a;
      if (!(ss >> p >> a)) fail("expected '<prime> <a_p>', got '" + t + "'");
      if (!nt::is_prime(p)) fail("field 'p': " + std::to_string(p) + " is not prime");
      raw.emplace_back(p, a);
    }
  }
  if (!have_weight) fail("missing 'weight ='");
  if (!have_level) fail("missing 'level ='");
  if (raw.empty()) fail("no prime eigenvalues given");

  for (const auto& [p, a] : raw) {
    if (f.ap.count(p))
      throw std::runtime_error("load_eigenform: " + path + ": duplicate prime " +
                               std::to_string(p));
    f.ap[p] = normalized_from_raw(a, p, f.weight);
  }

  // prime_limit = largest bound below which no prime is missing
  f.prime_limit = 1;
  for (u32 p : nt::small_primes()) {
    if (!f.ap.count(p)) break;
    f.prime_limit = p;
  }
  return f;
}

namespace {

double power_coefficient(const HeckeEigenform& f, u64 p, int e) {
  if (e == 0) return 1.0;
  u64 key = p * 64 + u64(e);
  if (auto it = f.power_cache.find(key); it != f.power_cache.end())
    return it->second;

  auto it = f.ap.find(p);
  if (it == f.ap.end())
    throw std::runtime_error(
        "coefficient table exhausted at prime " + std::to_string(p) +
        " (known up to " + std::to_string(f.prime_limit) + ")");
  double Ap = it->second;

  double val;
  if (f.level % p == 0) {
    val = std::pow(Ap, e);
  } else {
    double prev = 1.0, cur = Ap;
    for (int r = 1; r < e; ++r) {
      double next = Ap * cur - prev;
      prev = cur;
      cur = next;
    }
    val = cur;
  }
  if (f.power_cache.size() >= 10000000)
    throw std::runtime_error(
        "coefficient cache exceeded 1e7 entries; materialize() a dense range "
        "instead of streaming huge sparse requests");
  f.power_cache[key] = val;
  return val;
}

} // namespace

double coefficient(const HeckeEigenform& f, u64 n) {
  if (n == 0) throw std::invalid_argument("coefficient: n must be positive");
  if (n < f.A_dense.size()) return f.A_dense[n];
  double out = 1.0;
  for (const auto& [p, e] : nt::factorize(n).factors)
    out *= power_coefficient(f, p, e);
  return out;
}

void materialize(HeckeEigenform& f, u64 n_max) {
  if (n_max >= 20000000)
    throw std::invalid_argument("materialize: dense table beyond 2e7 entries");
  if (n_max + 1 <= f.A_dense.size()) return;

  // smallest-prime-factor sieve, then A(n) = A(p^e) A(n / p^e) bottom-up
  std::vector<u32> spf(n_max + 1, 0);
  for (u64 i = 2; i <= n_max; ++i) {
    if (spf[i] == 0) {
      if (i * i <= n_max)
        for (u64 j = i * i; j <= n_max; j += i)
          if (spf[j] == 0) spf[j] = u32(i);
      spf[i] = u32(i);
    }
  }

  std::vector<double> A(n_max + 1, 0.0);
  if (n_max >= 1) A[1] = 1.0;
  for (u64 n = 2; n <= n_max; ++n) {
    u64 p = spf[n];
    u64 m = n;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    A[n] = (m == 1) ? power_coefficient(f, p, e)
                    : power_coefficient(f, p, e) * A[m];
  }
  f.A_dense = std::move(A);
}

namespace {

cplx local_factor_ratio(const HeckeEigenform& f, u64 p, cplx s) {
  const double sigma = s.real();
  const double lp = std::log(double(p));
  NeumaierCplx num, den;
  for (int j = 0;; ++j) {
    double bound = double(j + 2) * double(j + 2) * std::exp(-double(j) * sigma * lp);
    if (bound < 1e-14) break;
    cplx pjs = std::exp(-double(j) * s * lp);
    double Aj = power_coefficient(f, p, j);
    double Aj1 = power_coefficient(f, p, j + 1);
    num.add(Aj1 * Aj * pjs);
    den.add(Aj * Aj * pjs);
  }
  cplx d = den.value();
  if (std::abs(d) < 1e-12)
    throw std::domain_error("euler_ratio: local denominator vanished at p = " +
                            std::to_string(p));
  return num.value() / d;
}

} // namespace

cplx euler_ratio(const HeckeEigenform& f, u64 l1, u64 l2, cplx s) {
  if (l1 == l2)
    throw std::invalid_argument("euler_ratio: l1 and l2 must be distinct");
  if (!nt::is_prime(l1) || !nt::is_prime(l2))
    throw std::invalid_argument("euler_ratio: l1 and l2 must be prime");
  if (f.level % l1 == 0 || f.level % l2 == 0)
    throw std::invalid_argument("euler_ratio: l1, l2 must be coprime to the level");
  if (!(s.real() > 0.0))
    throw std::invalid_argument("euler_ratio: need Re s > 0");
  // coefficients are real, so the conjugated side at l1 is the same ratio
  return local_factor_ratio(f, l2, s) * local_factor_ratio(f, l1, s);
}

double b_constant(const HeckeEigenform& f, u64 l1, u64 l2) {
  if (!nt::is_prime(l1) || !nt::is_prime(l2))
    throw std::invalid_argument("b_constant: l1 and l2 must be prime");
  if (l1 == l2) return 1.0 / double(l1);
  cplx E1 = euler_ratio(f, l1, l2, cplx(1.0, 0.0));
  return E1.real() / (double(l1) * double(l2));
}

RankinFit rankin_selberg_constant(const HeckeEigenform& f,
                                  const std::vector<double>& x_grid) {
  if (x_grid.size() < 4)
    throw std::invalid_argument("rankin_selberg_constant: need >= 4 grid points");
  std::vector<double> xs = x_grid;
  std::sort(xs.begin(), xs.end());
  if (!(xs.front() > 0))
    throw std::invalid_argument("rankin_selberg_constant: grid must be positive");
  if (xs.back() / xs.front() < 10.0)
    throw std::invalid_argument(
        "rankin_selberg_constant: grid must span at least a decade");

  std::vector<double> lx(xs.size()), D(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const u64 m_max = u64(std::ceil(2.06 * x));
    NeumaierSum acc;
    for (u64 m = 1; m <= m_max; ++m) {
      double A = coefficient(f, m);
      double w = special::kernel_V(double(m) / x);
      acc.add(A * A / double(m) * w * w);
    }
    lx[i] = std::log(x);
    D[i] = acc.value();
  }

  // least squares D = c * log x + intercept
  const double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += lx[i];
    sy += D[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * D[i];
  }
  const double det = n * sxx - sx * sx;
  RankinFit fit;
  fit.c = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.c * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = D[i] - (fit.c * lx[i] + fit.intercept);
    ss += r * r;
  }
  fit.fit_residual = std::sqrt(ss / n);
  if (!(fit.c > 0))
    throw std::runtime_error("rankin_selberg_constant: nonpositive slope");
  return fit;
}

double rankin_probe(const HeckeEigenform& f, double w, u64 M) {
  if (!(w > 0) || M < 16)
    throw std::invalid_argument("rankin_probe: need w > 0 and M >= 16");
  // P(X) = w * sum_{m<=X} A(m)^2 m^{-1-w}. The ideal w -> 0 limit of the
  // full series is c, but at any fixed w the series itself carries a c1*w
  // offset from the Laurent constant of the Rankin-Selberg zeta (for delta
  // that alone is ~10% at w = 0.05). Against the pole model
  //   P(X) = c (1 - X^{-w}) + c1 w,
  // the difference of two truncations cancels c1 exactly:
  //   c = (P(M) - P(M/4)) / ((M/4)^{-w} - M^{-w}).
  const u64 M_lo = M / 4;
  NeumaierSum lo, hi;
  for (u64 m = 1; m <= M; ++m) {
    double A = coefficient(f, m);
    const double term = A * A * std::exp(-(1.0 + w) * std::log(double(m)));
    if (m <= M_lo) lo.add(term);
    hi.add(term);
  }
  const double p_lo = w * lo.value(), p_hi = w * hi.value();
  return (p_hi - p_lo) / (std::exp(-w * std::log(double(M_lo))) -
                          std::exp(-w * std::log(double(M))));
}

} // namespace twistlab::forms
