#include "periodrh/zeros.hpp"

#include "periodrh/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace periodrh::zeros {

namespace mp = boost::multiprecision;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::unimodular: return "unimodular";
    case Verdict::in_disk: return "in_disk";
    case Verdict::neither: return "neither";
  }
  return "neither";
}

Complex horner(std::span<const Complex> coeffs, const Complex& z) {
  if (coeffs.empty()) return {};
  Complex acc = coeffs.back();
  for (std::size_t j = coeffs.size() - 1; j-- > 0;) {
    acc *= z;
    acc += coeffs[j];
  }
  return acc;
}

Complex horner(std::span<const Real> coeffs, const Complex& z) {
  if (coeffs.empty()) return {};
  Complex acc(coeffs.back());
  for (std::size_t j = coeffs.size() - 1; j-- > 0;) {
    acc *= z;
    acc.re += coeffs[j];
  }
  return acc;
}

std::optional<int> self_reciprocal_sign(std::span<const Real> coeffs, const Real& tol) {
  if (coeffs.empty()) return std::nullopt;
  Real scale(0);
  for (const auto& a : coeffs) scale = max_of(scale, Real(mp::abs(a)));
  const Real bound = tol * scale;
  const std::size_t d = coeffs.size() - 1;
  for (int eps : {1, -1}) {
    bool ok = true;
    for (std::size_t j = 0; j <= d && ok; ++j) ok = mp::abs(coeffs[j] - eps * coeffs[d - j]) <= bound;
    if (ok) return eps;
  }
  return std::nullopt;
}

namespace {

using LComplex = std::complex<long double>;

struct Prepared {
  // Scaled core polynomial b(y) = a(2^e y) / z^zero_roots, ascending powers.
  std::vector<Complex> b;
  int scale_exponent = 0;
  int stripped_leading = 0;
  int zero_roots = 0;
};

Prepared prepare(std::span<const Complex> a, int precision) {
  if (a.size() < 2) throw InvalidArgument("find_roots: polynomial degree must be at least 1");
  Real max_abs(0);
  for (const auto& c : a) max_abs = max_of(max_abs, c.abs());
  if (max_abs == 0) throw InvalidArgument("find_roots: zero polynomial");
  const Real threshold = max_abs * pow10(-precision / 2);

  Prepared out;
  std::size_t hi = a.size() - 1;
  while (hi > 0 && a[hi].abs() <= threshold) {
    --hi;
    ++out.stripped_leading;
  }
  std::size_t lo = 0;
  while (lo < hi && a[lo].abs() <= threshold) ++lo;
  out.zero_roots = static_cast<int>(lo);
  if (hi == 0) throw InvalidArgument("find_roots: degree < 1 after stripping negligible leading coefficients");

  const int d = static_cast<int>(hi - lo);
  if (d > 0) {
    const double spread = log10_abs(a[lo].abs()) - log10_abs(a[hi].abs());
    out.scale_exponent = static_cast<int>(std::lround(spread / d / std::log10(2.0)));
  }
  out.b.reserve(static_cast<std::size_t>(d) + 1);
  long shift = 0;
  {
    // Normalise the largest scaled coefficient to magnitude ~1 (power of two).
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= d; ++j) {
      const double l = log10_abs(a[lo + j].abs()) + j * out.scale_exponent * std::log10(2.0);
      best = std::max(best, l);
    }
    shift = -std::lround(best / std::log10(2.0));
  }
  for (int j = 0; j <= d; ++j) {
    const auto& c = a[lo + j];
    const long e = static_cast<long>(j) * out.scale_exponent + shift;
    out.b.push_back({with_precision(mp::ldexp(c.re, static_cast<int>(e)), precision),
                     with_precision(mp::ldexp(c.im, static_cast<int>(e)), precision)});
  }
  return out;
}

LComplex to_lcomplex(const Complex& c) {
  return {c.re.convert_to<long double>(), c.im.convert_to<long double>()};
}

void horner_with_derivative(const std::vector<LComplex>& b, LComplex z, LComplex& p, LComplex& dp) {
  p = b.back();
  dp = 0;
  for (std::size_t j = b.size() - 1; j-- > 0;) {
    dp = dp * z + p;
    p = p * z + b[j];
  }
}

std::vector<LComplex> initial_circle(const std::vector<LComplex>& b, std::uint64_t seed) {
  const int d = static_cast<int>(b.size()) - 1;
  const long double ratio = std::abs(b.front()) / std::abs(b.back());
  long double radius = ratio > 0 ? std::pow(ratio, 1.0L / d) : 1.0L;
  if (!std::isfinite(radius) || radius == 0) radius = 1.0L;
  CounterRng rng(seed, 0x726f6f7473ULL);
  const long double two_pi = 2 * std::numbers::pi_v<long double>;
  const long double offset = two_pi * rng.uniform();
  std::vector<LComplex> z(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const long double jitter = 0.25L * (rng.uniform() - 0.5);
    z[static_cast<std::size_t>(j)] = std::polar(radius, offset + two_pi * (j + jitter) / d);
  }
  return z;
}

// Returns false when the iteration stalls or produces non-finite values.
bool aberth_long_double(const std::vector<LComplex>& b, std::vector<LComplex>& z, int& iterations) {
  const std::size_t d = z.size();
  const long double eps = 8 * std::numeric_limits<long double>::epsilon();
  std::vector<char> done(d, 0);
  const int max_iter = 100 + 4 * static_cast<int>(d);
  for (iterations = 1; iterations <= max_iter; ++iterations) {
    bool all_done = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (done[i]) continue;
      LComplex p, dp;
      horner_with_derivative(b, z[i], p, dp);
      // Stop at rounding level: |p(z)| against sum |b_j| |z|^j.
      long double mag = 0;
      const long double r = std::abs(z[i]);
      for (std::size_t j = b.size(); j-- > 0;) mag = mag * r + std::abs(b[j]);
      if (std::abs(p) <= 16 * static_cast<long double>(d) * std::numeric_limits<long double>::epsilon() * mag) {
        done[i] = 1;
        continue;
      }
      if (dp == LComplex(0)) {
        z[i] *= LComplex(1.0L + 1e-6L, 1e-6L);
        all_done = false;
        continue;
      }
      const LComplex w = p / dp;
      LComplex s = 0;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) s += 1.0L / (z[i] - z[j]);
      const LComplex corr = w / (1.0L - w * s);
      z[i] -= corr;
      if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) return false;
      if (std::abs(corr) <= eps * std::max(std::abs(z[i]), 1e-30L))
        done[i] = 1;
      else
        all_done = false;
    }
    if (all_done) return true;
  }
  return false;
}

std::vector<LComplex> companion_roots(const std::vector<LComplex>& b) {
  using Matrix = Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index d = static_cast<Eigen::Index>(b.size()) - 1;
  Matrix c = Matrix::Zero(d, d);
  for (Eigen::Index i = 1; i < d; ++i) c(i, i - 1) = 1;
  for (Eigen::Index i = 0; i < d; ++i) c(i, d - 1) = -b[static_cast<std::size_t>(i)] / b.back();
  Eigen::ComplexEigenSolver<Matrix> solver(c, false);
  if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue fallback failed");
  std::vector<LComplex> z(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) z[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return z;
}

void horner_with_derivative(const std::vector<Complex>& b, const Complex& z, Complex& p, Complex& dp) {
  p = b.back();
  dp = Complex();
  for (std::size_t j = b.size() - 1; j-- > 0;) {
    dp *= z;
    dp += p;
    p *= z;
    p += b[j];
  }
}

// Returns true when every root's last correction fell below the target.
bool aberth_full(const std::vector<Complex>& b, std::vector<Complex>& z, int precision, int& iterations) {
  const std::size_t d = z.size();
  const Real target = pow10(-(precision * 3) / 4);
  std::vector<char> done(d, 0);
  const int max_iter = 60;
  Complex p, dp, s, diff, w, corr;
  const Complex one(Real(1));
  for (int it = 1; it <= max_iter; ++it) {
    ++iterations;
    bool all_done = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (done[i]) continue;
      horner_with_derivative(b, z[i], p, dp);
      if (p.is_zero()) {
        done[i] = 1;
        continue;
      }
      if (dp.is_zero()) {
        z[i] *= Complex(Real(1) + pow10(-precision / 3), pow10(-precision / 3));
        all_done = false;
        continue;
      }
      w = p / dp;
      s = Complex();
      for (std::size_t j = 0; j < d; ++j) {
        if (j == i) continue;
        diff = z[i] - z[j];
        if (diff.is_zero()) continue;
        s += one / diff;
      }
      corr = w / (one - w * s);
      z[i] -= corr;
      const Real scale = max_of(z[i].abs(), Real(1));
      if (corr.abs() <= target * scale)
        done[i] = 1;
      else
        all_done = false;
    }
    if (all_done) return true;
  }
  return false;
}

Real backward_error(const std::vector<Complex>& b, const Complex& y) {
  const Complex value = horner(std::span<const Complex>(b), y);
  const Real r = y.abs();
  Real denom(0);
  Real power(1);
  for (const auto& c : b) {
    denom += c.abs() * power;
    power *= r;
  }
  if (denom == 0) return Real(0);
  return value.abs() / denom;
}

void fill_verdict(ZeroReport& rep) {
  rep.max_circle_distance = 0;
  rep.max_disk_excess = 0;
  rep.max_abs = 0;
  for (const auto& rt : rep.roots) {
    const Real a = rt.abs();
    rep.max_circle_distance = max_of(rep.max_circle_distance, Real(mp::abs(a - 1)));
    rep.max_disk_excess = max_of(rep.max_disk_excess, Real(a - 1));
    rep.max_abs = max_of(rep.max_abs, a);
  }
  if (!rep.reliable) {
    rep.verdict = Verdict::neither;
    return;
  }
  if (rep.max_circle_distance < rep.tolerance)
    rep.verdict = Verdict::unimodular;
  else if (rep.max_disk_excess <= rep.tolerance)
    rep.verdict = Verdict::in_disk;
  else
    rep.verdict = Verdict::neither;
}

ZeroReport find_roots_at(std::span<const Complex> coeffs, int precision, std::uint64_t seed, double tolerance,
                         int escalations_left) {
  PrecisionGuard guard(precision);
  Prepared prep = prepare(coeffs, precision);
  const int d = static_cast<int>(prep.b.size()) - 1;

  ZeroReport rep;
  rep.precision = precision;
  rep.seed = seed;
  rep.tolerance = tolerance;
  rep.scale_exponent = prep.scale_exponent;
  rep.stripped_leading = prep.stripped_leading;
  rep.zero_roots = prep.zero_roots;
  rep.degree = d + prep.zero_roots;

  std::vector<Complex> y;
  bool converged = true;
  if (d > 0) {
    std::vector<LComplex> bl(prep.b.size());
    std::transform(prep.b.begin(), prep.b.end(), bl.begin(), to_lcomplex);
    std::vector<LComplex> z0;
    int ld_iterations = 0;
    bool seeded = false;
    if (bl.back() != LComplex(0)) {
      z0 = initial_circle(bl, seed);
      seeded = aberth_long_double(bl, z0, ld_iterations);
      rep.method = "aberth";
      if (!seeded) {
        z0 = companion_roots(bl);
        rep.method = "companion+aberth";
        seeded = true;
      }
    }
    if (!seeded) {
      // Long-double underflow of the leading coefficient; start from a circle.
      z0.assign(static_cast<std::size_t>(d), LComplex(0));
      CounterRng rng(seed, 1);
      const long double two_pi = 2 * std::numbers::pi_v<long double>;
      for (int j = 0; j < d; ++j)
        z0[static_cast<std::size_t>(j)] = std::polar(1.0L, two_pi * (j + 0.25L * rng.uniform()) / d);
      rep.method = "aberth";
    }
    rep.iterations = ld_iterations;
    y.reserve(z0.size());
    for (const auto& v : z0) y.push_back({Real(v.real()), Real(v.imag())});
    converged = aberth_full(prep.b, y, precision, rep.iterations);
  }

  const Real residual_limit = pow10(-precision / 3);
  rep.reliable = true;
  rep.roots.reserve(static_cast<std::size_t>(rep.degree));
  rep.residuals.reserve(static_cast<std::size_t>(rep.degree));
  for (const auto& yi : y) {
    Real res = backward_error(prep.b, yi);
    if (!(res <= residual_limit)) rep.reliable = false;
    rep.residuals.push_back(std::move(res));
    rep.roots.push_back({mp::ldexp(yi.re, prep.scale_exponent), mp::ldexp(yi.im, prep.scale_exponent)});
  }
  for (int j = 0; j < prep.zero_roots; ++j) {
    rep.roots.push_back(Complex());
    rep.residuals.push_back(Real(0));
  }

  if (!rep.reliable && escalations_left > 0) {
    // More working digits for the same coefficients.
    return find_roots_at(coeffs, precision * 2, seed, tolerance, escalations_left - 1);
  }
  if (!rep.reliable && !converged)
    throw NumericalError("find_roots: Aberth iteration did not converge at " + std::to_string(precision) +
                         " digits (degree " + std::to_string(d) + ", method " + rep.method + ")");
  fill_verdict(rep);
  return rep;
}

std::vector<Complex> to_complex(std::span<const Real> coeffs) {
  std::vector<Complex> out;
  out.reserve(coeffs.size());
  for (const auto& c : coeffs) out.emplace_back(c);
  return out;
}

}  // namespace

ZeroReport find_roots(std::span<const Complex> coeffs, int precision, std::uint64_t seed, double tolerance) {
  return find_roots_at(coeffs, precision, seed, tolerance, 2);
}

ZeroReport find_roots(std::span<const Real> coeffs, int precision, std::uint64_t seed, double tolerance) {
  const auto c = to_complex(coeffs);
  return find_roots(std::span<const Complex>(c), precision, seed, tolerance);
}

ZeroReport unimodularity_report(std::span<const Complex> coeffs, double tolerance, int precision,
                                std::uint64_t seed, bool cohn) {
  ZeroReport rep = find_roots(coeffs, precision, seed, tolerance);
  if (!cohn) return rep;
  const bool real = std::all_of(coeffs.begin(), coeffs.end(), [](const Complex& c) { return c.im == 0; });
  if (!real || coeffs.size() < 3) return rep;
  PrecisionGuard guard(precision);
  std::vector<Real> re;
  re.reserve(coeffs.size());
  for (const auto& c : coeffs) re.push_back(c.re);
  if (!self_reciprocal_sign(re, Real(tolerance))) return rep;
  std::vector<Real> deriv;
  for (std::size_t j = 1; j < re.size(); ++j) deriv.push_back(re[j] * static_cast<long>(j));
  const ZeroReport d = find_roots(std::span<const Real>(deriv), precision, seed, tolerance);
  rep.cohn_check = d.reliable && d.max_abs <= 1 + Real(tolerance);
  return rep;
}

ZeroReport unimodularity_report(std::span<const Real> coeffs, double tolerance, int precision, std::uint64_t seed,
                                bool cohn) {
  const auto c = to_complex(coeffs);
  return unimodularity_report(std::span<const Complex>(c), tolerance, precision, seed, cohn);
}

TruncExp truncated_exp(int m, int N, int precision) {
  if (m < 1 || N < 1) throw InvalidArgument("truncated_exp: m and N must be >= 1");
  PrecisionGuard guard(precision);
  TruncExp t;
  t.m = m;
  t.N = N;
  const Real alpha = two_pi() * N;
  t.t_coeffs.reserve(static_cast<std::size_t>(m) + 1);
  Real term(1);
  for (int n = 0; n <= m; ++n) {
    t.t_coeffs.push_back(term);
    term = term * alpha / (n + 1);
  }
  t.h_coeffs.assign(t.t_coeffs.rbegin(), t.t_coeffs.rend());
  return t;
}

Real t_lower_bound(int m, int N, int precision) {
  PrecisionGuard guard(precision);
  const Real alpha = two_pi() * N;
  return mp::exp(-alpha) - mp::pow(alpha, m + 1) / factorial(m + 1) * mp::exp(alpha);
}

bool eq_h2(int m, int N, int precision) {
  PrecisionGuard guard(precision);
  const Real lhs = 2 * two_pi() * N + Real(2 * m + 2) * mp::log(two_pi() * N);
  const Real rhs = Real(m + 1) * mp::log(Real(m + 1)) - m;
  return lhs < rhs;
}

HDiskCriterion h_disk_criterion(int m, int N, int precision) {
  if (m < 1 || N < 1) throw InvalidArgument("h_disk_criterion: m and N must be >= 1");
  PrecisionGuard guard(precision);
  HDiskCriterion c;
  c.lower_bound = t_lower_bound(m, N, precision);
  c.eq_h2_holds = eq_h2(m, N, precision);
  c.order_within_bound = Real(N) <= mp::log(Real(m)) / 4;
  const bool general = m >= 210 && c.order_within_bound && c.eq_h2_holds;
  const bool cited = N == 1 && m >= 20;
  c.holds = general || cited;
  c.basis = general ? "eq-h2" : (cited ? "cited-m>=20" : "none");
  return c;
}

TSample sample_t_lower_bound(int m, int N, int n_samples, std::uint64_t seed, int precision) {
  if (n_samples < 1) throw InvalidArgument("sample_t_lower_bound: need at least one sample");
  if (!h_disk_criterion(m, N, precision).holds)
    throw InvalidArgument("sample_t_lower_bound: disk criterion does not hold for (m, N)");
  PrecisionGuard guard(precision);
  const TruncExp t = truncated_exp(m, N, precision);
  CounterRng rng(seed);
  TSample out;
  out.n_samples = n_samples;
  out.seed = seed;
  const Real tp = two_pi();
  for (int i = 0; i < n_samples; ++i) {
    const Real radius = mp::sqrt(Real(rng.uniform()));
    const Real angle = tp * Real(rng.uniform());
    const Complex z(radius * mp::cos(angle), radius * mp::sin(angle));
    const Real v = horner(std::span<const Real>(t.t_coeffs), z).abs();
    if (i == 0 || v < out.minimum) {
      out.minimum = v;
      out.argmin = z;
    }
  }
  return out;
}

}  // namespace periodrh::zeros
