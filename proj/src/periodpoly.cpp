#include "periodrh/periodpoly.hpp"

#include "periodrh/errors.hpp"
#include "periodrh/zeros.hpp"

#include <algorithm>
#include <cmath>

namespace periodrh::periodpoly {

namespace mp = boost::multiprecision;

namespace {

void check_complete(const CriticalLValues& v) {
  if (v.k < 12 || static_cast<int>(v.lambda.size()) != v.k || static_cast<int>(v.l.size()) != v.k)
    throw InvalidArgument("period polynomial: incomplete critical values");
}

PeriodPolynomial make(Kind kind, const CriticalLValues& v, int degree) {
  PeriodPolynomial out;
  out.kind = kind;
  out.k = v.k;
  out.degree = degree;
  out.precision = v.precision;
  out.coeffs.reserve(static_cast<std::size_t>(degree) + 1);
  return out;
}

Real relative_gap(const Complex& a, const Complex& b) {
  const Real na = a.abs();
  if (na == 0) return Real(0);
  return (a - b).abs() / na;
}

}  // namespace

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::r:
      return "r";
    case Kind::p:
      return "p";
    case Kind::q:
      return "q";
    case Kind::generic:
      return "generic";
  }
  return "generic";
}

std::vector<Real> PeriodPolynomial::real_coeffs() const {
  std::vector<Real> out;
  out.reserve(coeffs.size());
  for (const auto& c : coeffs) out.push_back(c.re);
  return out;
}

PeriodPolynomial period_polynomial_r(const CriticalLValues& v) {
  check_complete(v);
  PrecisionGuard guard(v.working_precision);
  const int k = v.k;
  const int w = k - 2;
  PeriodPolynomial out = make(Kind::r, v, w);
  const Real tp = two_pi();
  const Real wf = factorial(w);
  for (int n = 0; n <= w; ++n) {
    // -(k-2)!/n! (2 pi)^{n-k+1} i^{n-k+1} L(f, k-n-1)
    const Real mag = -wf / factorial(n) * mp::pow(tp, n - k + 1) * v.l_at(k - n - 1);
    out.coeffs.push_back(i_power(n - k + 1) * mag);
  }
  return out;
}

PeriodPolynomial modified_polynomial_p(const CriticalLValues& v) {
  check_complete(v);
  PrecisionGuard guard(v.working_precision);
  const int w = v.k - 2;
  PeriodPolynomial out = make(Kind::p, v, w);
  const Real tp = two_pi();
  Real scale(1);  // (2 pi)^n / n!
  for (int n = 0; n <= w; ++n) {
    if (n > 0) scale = scale * tp / n;
    out.coeffs.emplace_back(Real(v.l_at(w - n + 1) * scale));
  }
  return out;
}

PeriodPolynomial half_polynomial_q(const CriticalLValues& v) {
  check_complete(v);
  const PeriodPolynomial p = modified_polynomial_p(v);
  PrecisionGuard guard(v.working_precision);
  const int m = v.k / 2 - 1;
  PeriodPolynomial out = make(Kind::q, v, m);
  // z^{m-n} carries p[n] for n < m; the constant term is half of p[m].
  out.coeffs.emplace_back(Real(p.coeffs[static_cast<std::size_t>(m)].re / 2));
  for (int j = 1; j <= m; ++j) out.coeffs.push_back(p.coeffs[static_cast<std::size_t>(m - j)]);
  out.degenerate_leading = out.coeffs.back().abs() < pow10(-v.precision / 2);
  return out;
}

PeriodPolynomial period_polynomial_r_lambda_form(const CriticalLValues& v) {
  check_complete(v);
  PrecisionGuard guard(v.working_precision);
  const int k = v.k;
  const int w = k - 2;
  PeriodPolynomial out = make(Kind::r, v, w);
  out.coeffs.emplace_back();
  for (int n = 1; n <= w; ++n) out.coeffs.push_back(i_power(n + k - 1) * v.lambda_at(k - n - 1));
  return out;
}

DisplayComparison compare_r_displays(const CriticalLValues& v) {
  const PeriodPolynomial r = period_polynomial_r(v);
  const PeriodPolynomial r2 = period_polynomial_r_lambda_form(v);
  PrecisionGuard guard(v.working_precision);
  const int w = v.k - 2;
  DisplayComparison out;
  out.binomial_ratio_deviation = 0;
  out.direct_deviation = 0;
  for (int n = 1; n <= w; ++n) {
    const auto& a = r.coeffs[static_cast<std::size_t>(n)];
    const auto& b = r2.coeffs[static_cast<std::size_t>(n)];
    out.binomial_ratio_deviation = max_of(out.binomial_ratio_deviation, relative_gap(a, b * binomial(w, n)));
    out.direct_deviation = max_of(out.direct_deviation, relative_gap(a, b));
  }
  out.constant_term = r.coeffs.front();
  return out;
}

Real self_reciprocity_residual(const PeriodPolynomial& p) {
  if (p.kind != Kind::p) throw InvalidArgument("self_reciprocity_residual: expected kind p");
  PrecisionGuard guard(static_cast<int>(p.coeffs.front().re.precision()));
  const int w = p.degree;
  const int eps = (p.k / 2) % 2 == 0 ? 1 : -1;
  Real worst(0);
  for (int n = 0; n <= w; ++n) {
    const Real gap = mp::abs(p.coeffs[static_cast<std::size_t>(n)].re - eps * p.coeffs[static_cast<std::size_t>(w - n)].re);
    worst = max_of(worst, gap);
  }
  return worst;
}

Real reconstruct_p_from_q(const PeriodPolynomial& q, const PeriodPolynomial& p) {
  if (q.kind != Kind::q || p.kind != Kind::p) throw InvalidArgument("reconstruct_p_from_q: expected kinds q and p");
  if (q.k != p.k) throw InvalidArgument("reconstruct_p_from_q: weight mismatch");
  PrecisionGuard guard(static_cast<int>(p.coeffs.front().re.precision()));
  const int k = q.k;
  const int m = k / 2 - 1;
  const int w = k - 2;
  const Complex ik = i_power(k);
  std::vector<Complex> rhs(static_cast<std::size_t>(w) + 1);
  for (int j = 0; j <= m; ++j) {
    const auto& c = q.coeffs[static_cast<std::size_t>(j)];
    rhs[static_cast<std::size_t>(m + j)] += c;
    rhs[static_cast<std::size_t>(m - j)] += ik * c;
  }
  Real worst(0);
  for (int n = 0; n <= w; ++n)
    worst = max_of(worst, (ik * p.coeffs[static_cast<std::size_t>(n)] - rhs[static_cast<std::size_t>(n)]).abs());
  return worst;
}

OddEven odd_even_parts(const PeriodPolynomial& r) {
  if (r.kind != Kind::r) throw InvalidArgument("odd_even_parts: expected kind r");
  OddEven out;
  out.odd = r;
  out.even = r;
  out.odd.kind = out.even.kind = Kind::generic;
  for (std::size_t n = 0; n < r.coeffs.size(); ++n) {
    if (n % 2 == 0)
      out.odd.coeffs[n] = Complex();
    else
      out.even.coeffs[n] = Complex();
  }
  return out;
}

std::vector<Real> reflect(std::span<const Real> z) {
  // Z(1-s) = sum_j z_j (1-s)^j, expanded binomially.
  std::vector<Real> out(z.size(), Real(0));
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j] == 0) continue;
    for (std::size_t i = 0; i <= j; ++i) {
      Real term = z[j] * binomial(static_cast<int>(j), static_cast<int>(i));
      if (i % 2 == 1) term = -term;
      out[i] += term;
    }
  }
  return out;
}

ZetaPolynomial rv_transform(std::span<const Real> u_in, int precision, std::string source) {
  if (u_in.empty()) throw InvalidArgument("rv_transform: empty polynomial");
  const int d = static_cast<int>(u_in.size()) - 1;
  // Interpolation through binomial-size values loses about 2 d log10(2) digits.
  const int work = precision + kGuardDigits + static_cast<int>(std::ceil(2 * d * std::log10(2.0)));
  PrecisionGuard guard(work);
  std::vector<Real> u;
  u.reserve(u_in.size());
  for (const auto& c : u_in) u.push_back(with_precision(c, work));

  Real at_one(0);
  for (const auto& c : u) at_one += c;
  if (!(mp::abs(at_one) > pow10(-precision / 2)))
    throw InvalidArgument("rv_transform: U(1) vanishes, transform undefined");

  // Z(-n) = sum_{j<=n} u_j binom(n-j+d, d)
  std::vector<Real> values(static_cast<std::size_t>(d) + 1, Real(0));
  for (int n = 0; n <= d; ++n)
    for (int j = 0; j <= n; ++j) values[static_cast<std::size_t>(n)] += u[static_cast<std::size_t>(j)] * binomial(n - j + d, d);

  // Newton divided differences at nodes s_n = -n (unit spacing).
  std::vector<Real> a = values;
  for (int level = 1; level <= d; ++level)
    for (int n = d; n >= level; --n)
      a[static_cast<std::size_t>(n)] = (a[static_cast<std::size_t>(n)] - a[static_cast<std::size_t>(n - 1)]) / (-level);

  // Expand a_0 + (s - s_0)(a_1 + (s - s_1)(...)) into monomials.
  std::vector<Real> z{a[static_cast<std::size_t>(d)]};
  for (int i = d - 1; i >= 0; --i) {
    // z <- z * (s + i) + a_i
    std::vector<Real> next(z.size() + 1, Real(0));
    for (std::size_t j = 0; j < z.size(); ++j) {
      next[j + 1] += z[j];
      next[j] += z[j] * i;
    }
    next[0] += a[static_cast<std::size_t>(i)];
    z = std::move(next);
  }

  ZetaPolynomial out;
  out.degree = d;
  out.precision = precision;
  out.source = std::move(source);
  const auto eta = zeros::self_reciprocal_sign(std::span<const Real>(u), pow10(-precision / 2));
  out.sign = eta.value_or(1);
  const int fe_sign = out.sign * (d % 2 == 0 ? 1 : -1);
  const auto zr = reflect(z);
  out.functional_equation_residual = 0;
  Real scale(0);
  for (const auto& c : z) scale = max_of(scale, Real(mp::abs(c)));
  for (std::size_t j = 0; j < z.size(); ++j)
    out.functional_equation_residual = max_of(out.functional_equation_residual, Real(mp::abs(z[j] - fe_sign * zr[j])));
  if (scale > 0) out.functional_equation_residual /= scale;
  out.coeffs.reserve(z.size());
  for (const auto& c : z) out.coeffs.push_back(with_precision(c, precision + kGuardDigits));
  return out;
}

ZetaCheck zeta_checks(const ZetaPolynomial& z, int precision, std::uint64_t seed) {
  ZetaCheck out;
  out.functional_equation_residual = z.functional_equation_residual;
  PrecisionGuard guard(precision);
  out.max_critical_line_distance = 0;
  // Drop negligible leading coefficients so constant inputs have no roots.
  Real scale(0);
  for (const auto& c : z.coeffs) scale = max_of(scale, Real(mp::abs(c)));
  std::size_t top = z.coeffs.size();
  while (top > 1 && mp::abs(z.coeffs[top - 1]) <= scale * pow10(-precision / 2)) --top;
  if (top <= 1) {
    out.reliable = true;
    return out;
  }
  const auto rep = zeros::find_roots(std::span<const Real>(z.coeffs.data(), top), precision, seed);
  out.roots = static_cast<int>(rep.roots.size());
  out.reliable = rep.reliable;
  const Real half = Real(1) / 2;
  for (const auto& r : rep.roots) out.max_critical_line_distance = max_of(out.max_critical_line_distance, Real(mp::abs(r.re - half)));
  return out;
}

}  // namespace periodrh::periodpoly
