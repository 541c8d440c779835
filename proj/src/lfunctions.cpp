#include "periodrh/lfunctions.hpp"

#include "periodrh/errors.hpp"
#include "periodrh/tail.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace periodrh::lfunctions {

namespace mp = boost::multiprecision;

namespace {

void check_weight(int k) {
  if (k < 12 || k % 2 != 0) throw InvalidArgument("weight must be an even integer >= 12, got " + std::to_string(k));
}

int epsilon_of(int k) { return (k / 2) % 2 == 0 ? 1 : -1; }

// log10 of an upper estimate for max_s |Lambda(f, s)|: dominated by the n = 1
// term at s = k-1, about C (k-2)! / (2 pi)^{k-1}.
double log10_lambda_scale(int k, double log10_c) {
  return log10_c + (std::lgamma(k - 1.0) - (k - 1.0) * std::log(2 * std::numbers::pi)) / std::numbers::ln10 + 1;
}

}  // namespace

Real incomplete_gamma_integer(int s, const Real& x, int precision) {
  if (s < 1) throw InvalidArgument("incomplete_gamma_integer: s must be >= 1");
  if (x < 0) throw InvalidArgument("incomplete_gamma_integer: x must be >= 0");
  PrecisionGuard guard(precision + kGuardDigits);
  const Real xw = with_precision(x, precision + kGuardDigits);
  Real term(1), sum(1);
  for (int j = 1; j < s; ++j) {
    term *= xw / j;
    sum += term;
  }
  return factorial(s - 1) * mp::exp(-xw) * sum;
}

int lvalue_working_precision(int k, int precision, double log10_c) {
  const double scale = std::max(0.0, log10_lambda_scale(k, log10_c));
  return precision + kGuardDigits + static_cast<int>(std::ceil(scale));
}

void fill_l_from_lambda(CriticalLValues& v) {
  PrecisionGuard guard(v.working_precision);
  v.l.assign(static_cast<std::size_t>(v.k), Real(0));
  const Real tp = two_pi();
  Real power = tp;  // (2 pi)^s
  Real gamma(1);    // Gamma(s) = (s-1)!
  for (int s = 1; s < v.k; ++s) {
    if (s > 1) {
      power *= tp;
      gamma *= s - 1;
    }
    v.l[static_cast<std::size_t>(s)] = power * v.lambda[static_cast<std::size_t>(s)] / gamma;
  }
}

CriticalLValues completed_lvalues(const CuspForm& f, int precision) {
  check_weight(f.k);
  const int k = f.k;
  if (f.N < 1 || f.N > k / 12) throw InvalidArgument("completed_lvalues: vanishing order outside 1..k/12");

  const auto est = modforms::deligne_constant_estimate(f, std::min(f.n_max(), std::max(f.N, 50)));
  CriticalLValues v;
  v.k = k;
  v.epsilon = epsilon_of(k);
  v.precision = precision;
  if (est.upper) {
    v.c_upper = *est.upper;
  } else {
    v.c_upper = 2 * est.lower;
    v.unverified_tail = true;
  }
  const double log10_c = std::max(0.0, log10_abs(v.c_upper));
  const int needed = lvalue_terms(k, precision + 10, log10_c);
  if (f.n_max() < needed)
    throw InsufficientPrecision("completed_lvalues: need " + std::to_string(needed) + " coefficients, form has " +
                                std::to_string(f.n_max()));
  v.n_terms = needed;
  v.working_precision = lvalue_working_precision(k, precision, log10_c);

  PrecisionGuard guard(v.working_precision);
  v.trunc_bound = mp::pow(Real(10), Real(lvalue_tail_log10(k, needed, log10_c)));

  const Real tp = two_pi();
  std::vector<Real> sum(static_cast<std::size_t>(k), Real(0));
  std::vector<Real> g(static_cast<std::size_t>(k));
  for (int n = f.N; n <= needed; ++n) {
    const Real& c = f.c(n);
    if (c == 0) continue;
    const Real x = tp * n;
    const Real inv_x = 1 / x;
    // g[a] = x^{-a} Gamma(a, x) via Gamma(a+1, x) = a Gamma(a, x) + x^a e^{-x}.
    const Real e = mp::exp(-x);
    g[1] = e * inv_x;
    for (int a = 1; a + 1 < k; ++a) g[static_cast<std::size_t>(a) + 1] = (g[static_cast<std::size_t>(a)] * a + e) * inv_x;
    for (int s = 1; s < k; ++s) {
      const Real& lo = g[static_cast<std::size_t>(s)];
      const Real& hi = g[static_cast<std::size_t>(k - s)];
      sum[static_cast<std::size_t>(s)] += (v.epsilon > 0 ? Real(lo + hi) : Real(lo - hi)) * c;
    }
  }
  v.lambda = std::move(sum);
  fill_l_from_lambda(v);
  return v;
}

CriticalLValues combine(std::span<const CriticalLValues> tables, std::span<const Real> coeffs,
                        const Real& leading_value) {
  if (tables.empty() || tables.size() != coeffs.size())
    throw InvalidArgument("combine: need one coefficient per table");
  if (leading_value == 0) throw InvalidArgument("combine: zero leading value");
  const auto& first = tables.front();
  CriticalLValues v;
  v.k = first.k;
  v.epsilon = first.epsilon;
  v.precision = first.precision;
  v.working_precision = first.working_precision;
  v.n_terms = first.n_terms;
  for (const auto& t : tables) {
    if (t.k != v.k) throw InvalidArgument("combine: tables of different weight");
    v.working_precision = std::min(v.working_precision, t.working_precision);
    v.precision = std::min(v.precision, t.precision);
    v.unverified_tail = v.unverified_tail || t.unverified_tail;
  }
  PrecisionGuard guard(v.working_precision);
  v.lambda.assign(static_cast<std::size_t>(v.k), Real(0));
  v.trunc_bound = 0;
  v.c_upper = 0;
  const Real inv = 1 / with_precision(leading_value, v.working_precision);
  for (std::size_t j = 0; j < tables.size(); ++j) {
    if (coeffs[j] == 0) continue;
    const Real a = with_precision(coeffs[j], v.working_precision) * inv;
    for (int s = 1; s < v.k; ++s) v.lambda[static_cast<std::size_t>(s)] += a * tables[j].lambda_at(s);
    v.trunc_bound += mp::abs(a) * tables[j].trunc_bound;
    v.c_upper += mp::abs(a) * tables[j].c_upper;
  }
  fill_l_from_lambda(v);
  return v;
}

OracleValue oracle_lambda_integral(const CuspForm& f, int s, int precision) {
  using Float = mp::cpp_bin_float_50;
  const int k = f.k;
  check_weight(k);
  if (s < 1 || s > k - 1) throw InvalidArgument("oracle_lambda_integral: s must lie in 1..k-1");
  if (precision > 45) throw InvalidArgument("oracle_lambda_integral: precision above 45 digits");

  const auto est = modforms::deligne_constant_estimate(f, std::min(f.n_max(), std::max(f.N, 50)));
  const Real c = est.upper ? *est.upper : Real(2 * est.lower);
  const int n_max = f.n_max();
  if (n_max + 1 < k / std::numbers::pi ||
      lvalue_tail_log10(k, n_max, std::max(0.0, log10_abs(c))) > -precision - 5)
    throw InsufficientPrecision("oracle_lambda_integral: too few coefficients for the requested precision");

  std::vector<Float> coeffs(static_cast<std::size_t>(n_max) + 1);
  for (int n = f.N; n <= n_max; ++n) coeffs[static_cast<std::size_t>(n)] = Float(to_string(f.c(n), 60));
  const int eps = epsilon_of(k);
  const Float two_pi_f = 2 * boost::math::constants::pi<Float>();

  auto integrand = [&](const Float& y) -> Float {
    const Float q = exp(-two_pi_f * y);
    Float qn = pow(q, f.N);
    Float fy = 0;
    for (int n = f.N; n <= n_max; ++n) {
      if (qn == 0) break;
      fy += coeffs[static_cast<std::size_t>(n)] * qn;
      qn *= q;
    }
    if (fy == 0) return Float(0);
    return fy * (pow(y, s - 1) + eps * pow(y, k - s - 1));
  };

  boost::math::quadrature::exp_sinh<Float> integrator;
  Float error = 0;
  Float l1 = 0;
  const Float tol = pow(Float(10), -(precision + 3));
  const Float value = integrator.integrate(integrand, Float(1), std::numeric_limits<Float>::infinity(), tol, &error, &l1);

  OracleValue out;
  PrecisionGuard guard(precision + kGuardDigits);
  out.value = from_string(value.str(60, std::ios_base::scientific));
  out.error_estimate = from_string(error.str(10, std::ios_base::scientific));
  if (out.error_estimate > pow10(-precision))
    throw NumericalError("oracle_lambda_integral: quadrature error estimate " + to_string(out.error_estimate, 5) +
                         " above tolerance");
  return out;
}

TailBounds tail_bounds(int k, int N, const Real& c_upper, int precision) {
  check_weight(k);
  if (N < 1 || N > k / 12) throw InvalidArgument("tail_bounds: N must satisfy 1 <= N <= k/12");
  if (!(c_upper > 0)) throw InvalidArgument("tail_bounds: c_upper must be positive");
  PrecisionGuard guard(precision + kGuardDigits);
  TailBounds t;
  t.k = k;
  t.N = N;
  t.c_upper = with_precision(c_upper, precision + kGuardDigits);
  const Real kk(k);
  t.e1 = 4 * t.c_upper / mp::pow(Real(N + 1), kk / 4);
  t.e2 = 2 * t.c_upper *
         (2 * mp::sqrt(kk) * mp::log(2 * kk) - 2 * mp::sqrt(Real(N - 1)) + 1 + mp::pow(Real(2), kk / 2 + 1) * mp::exp(-pi() * kk));
  return t;
}

Real tail_zeta_constant(int precision) {
  PrecisionGuard guard(precision + kGuardDigits);
  Real z;
  const Real three_halves = Real(3) / 2;
  mpfr_zeta(z.backend().data(), three_halves.backend().data(), MPFR_RNDN);
  return z * z / 4 - Real(1) / 2;
}

Real tail_g(const Real& x_in) {
  const Real x = with_precision(x_in, current_precision());
  const Real r = mp::sqrt(x);
  return r * mp::log(2 * x) - r + mp::pow(Real(2), x / 2) * mp::exp(-pi() * x);
}

FunctionalEquationCheck verify_functional_equation(const CriticalLValues& v) {
  PrecisionGuard guard(v.working_precision);
  FunctionalEquationCheck out;
  out.lambda_residual = 0;
  for (int s = 1; s < v.k; ++s)
    out.lambda_residual = max_of(out.lambda_residual, Real(mp::abs(v.lambda_at(s) - v.epsilon * v.lambda_at(v.k - s))));

  out.l_identity_residual = 0;
  const int w = v.k - 2;
  const Real tp = two_pi();
  for (int n = 0; n <= w; ++n) {
    const Real& lhs = v.l_at(w - n + 1);
    const Real rhs = v.epsilon * mp::pow(tp, w - 2 * n) * factorial(n) / factorial(w - n) * v.l_at(n + 1);
    const Real scale = max_of(max_of(Real(mp::abs(lhs)), Real(mp::abs(rhs))), Real(1));
    out.l_identity_residual = max_of(out.l_identity_residual, Real(mp::abs(lhs - rhs) / scale));
  }
  return out;
}

}  // namespace periodrh::lfunctions
