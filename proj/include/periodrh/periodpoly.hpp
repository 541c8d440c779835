#pragma once

#include "periodrh/lfunctions.hpp"
#include "periodrh/numeric.hpp"

#include <span>
#include <string>
#include <vector>

namespace periodrh::periodpoly {

using lfunctions::CriticalLValues;

enum class Kind { r, p, q, generic };

std::string to_string(Kind kind);

/// Polynomial in ascending powers. Kinds p, q and generic have real
/// coefficients (imaginary parts exactly zero).
struct PeriodPolynomial {
  Kind kind = Kind::generic;
  int k = 0;
  int degree = 0;
  std::vector<Complex> coeffs;
  /// Leading coefficient below 10^{-P/2} (kind q only).
  bool degenerate_leading = false;
  int precision = 0;

  std::vector<Real> real_coeffs() const;
};

/// r_f(z) = -(k-2)!/(2 pi i)^{k-1} sum_{n=0}^{k-2} (2 pi i z)^n / n! L(f, k-n-1).
PeriodPolynomial period_polynomial_r(const CriticalLValues& values);
/// p_f(z) = sum_{n=0}^{w} L(f, w-n+1) (2 pi z)^n / n!.
PeriodPolynomial modified_polynomial_p(const CriticalLValues& values);
/// q_f(z) = sum_{n<m} L(f, w-n+1) (2 pi)^n / n! z^{m-n} + L(f, k/2) (2 pi)^m / (2 m!).
PeriodPolynomial half_polynomial_q(const CriticalLValues& values);

/// Coefficients i^{n+k-1} Lambda(f, k-n-1) for n = 1..k-2 (constant term zero):
/// the second closed form for r_f.
PeriodPolynomial period_polynomial_r_lambda_form(const CriticalLValues& values);

/// Comparison of the two closed forms for r_f.
struct DisplayComparison {
  /// max_{1<=n<=w} |r[n] - binom(w, n) r'[n]| / |r[n]| (zero terms skipped).
  Real binomial_ratio_deviation;
  /// max_{1<=n<=w} |r[n] - r'[n]| / |r[n]|.
  Real direct_deviation;
  /// r[0]; the second form has no constant term.
  Complex constant_term;
};

DisplayComparison compare_r_displays(const CriticalLValues& values);

/// max |eps p[w-n] - p[n]|.
Real self_reciprocity_residual(const PeriodPolynomial& p);

/// Max coefficient deviation between i^k p and z^m q(z) + i^k z^m q(1/z).
Real reconstruct_p_from_q(const PeriodPolynomial& q, const PeriodPolynomial& p);

struct OddEven {
  PeriodPolynomial odd;
  PeriodPolynomial even;
};

OddEven odd_even_parts(const PeriodPolynomial& r);

/// Z with U(x) / (1-x)^{d+1} = sum_n Z(-n) x^n, in ascending powers of s.
struct ZetaPolynomial {
  int degree = 0;
  std::vector<Real> coeffs;
  /// eta in Z(s) = eta (-1)^d Z(1-s): the reciprocity sign of U, or +1 when U
  /// is not self-reciprocal.
  int sign = 1;
  /// max coefficient of Z(s) - sign (-1)^d Z(1-s).
  Real functional_equation_residual;
  std::string source;
  int precision = 0;
};

/// Throws InvalidArgument when |U(1)| <= 10^{-P/2}.
ZetaPolynomial rv_transform(std::span<const Real> u, int precision, std::string source = {});

/// Ascending coefficients of Z(1-s).
std::vector<Real> reflect(std::span<const Real> z);

struct ZetaCheck {
  Real functional_equation_residual;
  Real max_critical_line_distance;
  int roots = 0;
  bool reliable = false;
};

ZetaCheck zeta_checks(const ZetaPolynomial& z, int precision, std::uint64_t seed = 0);

}  // namespace periodrh::periodpoly
