#pragma once

#include "periodrh/modforms.hpp"
#include "periodrh/numeric.hpp"

#include <span>
#include <vector>

namespace periodrh::lfunctions {

using modforms::CuspForm;

/// Gamma(s, x) = (s-1)! e^{-x} sum_{j<s} x^j / j! for integer s >= 1, x >= 0.
Real incomplete_gamma_integer(int s, const Real& x, int precision);

/// Critical values of Lambda(f, s) = (2 pi)^{-s} Gamma(s) L(f, s) and L(f, s)
/// for s = 1..k-1. Index 0 of both arrays is unused.
struct CriticalLValues {
  int k = 0;
  int epsilon = 1;
  std::vector<Real> lambda;
  std::vector<Real> l;
  /// Uniform bound on the series truncation error of every lambda[s].
  Real trunc_bound;
  /// Coefficient constant C used for trunc_bound.
  Real c_upper;
  /// Set when c_upper is twice a truncated lower estimate rather than a proven
  /// upper bound.
  bool unverified_tail = false;
  int precision = 0;
  /// Digits carried by lambda and l.
  int working_precision = 0;
  int n_terms = 0;

  const Real& lambda_at(int s) const { return lambda[static_cast<std::size_t>(s)]; }
  const Real& l_at(int s) const { return l[static_cast<std::size_t>(s)]; }
};

/// Digits needed so lambda values carry `precision` digits after the decimal
/// point for coefficient constant 10^log10_c.
int lvalue_working_precision(int k, int precision, double log10_c);

/// Lambda(f, s) = sum_{n >= N} c(n) [(2 pi n)^{-s} Gamma(s, 2 pi n)
///                                   + eps (2 pi n)^{s-k} Gamma(k-s, 2 pi n)].
/// Throws InsufficientPrecision when f stores too few coefficients for a
/// truncation error below 10^{-precision-10}.
CriticalLValues completed_lvalues(const CuspForm& f, int precision);

/// Fills l from lambda: L(f, s) = (2 pi)^s Lambda(f, s) / Gamma(s).
void fill_l_from_lambda(CriticalLValues& v);

/// Values of sum_j coeffs_j f_j / leading_value from the values of the f_j.
CriticalLValues combine(std::span<const CriticalLValues> tables, std::span<const Real> coeffs,
                        const Real& leading_value);

/// Independent check value: int_1^oo f(iy) (y^{s-1} + eps y^{k-s-1}) dy by
/// double-exponential quadrature in 50-digit binary floating point.
struct OracleValue {
  Real value;
  Real error_estimate;
};

/// precision must not exceed 45 digits. Throws NumericalError when the
/// quadrature error estimate is above 10^{-precision}.
OracleValue oracle_lambda_integral(const CuspForm& f, int s, int precision);

/// Explicit tail bounds E1, E2 for the Dirichlet series of L(f, s).
struct TailBounds {
  int k = 0;
  int N = 0;
  Real c_upper;
  /// 4 C / (N+1)^{k/4}
  Real e1;
  /// 2 C [2 sqrt(k) log(2k) - 2 sqrt(N-1) + 1 + 2^{k/2+1} e^{-pi k}]
  Real e2;
};

TailBounds tail_bounds(int k, int N, const Real& c_upper, int precision = 50);

/// zeta(3/2)^2 / 4 - 1/2.
Real tail_zeta_constant(int precision = 50);
/// sqrt(x) log(2x) - sqrt(x) + 2^{x/2} e^{-pi x}.
Real tail_g(const Real& x);

struct FunctionalEquationCheck {
  /// max_s |lambda[s] - eps lambda[k-s]|
  Real lambda_residual;
  /// max_n of the relative deviation in
  /// L(f, w-n+1) = i^k (2 pi)^{w-n} n! / ((2 pi)^n (w-n)!) L(f, n+1).
  Real l_identity_residual;
};

FunctionalEquationCheck verify_functional_equation(const CriticalLValues& values);

}  // namespace periodrh::lfunctions
