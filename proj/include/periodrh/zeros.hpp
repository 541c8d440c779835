#pragma once

#include "periodrh/numeric.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace periodrh::zeros {

enum class Verdict { unimodular, in_disk, neither };

std::string to_string(Verdict v);

/// Default verdict tolerance on ||root| - 1|.
inline constexpr double kDefaultTolerance = 1e-10;

/// All complex roots of a polynomial plus the certification data behind any
/// verdict drawn from them. Residual certification is backward-error based
/// (|p(root)| relative to sum |a_j||root|^j); there is no interval arithmetic.
struct ZeroReport {
  int degree = 0;
  std::vector<Complex> roots;
  std::vector<Real> residuals;
  Real max_circle_distance;
  Real max_disk_excess;
  Real max_abs;
  Verdict verdict = Verdict::neither;
  double tolerance = kDefaultTolerance;
  bool reliable = false;
  int precision = 0;
  /// Roots were computed for p(2^scale_exponent * y) and scaled back.
  int scale_exponent = 0;
  /// Leading coefficients dropped as numerically zero (degree drop).
  int stripped_leading = 0;
  /// Exact roots at the origin from vanishing trailing coefficients.
  int zero_roots = 0;
  std::uint64_t seed = 0;
  std::string method;
  int iterations = 0;
  /// Cohn cross-check (derivative roots in the closed disk); set only when
  /// the input is real and self-reciprocal.
  std::optional<bool> cohn_check;
};

/// Roots by Aberth-Ehrlich simultaneous iteration. A long-double pass seeds a
/// full-precision pass; if the long-double pass stalls, companion-matrix
/// eigenvalues seed it instead. Coefficients are in ascending powers.
ZeroReport find_roots(std::span<const Complex> coeffs, int precision, std::uint64_t seed = 0,
                      double tolerance = kDefaultTolerance);
ZeroReport find_roots(std::span<const Real> coeffs, int precision, std::uint64_t seed = 0,
                      double tolerance = kDefaultTolerance);

/// Roots plus verdict; real self-reciprocal input also gets the Cohn check.
ZeroReport unimodularity_report(std::span<const Complex> coeffs, double tolerance, int precision,
                                std::uint64_t seed = 0, bool cohn = true);
ZeroReport unimodularity_report(std::span<const Real> coeffs, double tolerance, int precision,
                                std::uint64_t seed = 0, bool cohn = true);

/// Evaluates sum coeffs[j] z^j.
Complex horner(std::span<const Complex> coeffs, const Complex& z);
Complex horner(std::span<const Real> coeffs, const Complex& z);

/// Sign eps in {+1,-1} with a_j = eps * a_{d-j} for all j within tol * max|a|,
/// or nullopt.
std::optional<int> self_reciprocal_sign(std::span<const Real> coeffs, const Real& tol);

/// Truncated exponential T_{m,N}(z) = sum_{n<=m} (2 pi N z)^n / n! and its
/// reversal H_{m,N}(z) = z^m T_{m,N}(1/z).
struct TruncExp {
  int m = 0;
  int N = 0;
  std::vector<Real> t_coeffs;
  std::vector<Real> h_coeffs;
};

TruncExp truncated_exp(int m, int N, int precision);

/// e^{-2 pi N} - (2 pi N)^{m+1} / (m+1)! * e^{2 pi N}: lower bound for
/// |T_{m,N}| on the closed unit disk.
Real t_lower_bound(int m, int N, int precision);

/// 4 pi N + (2m+2) log(2 pi N) < (m+1) log(m+1) - m.
bool eq_h2(int m, int N, int precision = 50);

struct HDiskCriterion {
  bool holds = false;
  Real lower_bound;
  bool eq_h2_holds = false;
  /// N <= log(m) / 4
  bool order_within_bound = false;
  /// "cited-m>=20", "eq-h2", or "none"
  std::string basis;
};

/// Sufficient condition for all zeros of H_{m,N} in the closed unit disk.
HDiskCriterion h_disk_criterion(int m, int N, int precision = 50);

struct TSample {
  Real minimum;
  Complex argmin;
  int n_samples = 0;
  std::uint64_t seed = 0;
};

/// Minimum of |T_{m,N}| over n_samples points drawn uniformly from the closed
/// unit disk with the counter-based generator.
TSample sample_t_lower_bound(int m, int N, int n_samples, std::uint64_t seed, int precision = 50);

}  // namespace periodrh::zeros
