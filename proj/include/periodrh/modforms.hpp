#pragma once

#include "periodrh/numeric.hpp"

#include <gmpxx.h>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace periodrh::modforms {

using Integer = mpz_class;
using IntMatrix = std::vector<std::vector<Integer>>;

/// Exact q-expansion sum_{n < n_terms} coeffs[n] q^n of a level-1 modular form.
/// Every level-1 object built here (E4, E6, Delta, the Miller basis) has an
/// integral expansion, so coefficients are kept in Z.
struct QSeries {
  int weight = 0;
  std::vector<Integer> coeffs;

  int n_terms() const { return static_cast<int>(coeffs.size()); }
  const Integer& operator[](int n) const { return coeffs[static_cast<std::size_t>(n)]; }
};

QSeries add(const QSeries& a, const QSeries& b);
QSeries subtract(const QSeries& a, const QSeries& b);
/// Truncated to the shorter of the two inputs.
QSeries multiply(const QSeries& a, const QSeries& b);
QSeries scale(const QSeries& a, const Integer& s);

/// sigma_p(n) for n < limit.
std::vector<Integer> divisor_sums(int p, int limit);
int sigma0(int n);

/// E4 = 1 + 240 sum sigma_3(n) q^n, E6 = 1 - 504 sum sigma_5(n) q^n.
QSeries eisenstein_series(int weight, int n_terms);
/// Delta = (E4^3 - E6^2) / 1728.
QSeries delta_series(int n_terms);

int dim_cusp_forms(int k);
/// Echelon basis g_1..g_r of S_k with g_i = q^i + O(q^{r+1}).
std::vector<QSeries> miller_basis(int k, int n_terms);
/// Matrix of T_p in the Miller basis: column i holds the first r coefficients
/// of T_p g_i.
IntMatrix hecke_operator_matrix(int k, int p, std::span<const QSeries> basis);
/// Characteristic polynomial det(xI - M), ascending coefficients (Faddeev-LeVerrier).
std::vector<Integer> characteristic_polynomial(const IntMatrix& m);

struct Provenance {
  enum class Kind { eigenform, combination, explicit_series };
  Kind kind = Kind::explicit_series;
  /// Eigenform index (0-based, eigenvalue order) for Kind::eigenform.
  int index = -1;
  /// Raw coefficient vector over the eigenbasis for Kind::combination.
  std::vector<Real> vector;
  std::string label;
};

/// Numerical cusp form q^N + sum_{n > N} c(n) q^n. coeffs[n] holds c(n) for
/// 0 <= n <= n_max (coeffs[0] = 0).
struct CuspForm {
  int k = 0;
  int N = 1;
  std::vector<Real> coeffs;
  Provenance provenance;
  int precision = 0;
  /// Value of the first nonzero coefficient before normalization.
  Real leading_value;

  int n_max() const { return static_cast<int>(coeffs.size()) - 1; }
  const Real& c(int n) const { return coeffs[static_cast<std::size_t>(n)]; }
};

/// Builds a normalized CuspForm from an exact series (e.g. a Miller basis
/// element or a product of eigenforms).
CuspForm from_qseries(const QSeries& s, int precision, std::string label = {});

struct EigenSystem {
  int k = 0;
  int r = 0;
  int precision = 0;
  /// Digits actually used in the diagonalization.
  int working_precision = 0;
  IntMatrix t2_matrix;
  std::vector<Integer> t2_charpoly;
  std::vector<Real> eigenvalues;
  /// eigenvectors[j][i]: coordinate i of eigenform j in the Miller basis,
  /// normalized so coordinate 0 is 1.
  std::vector<std::vector<Real>> eigenvectors;
  Real residual;
  Real min_separation;
};

struct EigenBasis {
  EigenSystem system;
  std::vector<CuspForm> forms;
};

/// Coefficient count needed for eigenforms at `precision` digits, with room
/// for combinations whose Deligne-type constant reaches 10^combination_digits.
int eigenform_terms(int k, int precision, int combination_digits = 20);

/// Normalized Hecke eigenbasis of S_k, sorted by T_2 eigenvalue. On residual
/// or separation failure the precision is doubled (at most three times)
/// before PrecisionEscalation is thrown.
EigenBasis eigenforms(int k, int precision);
/// Single attempt at fixed precision; throws PrecisionEscalation on failure.
EigenBasis eigenforms_at(int k, int precision, int n_terms);

/// f = sum_j coeffs_j f_j, normalized by its leading coefficient.
CuspForm linear_combination(std::span<const CuspForm> eigenbasis, std::span<const Real> coeffs, int precision);
CuspForm linear_combination(std::span<const Real> coeffs, int k, int precision);

struct DeligneEstimate {
  /// max |c(n)| / (sigma_0(n) n^{(k-1)/2}) over the stored range.
  Real lower;
  /// Deligne bound through the eigenbasis, when the provenance allows one.
  std::optional<Real> upper;
};

DeligneEstimate deligne_constant_estimate(const CuspForm& f, int n_max);

/// Explicit upper bound for C_f from the first dim S_k coefficients.
Real jenkins_rouse_bound(const CuspForm& f);

}  // namespace periodrh::modforms
