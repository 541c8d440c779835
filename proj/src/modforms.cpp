#include "periodrh/modforms.hpp"

#include "periodrh/errors.hpp"
#include "periodrh/tail.hpp"
#include "periodrh/zeros.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace periodrh::modforms {

namespace mp = boost::multiprecision;

namespace {

Real to_real(const Integer& z) {
  Real x;
  mpfr_set_z(x.backend().data(), z.get_mpz_t(), MPFR_RNDN);
  return x;
}

double log10_abs(const Integer& z) {
  if (z == 0) return -std::numeric_limits<double>::infinity();
  long e = 0;
  const double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log10(std::fabs(m)) + static_cast<double>(e) * std::log10(2.0);
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

void check_weight(int k) {
  if (k < 4 || k % 2 != 0) throw InvalidArgument("weight must be an even integer >= 4, got " + std::to_string(k));
}

}  // namespace

QSeries add(const QSeries& a, const QSeries& b) {
  const int n = std::min(a.n_terms(), b.n_terms());
  QSeries out{a.weight, std::vector<Integer>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) out.coeffs[static_cast<std::size_t>(i)] = a[i] + b[i];
  return out;
}

QSeries subtract(const QSeries& a, const QSeries& b) {
  const int n = std::min(a.n_terms(), b.n_terms());
  QSeries out{a.weight, std::vector<Integer>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) out.coeffs[static_cast<std::size_t>(i)] = a[i] - b[i];
  return out;
}

QSeries multiply(const QSeries& a, const QSeries& b) {
  const int n = std::min(a.n_terms(), b.n_terms());
  QSeries out{a.weight + b.weight, std::vector<Integer>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; i + j < n; ++j)
      mpz_addmul(out.coeffs[static_cast<std::size_t>(i + j)].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
  }
  return out;
}

QSeries scale(const QSeries& a, const Integer& s) {
  QSeries out = a;
  for (auto& c : out.coeffs) c *= s;
  return out;
}

std::vector<Integer> divisor_sums(int p, int limit) {
  std::vector<Integer> sigma(static_cast<std::size_t>(std::max(limit, 0)));
  for (int d = 1; d < limit; ++d) {
    Integer dp;
    mpz_ui_pow_ui(dp.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(p));
    for (int m = d; m < limit; m += d) sigma[static_cast<std::size_t>(m)] += dp;
  }
  return sigma;
}

int sigma0(int n) {
  int count = 0;
  for (int d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    count += (d * d == n) ? 1 : 2;
  }
  return count;
}

QSeries eisenstein_series(int weight, int n_terms) {
  if (weight != 4 && weight != 6) throw InvalidArgument("eisenstein_series: weight must be 4 or 6");
  if (n_terms < 1) throw InvalidArgument("eisenstein_series: n_terms must be >= 1");
  const auto sigma = divisor_sums(weight - 1, n_terms);
  const long factor = weight == 4 ? 240 : -504;
  QSeries e{weight, std::vector<Integer>(static_cast<std::size_t>(n_terms))};
  e.coeffs[0] = 1;
  for (int n = 1; n < n_terms; ++n) e.coeffs[static_cast<std::size_t>(n)] = sigma[static_cast<std::size_t>(n)] * factor;
  return e;
}

QSeries delta_series(int n_terms) {
  if (n_terms < 2) throw InvalidArgument("delta_series: n_terms must be >= 2");
  const QSeries e4 = eisenstein_series(4, n_terms);
  const QSeries e6 = eisenstein_series(6, n_terms);
  QSeries d = subtract(multiply(multiply(e4, e4), e4), multiply(e6, e6));
  d.weight = 12;
  for (auto& c : d.coeffs) {
    if (!mpz_divisible_ui_p(c.get_mpz_t(), 1728)) throw NumericalError("delta_series: E4^3 - E6^2 not divisible by 1728");
    mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), 1728);
  }
  return d;
}

int dim_cusp_forms(int k) {
  check_weight(k);
  if (k % 12 == 2) return k / 12 - 1;
  return k / 12;
}

std::vector<QSeries> miller_basis(int k, int n_terms) {
  const int r = dim_cusp_forms(k);
  if (n_terms <= r) throw InvalidArgument("miller_basis: n_terms must exceed dim S_k = " + std::to_string(r));
  if (r == 0) return {};

  const QSeries e4 = eisenstein_series(4, n_terms);
  const QSeries e6 = eisenstein_series(6, n_terms);
  const QSeries delta = delta_series(n_terms);
  const QSeries e4_cubed = multiply(multiply(e4, e4), e4);

  // Delta^j * E4^a * E6^b with 12j + 4a + 6b = k; b depends only on k mod 4,
  // so the Eisenstein factor for j is the one for j+1 times E4^3.
  const int b = (k % 4 == 0) ? 0 : 1;
  std::vector<QSeries> eis(static_cast<std::size_t>(r) + 1);
  {
    const int rest = k - 12 * r;
    const int a = (rest - 6 * b) / 4;
    QSeries m{0, std::vector<Integer>(static_cast<std::size_t>(n_terms))};
    m.coeffs[0] = 1;
    for (int i = 0; i < a; ++i) m = multiply(m, e4);
    if (b == 1) m = multiply(m, e6);
    eis[static_cast<std::size_t>(r)] = std::move(m);
  }
  for (int j = r - 1; j >= 1; --j) eis[static_cast<std::size_t>(j)] = multiply(eis[static_cast<std::size_t>(j) + 1], e4_cubed);

  std::vector<QSeries> basis;
  basis.reserve(static_cast<std::size_t>(r));
  QSeries delta_pow = delta;
  for (int j = 1; j <= r; ++j) {
    if (j > 1) delta_pow = multiply(delta_pow, delta);
    QSeries g = multiply(delta_pow, eis[static_cast<std::size_t>(j)]);
    g.weight = k;
    basis.push_back(std::move(g));
  }

  // Clear the coefficients of q^{i+1}..q^r in g_i, last rows first.
  for (int i = r - 1; i >= 0; --i) {
    auto& gi = basis[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j) {
      const Integer factor = gi[j + 1];
      if (factor == 0) continue;
      const auto& gj = basis[static_cast<std::size_t>(j)];
      for (int n = 0; n < n_terms; ++n)
        mpz_submul(gi.coeffs[static_cast<std::size_t>(n)].get_mpz_t(), factor.get_mpz_t(), gj[n].get_mpz_t());
    }
  }
  return basis;
}

IntMatrix hecke_operator_matrix(int k, int p, std::span<const QSeries> basis) {
  if (!is_prime(p)) throw InvalidArgument("hecke_operator_matrix: p must be prime");
  const int r = static_cast<int>(basis.size());
  for (const auto& g : basis)
    if (g.n_terms() < p * r + 1)
      throw InsufficientPrecision("hecke_operator_matrix: basis needs at least p*r+1 = " + std::to_string(p * r + 1) +
                                  " coefficients");
  Integer pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k - 1));
  IntMatrix m(static_cast<std::size_t>(r), std::vector<Integer>(static_cast<std::size_t>(r)));
  for (int i = 0; i < r; ++i) {
    const auto& g = basis[static_cast<std::size_t>(i)];
    for (int n = 1; n <= r; ++n) {
      Integer v = g[p * n];
      if (n % p == 0) v += pk * g[n / p];
      m[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(i)] = std::move(v);
    }
  }
  return m;
}

std::vector<Integer> characteristic_polynomial(const IntMatrix& a) {
  const std::size_t n = a.size();
  std::vector<Integer> c(n + 1);
  c[n] = 1;
  IntMatrix m(n, std::vector<Integer>(n));
  IntMatrix am(n, std::vector<Integer>(n));
  for (std::size_t step = 1; step <= n; ++step) {
    // M_step = A M_{step-1} + c_{n-step+1} I
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Integer s = 0;
        for (std::size_t l = 0; l < n; ++l) mpz_addmul(s.get_mpz_t(), a[i][l].get_mpz_t(), m[l][j].get_mpz_t());
        am[i][j] = std::move(s);
      }
    for (std::size_t i = 0; i < n; ++i) am[i][i] += c[n - step + 1];
    m.swap(am);
    Integer trace = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) mpz_addmul(trace.get_mpz_t(), a[i][l].get_mpz_t(), m[l][i].get_mpz_t());
    if (!mpz_divisible_ui_p(trace.get_mpz_t(), step))
      throw NumericalError("characteristic_polynomial: inexact Faddeev-LeVerrier division");
    mpz_divexact_ui(trace.get_mpz_t(), trace.get_mpz_t(), step);
    c[n - step] = -trace;
  }
  return c;
}

CuspForm from_qseries(const QSeries& s, int precision, std::string label) {
  PrecisionGuard guard(precision + kGuardDigits);
  int lead = 1;
  while (lead < s.n_terms() && s[lead] == 0) ++lead;
  if (lead >= s.n_terms()) throw InvalidArgument("from_qseries: series vanishes to the stored order");
  if (s[0] != 0) throw InvalidArgument("from_qseries: not a cusp form (nonzero constant term)");
  if (lead > s.weight / 12)
    throw InvalidArgument("from_qseries: vanishing order " + std::to_string(lead) + " exceeds the valence bound k/12");
  CuspForm f;
  f.k = s.weight;
  f.N = lead;
  f.precision = precision;
  f.leading_value = to_real(s[lead]);
  f.coeffs.reserve(static_cast<std::size_t>(s.n_terms()));
  for (int n = 0; n < s.n_terms(); ++n) f.coeffs.push_back(to_real(s[n]) / f.leading_value);
  f.provenance.kind = Provenance::Kind::explicit_series;
  f.provenance.label = std::move(label);
  return f;
}

int eigenform_terms(int k, int precision, int combination_digits) {
  const int r = dim_cusp_forms(k);
  return std::max(lvalue_terms(k, precision + 10, combination_digits) + 1, 3 * r + 2);
}

namespace {

// Digits lost when summing v_i g_i(n): the Miller basis coefficients dwarf the
// Deligne-size eigenform coefficients. |v_i| is bounded by Deligne.
int cancellation_digits(int k, std::span<const QSeries> basis) {
  const int r = static_cast<int>(basis.size());
  const int n_terms = basis.front().n_terms();
  const double half = (k - 1) / 2.0;
  double worst = 0;
  for (int n = 1; n < n_terms; ++n) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < r; ++i) {
      const double l = std::log10(static_cast<double>(sigma0(i + 1))) + half * std::log10(i + 1.0) +
                       log10_abs(basis[static_cast<std::size_t>(i)][n]);
      mx = std::max(mx, l);
    }
    const double scale = std::log10(static_cast<double>(sigma0(n))) + half * std::log10(static_cast<double>(n));
    worst = std::max(worst, mx + std::log10(static_cast<double>(r)) - scale);
  }
  return static_cast<int>(std::ceil(worst));
}

// Null vector of (T - lambda I) with first coordinate 1, by Gaussian
// elimination with partial pivoting on the remaining columns.
std::vector<Real> eigenvector(const std::vector<std::vector<Real>>& t, const Real& lambda) {
  const std::size_t r = t.size();
  std::vector<Real> v(r, Real(0));
  v[0] = 1;
  if (r == 1) return v;
  const std::size_t unknowns = r - 1;
  // Augmented rows: [A[:,1..r-1] | -A[:,0]].
  std::vector<std::vector<Real>> a(r, std::vector<Real>(unknowns + 1));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 1; j < r; ++j) a[i][j - 1] = t[i][j] - (i == j ? lambda : Real(0));
    a[i][unknowns] = -(t[i][0] - (i == 0 ? lambda : Real(0)));
  }
  for (std::size_t col = 0; col < unknowns; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < r; ++i)
      if (mp::abs(a[i][col]) > mp::abs(a[piv][col])) piv = i;
    std::swap(a[col], a[piv]);
    if (a[col][col] == 0) throw NumericalError("eigenvector: singular elimination (repeated eigenvalue?)");
    for (std::size_t i = col + 1; i < r; ++i) {
      if (a[i][col] == 0) continue;
      const Real f = a[i][col] / a[col][col];
      for (std::size_t j = col; j <= unknowns; ++j) a[i][j] -= f * a[col][j];
    }
  }
  for (std::size_t col = unknowns; col-- > 0;) {
    Real s = a[col][unknowns];
    for (std::size_t j = col + 1; j < unknowns; ++j) s -= a[col][j] * v[j + 1];
    v[col + 1] = s / a[col][col];
  }
  return v;
}

}  // namespace

EigenBasis eigenforms_at(int k, int precision, int n_terms) {
  check_weight(k);
  if (k < 12) throw InvalidArgument("eigenforms: weight must be >= 12");
  EigenBasis out;
  out.system.k = k;
  out.system.precision = precision;
  const int r = dim_cusp_forms(k);
  out.system.r = r;
  if (r == 0) {
    out.system.working_precision = precision;
    out.system.residual = 0;
    out.system.min_separation = 0;
    return out;
  }
  if (n_terms < 2 * r + 1) throw InsufficientPrecision("eigenforms: need at least 2r+1 coefficients for T_2");

  const auto basis = miller_basis(k, n_terms);
  out.system.t2_matrix = hecke_operator_matrix(k, 2, basis);
  out.system.t2_charpoly = characteristic_polynomial(out.system.t2_matrix);

  const int work = precision + kGuardDigits + cancellation_digits(k, basis);
  out.system.working_precision = work;
  PrecisionGuard guard(work);

  std::vector<std::vector<Real>> t(static_cast<std::size_t>(r), std::vector<Real>(static_cast<std::size_t>(r)));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          to_real(out.system.t2_matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);

  std::vector<Real> cp;
  for (const auto& c : out.system.t2_charpoly) cp.push_back(to_real(c));
  std::vector<Real> dcp;
  for (std::size_t j = 1; j < cp.size(); ++j) dcp.push_back(cp[j] * static_cast<long>(j));

  std::vector<Real> lambdas;
  if (r == 1) {
    lambdas.push_back(-cp[0]);
  } else {
    // x = 2^s y puts the eigenvalues (|lambda| <= 2^{(k+1)/2}) near the unit
    // circle and balances the coefficients.
    const long s = (k + 2) / 2;
    std::vector<Real> scaled(cp.size());
    for (std::size_t j = 0; j < cp.size(); ++j) mpfr_mul_2si(scaled[j].backend().data(), cp[j].backend().data(), s * static_cast<long>(j), MPFR_RNDN);
    const auto rep = zeros::find_roots(std::span<const Real>(scaled), work);
    if (!rep.reliable || static_cast<int>(rep.roots.size()) != r)
      throw PrecisionEscalation("eigenforms: unreliable T_2 eigenvalues", 2 * work);
    for (const auto& z : rep.roots) {
      if (mp::abs(z.im) > pow10(-work / 3) * max_of(z.abs(), Real(1)))
        throw NumericalError("eigenforms: T_2 has a non-real eigenvalue");
      Real x;
      mpfr_mul_2si(x.backend().data(), z.re.backend().data(), s, MPFR_RNDN);
      for (int it = 0; it < 3; ++it) {
        const Real d = zeros::horner(std::span<const Real>(dcp), Complex(x)).re;
        if (d == 0) break;
        x -= zeros::horner(std::span<const Real>(cp), Complex(x)).re / d;
      }
      lambdas.push_back(std::move(x));
    }
    std::sort(lambdas.begin(), lambdas.end());
  }

  Real residual(0);
  out.system.eigenvectors.reserve(static_cast<std::size_t>(r));
  for (const auto& lambda : lambdas) {
    std::vector<Real> v = eigenvector(t, lambda);
    Real vmax(0), rmax(0);
    for (int i = 0; i < r; ++i) {
      Real s = -lambda * v[static_cast<std::size_t>(i)];
      for (int j = 0; j < r; ++j) s += t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
      rmax = max_of(rmax, Real(mp::abs(s)));
      vmax = max_of(vmax, Real(mp::abs(v[static_cast<std::size_t>(i)])));
    }
    residual = max_of(residual, Real(rmax / vmax));
    out.system.eigenvectors.push_back(std::move(v));
  }
  Real separation = r > 1 ? Real(mp::abs(lambdas[1] - lambdas[0])) : Real(0);
  for (std::size_t i = 1; i < lambdas.size(); ++i) separation = min_of(separation, Real(lambdas[i] - lambdas[i - 1]));
  out.system.residual = residual;
  out.system.min_separation = separation;
  out.system.eigenvalues = lambdas;

  if (!(residual < pow10(-precision / 2)))
    throw PrecisionEscalation("eigenforms: eigen-residual above 10^(-P/2)", 2 * work);
  if (r > 1 && !(separation > residual * 10))
    throw PrecisionEscalation("eigenforms: T_2 eigenvalues not separated at this precision", 2 * work);

  const int stored = precision + kGuardDigits;
  for (int j = 0; j < r; ++j) {
    const auto& v = out.system.eigenvectors[static_cast<std::size_t>(j)];
    CuspForm f;
    f.k = k;
    f.N = 1;
    f.precision = precision;
    f.leading_value = with_precision(Real(1), stored);
    f.provenance.kind = Provenance::Kind::eigenform;
    f.provenance.index = j;
    f.provenance.label = "eigenform " + std::to_string(j);
    f.coeffs.reserve(static_cast<std::size_t>(n_terms));
    f.coeffs.push_back(with_precision(Real(0), stored));
    for (int n = 1; n < n_terms; ++n) {
      Real s(0);
      for (int i = 0; i < r; ++i) {
        const auto& g = basis[static_cast<std::size_t>(i)][n];
        if (g != 0) s += v[static_cast<std::size_t>(i)] * to_real(g);
      }
      f.coeffs.push_back(with_precision(s, stored));
    }
    out.forms.push_back(std::move(f));
  }
  return out;
}

EigenBasis eigenforms(int k, int precision) {
  const int n_terms = eigenform_terms(k, precision);
  int attempt_precision = precision;
  for (int attempt = 0;; ++attempt) {
    try {
      EigenBasis b = eigenforms_at(k, attempt_precision, n_terms);
      if (attempt_precision != precision) {
        // Report at the requested precision; the extra digits only stabilised
        // the diagonalization.
        b.system.precision = precision;
        for (auto& f : b.forms) f.precision = precision;
      }
      return b;
    } catch (const PrecisionEscalation& e) {
      if (attempt == 3) throw;
      attempt_precision *= 2;
    }
  }
}

CuspForm linear_combination(std::span<const CuspForm> eigenbasis, std::span<const Real> coeffs, int precision) {
  if (eigenbasis.empty()) throw InvalidArgument("linear_combination: empty eigenbasis");
  if (coeffs.size() != eigenbasis.size())
    throw InvalidArgument("linear_combination: expected " + std::to_string(eigenbasis.size()) + " coefficients");
  if (std::all_of(coeffs.begin(), coeffs.end(), [](const Real& c) { return c == 0; }))
    throw InvalidArgument("linear_combination: all coefficients are zero");
  PrecisionGuard guard(precision + kGuardDigits);
  std::vector<Real> a;
  a.reserve(coeffs.size());
  for (const auto& c : coeffs) a.push_back(with_precision(c, precision + kGuardDigits));
  const int k = eigenbasis.front().k;
  int n_max = std::numeric_limits<int>::max();
  for (const auto& f : eigenbasis) n_max = std::min(n_max, f.n_max());

  std::vector<Real> raw(static_cast<std::size_t>(n_max) + 1, Real(0));
  for (int n = 1; n <= n_max; ++n) {
    Real s(0);
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      if (a[j] != 0) s += a[j] * eigenbasis[j].c(n);
    raw[static_cast<std::size_t>(n)] = std::move(s);
  }
  const Real threshold = pow10(-precision / 2);
  int lead = 1;
  while (lead <= n_max && mp::abs(raw[static_cast<std::size_t>(lead)]) <= threshold) ++lead;
  if (lead > n_max || lead > k / 12)
    throw NumericalError("linear_combination: no leading coefficient within the valence bound (cancellation?)");

  CuspForm f;
  f.k = k;
  f.N = lead;
  f.precision = precision;
  f.leading_value = raw[static_cast<std::size_t>(lead)];
  f.coeffs.reserve(raw.size());
  for (int n = 0; n <= n_max; ++n)
    f.coeffs.push_back(n < lead ? Real(0) : Real(raw[static_cast<std::size_t>(n)] / f.leading_value));
  f.provenance.kind = Provenance::Kind::combination;
  f.provenance.vector = std::move(a);
  f.provenance.label = "combination";
  return f;
}

CuspForm linear_combination(std::span<const Real> coeffs, int k, int precision) {
  const EigenBasis b = eigenforms(k, precision);
  return linear_combination(std::span<const CuspForm>(b.forms), coeffs, precision);
}

DeligneEstimate deligne_constant_estimate(const CuspForm& f, int n_max) {
  if (f.n_max() < n_max)
    throw InsufficientPrecision("deligne_constant_estimate: form has only " + std::to_string(f.n_max()) + " coefficients");
  PrecisionGuard guard(f.precision + kGuardDigits);
  DeligneEstimate est;
  est.lower = 0;
  const Real half = Real(f.k - 1) / 2;
  for (int n = f.N; n <= n_max; ++n) {
    const Real scale = Real(sigma0(n)) * mp::pow(Real(n), half);
    est.lower = max_of(est.lower, Real(mp::abs(f.c(n)) / scale));
  }
  switch (f.provenance.kind) {
    case Provenance::Kind::eigenform:
      est.upper = Real(1);
      break;
    case Provenance::Kind::combination: {
      Real s(0);
      for (const auto& c : f.provenance.vector) s += mp::abs(c);
      est.upper = s / mp::abs(f.leading_value);
      break;
    }
    case Provenance::Kind::explicit_series:
      break;
  }
  return est;
}

Real jenkins_rouse_bound(const CuspForm& f) {
  const int r = dim_cusp_forms(f.k);
  if (f.n_max() < r) throw InsufficientPrecision("jenkins_rouse_bound: needs dim S_k coefficients");
  PrecisionGuard guard(f.precision + kGuardDigits);
  const Real k(f.k);
  Real sq(0);
  Real weighted(0);
  const Real decay("7.288");
  for (int m = 1; m <= r; ++m) {
    sq += f.c(m) * f.c(m) / mp::pow(Real(m), f.k - 1);
    weighted += f.c(m) * mp::exp(-decay * m);
  }
  const Real second = mp::exp(Real("18.72")) * mp::pow(Real("41.41"), k / 2) / mp::pow(k, (k - 1) / 2);
  return mp::sqrt(mp::log(k)) * (11 * mp::sqrt(sq) + second * mp::abs(weighted));
}

}  // namespace periodrh::modforms
