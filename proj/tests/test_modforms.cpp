#include "doctest.h"

#include "periodrh/errors.hpp"
#include "periodrh/modforms.hpp"

#include <vector>

using namespace periodrh;
using namespace periodrh::modforms;
namespace mp = boost::multiprecision;

namespace {

// q * prod_{n>=1} (1 - q^n)^24, expanded directly; independent of E4/E6.
std::vector<Integer> delta_product(int n_terms) {
  std::vector<Integer> c(static_cast<std::size_t>(n_terms));
  c[1] = 1;
  for (int n = 1; n < n_terms; ++n)
    for (int rep = 0; rep < 24; ++rep)
      for (int i = n_terms - 1; i >= n; --i) c[static_cast<std::size_t>(i)] -= c[static_cast<std::size_t>(i - n)];
  return c;
}

Integer sigma_naive(int p, int n) {
  Integer s = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) {
      Integer t;
      mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(p));
      s += t;
    }
  return s;
}

IntMatrix matmul(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t n = a.size();
  IntMatrix c(n, std::vector<Integer>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) c[i][j] += a[i][l] * b[l][j];
  return c;
}

}  // namespace

TEST_CASE("Delta agrees with the product formula") {
  const auto d = delta_series(60);
  const auto p = delta_product(60);
  for (int n = 0; n < 60; ++n) CHECK(d[n] == p[static_cast<std::size_t>(n)]);
  CHECK(d[2] == -24);
  CHECK(d[3] == 252);
  CHECK(d[6] == d[2] * d[3]);
  CHECK(d[4] == d[2] * d[2] - Integer(2048));  // tau(4) = tau(2)^2 - 2^11
}

TEST_CASE("divisor sums match the naive definition") {
  for (int p : {0, 3, 5, 11}) {
    const auto s = divisor_sums(p, 50);
    for (int n = 1; n < 50; ++n) CHECK(s[static_cast<std::size_t>(n)] == sigma_naive(p, n));
  }
  for (int n = 1; n < 50; ++n) CHECK(Integer(sigma0(n)) == sigma_naive(0, n));
}

TEST_CASE("cusp form dimensions") {
  CHECK(dim_cusp_forms(12) == 1);
  CHECK(dim_cusp_forms(24) == 2);
  CHECK(dim_cusp_forms(10) == 0);
  CHECK(dim_cusp_forms(14) == 0);
  CHECK(dim_cusp_forms(26) == 1);
  CHECK(dim_cusp_forms(120) == 10);
  CHECK_THROWS_AS(dim_cusp_forms(13), InvalidArgument);
  CHECK_THROWS_AS(dim_cusp_forms(2), InvalidArgument);
}

TEST_CASE("Miller basis is echelon and matches Delta*E4 at k = 16") {
  const auto b16 = miller_basis(16, 20);
  REQUIRE(b16.size() == 1);
  const auto de4 = multiply(delta_series(20), eisenstein_series(4, 20));
  for (int n = 0; n < 20; ++n) CHECK(b16[0][n] == de4[n]);
  CHECK(b16[0][2] == 216);

  const auto b = miller_basis(72, 40);
  const int r = dim_cusp_forms(72);
  REQUIRE(static_cast<int>(b.size()) == r);
  for (int i = 0; i < r; ++i) {
    CHECK(b[static_cast<std::size_t>(i)][0] == 0);
    for (int n = 1; n <= r; ++n) CHECK(b[static_cast<std::size_t>(i)][n] == (n == i + 1 ? 1 : 0));
  }
}

TEST_CASE("Hecke operators T2 and T3 commute") {
  for (int k : {24, 36, 48, 60}) {
    const int r = dim_cusp_forms(k);
    const auto basis = miller_basis(k, 3 * r + 2);
    const auto t2 = hecke_operator_matrix(k, 2, basis);
    const auto t3 = hecke_operator_matrix(k, 3, basis);
    CHECK(matmul(t2, t3) == matmul(t3, t2));
  }
  const auto basis = miller_basis(24, 10);
  CHECK_THROWS_AS(hecke_operator_matrix(24, 4, basis), InvalidArgument);
}

TEST_CASE("characteristic polynomial of a small integer matrix") {
  const IntMatrix m{{Integer(2), Integer(1)}, {Integer(1), Integer(3)}};
  const auto c = characteristic_polynomial(m);
  REQUIRE(c.size() == 3);
  CHECK(c[0] == 5);
  CHECK(c[1] == -5);
  CHECK(c[2] == 1);
}

TEST_CASE("k = 12 eigenform is Delta") {
  const auto b = eigenforms(12, 64);
  REQUIRE(b.forms.size() == 1);
  const auto d = delta_series(30);
  for (int n = 1; n < 30; ++n) CHECK(mp::abs(b.forms[0].c(n) - Real(d[n].get_str())) < Real("1e-40"));
}

TEST_CASE("k = 24 eigenvalues are the roots of the T2 characteristic polynomial") {
  const auto b = eigenforms(24, 64);
  REQUIRE(b.forms.size() == 2);
  PrecisionGuard g(84);
  // Roots of x^2 + a x + c via the quadratic formula.
  const auto& cp = b.system.t2_charpoly;
  const Real a(cp[1].get_str()), c(cp[0].get_str());
  const Real disc = mp::sqrt(a * a - 4 * c);
  const Real lo = (-a - disc) / 2, hi = (-a + disc) / 2;
  CHECK(mp::abs(b.forms[0].c(2) - lo) < Real("1e-40") * mp::abs(lo));
  CHECK(mp::abs(b.forms[1].c(2) - hi) < Real("1e-40") * mp::abs(hi));
  // Multiplicativity: c(6) = c(2) c(3).
  for (const auto& f : b.forms) CHECK(mp::abs(f.c(6) - f.c(2) * f.c(3)) < Real("1e-35") * mp::abs(f.c(6)));
  CHECK(b.system.residual < Real("1e-32"));
}

TEST_CASE("linear combinations set N and the leading value") {
  const auto b = eigenforms(24, 64);
  PrecisionGuard g(84);
  const std::vector<Real> diff{Real(1), Real(-1)};
  const auto f = linear_combination(std::span<const CuspForm>(b.forms), std::span<const Real>(diff), 64);
  CHECK(f.N == 2);
  CHECK(mp::abs(f.c(2) - 1) < Real("1e-50"));
  const std::vector<Real> sum{Real(2), Real(3)};
  const auto h = linear_combination(std::span<const CuspForm>(b.forms), std::span<const Real>(sum), 64);
  CHECK(h.N == 1);
  CHECK(mp::abs(h.leading_value - 5) < Real("1e-50"));
  const std::vector<Real> zero{Real(0), Real(0)};
  CHECK_THROWS_AS(linear_combination(std::span<const CuspForm>(b.forms), std::span<const Real>(zero), 64),
                  InvalidArgument);
  const std::vector<Real> wrong{Real(1)};
  CHECK_THROWS_AS(linear_combination(std::span<const CuspForm>(b.forms), std::span<const Real>(wrong), 64),
                  InvalidArgument);
}

TEST_CASE("Deligne estimates") {
  const auto b = eigenforms(36, 64);
  for (const auto& f : b.forms) {
    Real prev(0);
    for (int n : {5, 10, 20, 40}) {
      const auto e = deligne_constant_estimate(f, n);
      CHECK(e.lower >= prev);
      prev = e.lower;
      CHECK(e.lower <= 1 + Real("1e-30"));
      REQUIRE(e.upper.has_value());
      CHECK(*e.upper == 1);
    }
  }
  const std::vector<Real> v{Real(1), Real(-2), Real(3)};
  const auto f = linear_combination(std::span<const CuspForm>(b.forms), std::span<const Real>(v), 64);
  const auto e = deligne_constant_estimate(f, 40);
  REQUIRE(e.upper.has_value());
  CHECK(e.lower <= *e.upper);
}

TEST_CASE("Jenkins-Rouse bound") {
  const auto d = from_qseries(delta_series(10), 50, "Delta");
  const Real jr = jenkins_rouse_bound(d);
  PrecisionGuard g(70);
  CHECK(jr > 1);
  // For increasing k the second summand at f = q + O(q^2) must shrink.
  Real prev(-1);
  for (int k : {60, 80, 100}) {
    const Real kk(k);
    const Real second = mp::exp(Real("18.72")) * mp::pow(Real("41.41"), kk / 2) / mp::pow(kk, (kk - 1) / 2);
    if (prev >= 0) CHECK(second < prev);
    prev = second;
  }
}

TEST_CASE("one-dimensional spaces") {
  const auto b = eigenforms(26, 50);
  REQUIRE(b.forms.size() == 1);
  const auto g = miller_basis(26, b.forms[0].n_max() + 1);
  for (int n = 1; n <= b.forms[0].n_max(); ++n) CHECK(mp::abs(b.forms[0].c(n) - Real(g[0][n].get_str())) < Real("1e-40"));

  const auto d = eigenforms(12, 50);
  const std::vector<Real> one{Real(1)};
  const auto f = linear_combination(std::span<const CuspForm>(d.forms), std::span<const Real>(one), 50);
  CHECK(f.N == 1);
  CHECK(f.c(2) == d.forms[0].c(2));
  CHECK(hecke_operator_matrix(12, 2, miller_basis(12, 10))[0][0] == -24);
  CHECK(hecke_operator_matrix(12, 3, miller_basis(12, 10))[0][0] == 252);
}

TEST_CASE("from_qseries rejects vanishing orders beyond k/12") {
  QSeries s{24, std::vector<Integer>(10)};
  s.coeffs[3] = 1;
  CHECK_THROWS_AS(from_qseries(s, 30), InvalidArgument);
  s.coeffs[2] = 7;
  const auto f = from_qseries(s, 30);
  CHECK(f.N == 2);
  CHECK(f.leading_value == 7);
}

TEST_CASE("Deligne estimate for Delta and a combination at k = 24") {
  const auto d = from_qseries(delta_series(11), 50, "Delta");
  const auto e = deligne_constant_estimate(d, 10);
  PrecisionGuard g(70);
  const auto tau = delta_product(11);
  Real expected(0);
  for (int n = 1; n <= 10; ++n) {
    const Real v = mp::abs(Real(tau[static_cast<std::size_t>(n)].get_str())) / (Real(sigma0(n)) * mp::pow(Real(n), Real("5.5")));
    expected = max_of(expected, v);
  }
  CHECK(mp::abs(e.lower - expected) < Real("1e-40"));
  CHECK_FALSE(e.upper.has_value());

  const auto b = eigenforms(24, 50);
  const std::vector<Real> v{Real(2), Real(3)};
  const auto f = linear_combination(std::span<const CuspForm>(b.forms), std::span<const Real>(v), 50);
  const auto ef = deligne_constant_estimate(f, 30);
  REQUIRE(ef.upper.has_value());
  CHECK(mp::abs(*ef.upper - 1) < Real("1e-40"));
  CHECK(ef.lower <= *ef.upper + Real("1e-30"));
}
