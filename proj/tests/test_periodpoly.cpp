#include "doctest.h"

#include "periodrh/errors.hpp"
#include "periodrh/periodpoly.hpp"
#include "periodrh/zeros.hpp"

#include <vector>

using namespace periodrh;
using namespace periodrh::periodpoly;
namespace mp = boost::multiprecision;

namespace {

struct Pipeline {
  modforms::EigenBasis basis;
  std::vector<CriticalLValues> values;
};

Pipeline pipeline(int k, int precision) {
  Pipeline out{modforms::eigenforms(k, precision), {}};
  for (const auto& f : out.basis.forms) out.values.push_back(lfunctions::completed_lvalues(f, precision));
  return out;
}

// Z(s) = sum_j u_j prod_{i=1}^d (i - j - s) / d!, expanded directly.
std::vector<Real> zeta_closed_form(const std::vector<Real>& u) {
  const int d = static_cast<int>(u.size()) - 1;
  std::vector<Real> z(u.size(), Real(0));
  for (int j = 0; j <= d; ++j) {
    std::vector<Real> prod{Real(1)};
    for (int i = 1; i <= d; ++i) {
      std::vector<Real> next(prod.size() + 1, Real(0));
      for (std::size_t t = 0; t < prod.size(); ++t) {
        next[t] += prod[t] * (i - j);
        next[t + 1] -= prod[t];
      }
      prod = std::move(next);
    }
    for (std::size_t t = 0; t < prod.size(); ++t) z[t] += u[static_cast<std::size_t>(j)] * prod[t] / factorial(d);
  }
  return z;
}

Real match_distance(std::vector<Complex> a, std::vector<Complex> b) {
  REQUIRE(a.size() == b.size());
  Real worst(0);
  for (const auto& x : a) {
    auto best = b.begin();
    for (auto it = b.begin(); it != b.end(); ++it)
      if ((x - *it).abs() < (x - *best).abs()) best = it;
    worst = max_of(worst, (x - *best).abs());
    b.erase(best);
  }
  return worst;
}

}  // namespace

TEST_CASE("r_f for Delta: constant term and the two closed forms") {
  const int P = 64;
  const auto pl = pipeline(12, P);
  const auto& v = pl.values[0];
  const auto r = period_polynomial_r(v);
  CHECK(r.degree == 10);
  PrecisionGuard g(v.working_precision);
  Complex tpi(Real(0), two_pi());
  Complex power(Real(1));
  for (int j = 0; j < 11; ++j) power *= tpi;
  const Complex expected = Complex(Real(-factorial(10) * v.l_at(11))) / power;
  CHECK((r.coeffs[0] - expected).abs() < pow10(-(P - 10)));

  const auto cmp = compare_r_displays(v);
  CHECK(cmp.binomial_ratio_deviation < pow10(-(P - 10)));
  CHECK(cmp.direct_deviation > Real("0.5"));
  CHECK(cmp.constant_term.abs() > 0);
}

TEST_CASE("r_f scales linearly") {
  const auto pl = pipeline(24, 64);
  const std::vector<Real> a{Real(7), Real(0)};
  const auto scaled = lfunctions::combine(std::span<const CriticalLValues>(pl.values), std::span<const Real>(a), Real(1));
  const auto r = period_polynomial_r(pl.values[0]);
  const auto r7 = period_polynomial_r(scaled);
  PrecisionGuard g(pl.values[0].working_precision);
  for (std::size_t n = 0; n < r.coeffs.size(); ++n) CHECK((r7.coeffs[n] - r.coeffs[n] * Real(7)).abs() < pow10(-50) * (1 + r7.coeffs[n].abs()));
}

TEST_CASE("p_f: constant term, self-reciprocity and root sets of r_f") {
  const int P = 64;
  const auto pl = pipeline(12, P);
  const auto& v = pl.values[0];
  const auto p = modified_polynomial_p(v);
  CHECK(p.coeffs[0].re == v.l_at(11));
  CHECK(self_reciprocity_residual(p) < pow10(-(P - 10)));

  PrecisionGuard g(v.working_precision);
  const auto r = period_polynomial_r(v);
  std::vector<Complex> rot;  // r(z / i)
  for (std::size_t n = 0; n < r.coeffs.size(); ++n) rot.push_back(r.coeffs[n] * i_power(-static_cast<int>(n)));
  const auto rp = zeros::find_roots(std::span<const Real>(p.real_coeffs()), P, 3);
  const auto rr = zeros::find_roots(std::span<const Complex>(rot), P, 3);
  CHECK(match_distance(rp.roots, rr.roots) < Real("1e-30"));

  const auto rep = zeros::unimodularity_report(std::span<const Real>(p.real_coeffs()), 1e-10, P);
  CHECK(rep.verdict == zeros::Verdict::unimodular);
}

TEST_CASE("q_f: degree, leading and constant terms") {
  const auto pl = pipeline(12, 64);
  const auto q = half_polynomial_q(pl.values[0]);
  CHECK(q.degree == 5);
  CHECK(q.coeffs.back().re == pl.values[0].l_at(11));
  CHECK_FALSE(q.degenerate_leading);
  // q_Delta resembles H_{5,1}, whose zeros are not all in the disk. Vieta:
  // the roots sum to -q[4]/q[5] = -2 pi L(10)/L(11), beyond 5 in modulus.
  const auto rep = zeros::unimodularity_report(std::span<const Real>(q.real_coeffs()), 1e-10, 64);
  PrecisionGuard g(pl.values[0].working_precision);
  Complex sum;
  for (const auto& z : rep.roots) sum += z;
  const Real vieta = -two_pi() * pl.values[0].l_at(10) / pl.values[0].l_at(11);
  CHECK(mp::abs(sum.re - vieta) < Real("1e-40"));
  CHECK(mp::abs(sum.im) < Real("1e-40"));
  CHECK(mp::abs(vieta) > 5);
  CHECK(rep.verdict == zeros::Verdict::neither);

  const auto odd = pipeline(18, 64);
  const auto q18 = half_polynomial_q(odd.values[0]);
  CHECK(mp::abs(q18.coeffs[0].re) <= odd.values[0].trunc_bound * 10);
}

TEST_CASE("p is recovered from q") {
  for (int k : {12, 18, 24}) {
    const int P = 64;
    const auto pl = pipeline(k, P);
    for (const auto& v : pl.values) {
      const auto p = modified_polynomial_p(v);
      const auto q = half_polynomial_q(v);
      CHECK(reconstruct_p_from_q(q, p) < pow10(-(P - 10)));
    }
  }
  // Scaling q and p together scales the residual.
  const auto pl = pipeline(12, 64);
  const std::vector<Real> a{Real(3)};
  const auto v3 = lfunctions::combine(std::span<const CriticalLValues>(pl.values), std::span<const Real>(a), Real(1));
  CHECK(reconstruct_p_from_q(half_polynomial_q(v3), modified_polynomial_p(v3)) < pow10(-50));
  CHECK_THROWS_AS(reconstruct_p_from_q(modified_polynomial_p(v3), modified_polynomial_p(v3)), InvalidArgument);
}

TEST_CASE("odd and even parts") {
  const auto pl = pipeline(12, 64);
  const auto r = period_polynomial_r(pl.values[0]);
  const auto parts = odd_even_parts(r);
  for (std::size_t n = 0; n < r.coeffs.size(); ++n) {
    const Complex sum = parts.odd.coeffs[n] + parts.even.coeffs[n];
    CHECK(sum.re == r.coeffs[n].re);
    CHECK(sum.im == r.coeffs[n].im);
  }
  auto even_only = parts.even;
  even_only.kind = Kind::r;
  const auto again = odd_even_parts(even_only);
  for (const auto& c : again.odd.coeffs) CHECK(c.is_zero());
  std::vector<Complex> odd_nonzero(parts.odd.coeffs.begin() + 1, parts.odd.coeffs.end());
  const auto rep = zeros::find_roots(std::span<const Complex>(odd_nonzero), 64);
  CHECK(rep.roots.size() == 8);
}

TEST_CASE("Rodriguez-Villegas transform on small inputs") {
  PrecisionGuard g(60);
  const std::vector<Real> one{Real(1)};
  const auto z1 = rv_transform(std::span<const Real>(one), 40);
  REQUIRE(z1.coeffs.size() == 1);
  CHECK(z1.coeffs[0] == 1);
  const auto c1 = zeta_checks(z1, 40);
  CHECK(c1.functional_equation_residual == 0);
  CHECK(c1.roots == 0);

  const std::vector<Real> lin{Real(1), Real(1)};
  const auto z2 = rv_transform(std::span<const Real>(lin), 40);
  CHECK(mp::abs(z2.coeffs[0] - 1) < Real("1e-40"));
  CHECK(mp::abs(z2.coeffs[1] + 2) < Real("1e-40"));
  const auto c2 = zeta_checks(z2, 40);
  CHECK(c2.roots == 1);
  CHECK(c2.max_critical_line_distance < Real("1e-35"));

  const std::vector<Real> vanishing{Real(1), Real(-1)};
  CHECK_THROWS_AS(rv_transform(std::span<const Real>(vanishing), 40), InvalidArgument);
}

TEST_CASE("Rodriguez-Villegas transform matches the closed form") {
  PrecisionGuard g(80);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CounterRng rng(seed);
    const int d = 3 + static_cast<int>(rng.uniform_int(0, 8));
    std::vector<Real> u(static_cast<std::size_t>(d) + 1);
    for (int j = 0; j <= d / 2; ++j) {
      u[static_cast<std::size_t>(j)] = Real(rng.uniform_int(1, 9));
      u[static_cast<std::size_t>(d - j)] = u[static_cast<std::size_t>(j)];
    }
    const auto z = rv_transform(std::span<const Real>(u), 60);
    const auto oracle = zeta_closed_form(u);
    for (int j = 0; j <= d; ++j) CHECK(mp::abs(z.coeffs[static_cast<std::size_t>(j)] - oracle[static_cast<std::size_t>(j)]) < Real("1e-50") * (1 + mp::abs(oracle[static_cast<std::size_t>(j)])));
    CHECK(z.sign == 1);
    CHECK(z.functional_equation_residual < Real("1e-50"));
  }
}

TEST_CASE("unimodular U gives zeros on the critical line") {
  PrecisionGuard g(60);
  // (1 + x^2)(1 + x + x^2): unimodular, self-reciprocal.
  const std::vector<Real> u{Real(1), Real(1), Real(2), Real(1), Real(1)};
  const auto c = zeta_checks(rv_transform(std::span<const Real>(u), 40), 40);
  CHECK(c.functional_equation_residual < Real("1e-35"));
  CHECK(c.max_critical_line_distance < Real("1e-10"));

  const auto pl = pipeline(12, 64);
  const auto p = modified_polynomial_p(pl.values[0]);
  const auto z = rv_transform(std::span<const Real>(p.real_coeffs()), 64, "p_Delta");
  const auto cz = zeta_checks(z, 64);
  CHECK(cz.functional_equation_residual < Real("1e-40"));
  CHECK(cz.roots == 10);
  CHECK(cz.max_critical_line_distance < Real("1e-10"));
}

TEST_CASE("q in the disk implies r on the circle") {
  for (int k = 12; k <= 40; k += 2) {
    if (modforms::dim_cusp_forms(k) == 0) continue;
    const int P = default_precision(k);
    const auto pl = pipeline(k, P);
    for (const auto& v : pl.values) {
      const auto q = half_polynomial_q(v);
      const auto rq = zeros::unimodularity_report(std::span<const Real>(q.real_coeffs()), 1e-10, P);
      const auto rp = zeros::unimodularity_report(std::span<const Real>(modified_polynomial_p(v).real_coeffs()), 1e-10, P);
      if (rq.max_abs <= 1 + Real("1e-10")) CHECK(rp.verdict == zeros::Verdict::unimodular);
    }
  }
}
