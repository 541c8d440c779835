#include "doctest.h"

#include "periodrh/errors.hpp"
#include "periodrh/lfunctions.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <vector>

using namespace periodrh;
using namespace periodrh::lfunctions;
namespace mp = boost::multiprecision;
using Float50 = mp::cpp_bin_float_50;

namespace {

Real to_real(const Float50& x) { return from_string(x.str(55, std::ios_base::scientific)); }

// zeta(3/2) by Euler-Maclaurin with three correction terms, in long double.
long double zeta_three_halves() {
  const int M = 2000;
  long double s = 0;
  for (int n = 1; n < M; ++n) s += 1.0L / std::pow(static_cast<long double>(n), 1.5L);
  const long double m = M;
  s += 2.0L / std::sqrt(m);                           // integral from M to inf
  s += 0.5L / std::pow(m, 1.5L);                      // f(M) / 2
  s += (1.5L / 12.0L) / std::pow(m, 2.5L);            // -B2/2! f'(M)
  s -= (1.5L * 2.5L * 3.5L / 720.0L) / std::pow(m, 4.5L);  // B4/4! f'''(M)
  return s;
}

}  // namespace

TEST_CASE("incomplete gamma at integer order") {
  PrecisionGuard g(50);
  CHECK(mp::abs(incomplete_gamma_integer(1, Real(2), 40) - mp::exp(Real(-2))) < Real("1e-45"));
  CHECK(incomplete_gamma_integer(3, Real(0), 40) == 2);
  // Quadrature oracle for int_1^oo t^2 e^{-t} dt.
  boost::math::quadrature::exp_sinh<Float50> integrator;
  const Float50 q = integrator.integrate([](const Float50& t) { return t * t * exp(-t); }, Float50(1),
                                         std::numeric_limits<Float50>::infinity());
  CHECK(mp::abs(incomplete_gamma_integer(3, Real(1), 40) - to_real(q)) < Real("1e-40"));
  CHECK(mp::abs(incomplete_gamma_integer(3, Real(1), 40) - 5 * mp::exp(Real(-1))) < Real("1e-45"));
  // Boost's own implementation as a second oracle over a grid.
  for (int s : {2, 7, 20, 40})
    for (const char* x : {"0.5", "6.283185307179586476925286766559", "50"}) {
      const Float50 ref = boost::math::tgamma(Float50(s), Float50(x));
      const Real got = incomplete_gamma_integer(s, from_string(x), 40);
      CHECK(mp::abs(got - to_real(ref)) < Real("1e-38") * mp::abs(got));
    }
  CHECK_THROWS_AS(incomplete_gamma_integer(0, Real(1), 40), InvalidArgument);
}

TEST_CASE("series agrees with the quadrature oracle for small weights") {
  for (int k : {12, 16, 18, 20, 22, 26}) {
    const auto b = modforms::eigenforms(k, 40);
    const auto& f = b.forms.at(0);
    const auto v = completed_lvalues(f, 40);
    for (int s = 1; s < k; ++s) {
      const auto o = oracle_lambda_integral(f, s, 40);
      PrecisionGuard g(60);
      const Real bound = o.error_estimate + v.trunc_bound + Real("1e-40");
      CHECK(mp::abs(v.lambda_at(s) - o.value) < bound);
      CHECK(bound < Real("1e-20"));
    }
    if (k % 4 == 2) CHECK(mp::abs(v.lambda_at(k / 2)) <= 2 * v.trunc_bound);
  }
}

TEST_CASE("oracle integrand symmetry") {
  const auto b = modforms::eigenforms(12, 40);
  const auto a1 = oracle_lambda_integral(b.forms[0], 1, 30);
  const auto a11 = oracle_lambda_integral(b.forms[0], 11, 30);
  CHECK(mp::abs(a1.value - a11.value) < Real("1e-30"));
  const auto c = modforms::eigenforms(18, 40);
  CHECK(mp::abs(oracle_lambda_integral(c.forms[0], 9, 30).value) < Real("1e-30"));
  CHECK_THROWS_AS(oracle_lambda_integral(b.forms[0], 12, 30), InvalidArgument);
}

TEST_CASE("functional equation and L-form identity for Delta") {
  const int P = 64;
  const auto b = modforms::eigenforms(12, P);
  const auto v = completed_lvalues(b.forms[0], P);
  CHECK(v.epsilon == 1);
  CHECK_FALSE(v.unverified_tail);
  CHECK(v.trunc_bound < pow10(-P - 10));
  const auto fe = verify_functional_equation(v);
  CHECK(fe.lambda_residual < pow10(-(P - 10)));
  CHECK(fe.l_identity_residual < pow10(-(P - 10)));
  const auto again = verify_functional_equation(v);
  CHECK(again.lambda_residual == fe.lambda_residual);
  // Definition of the completed L-function at s = 1: L = 2 pi Lambda.
  PrecisionGuard g(v.working_precision);
  CHECK(mp::abs(v.l_at(1) - two_pi() * v.lambda_at(1)) < pow10(-P));
  // Dirichlet series oracle: sum tau(n) n^{-11} converges absolutely
  // (tail below sum_{n>400} 2 n^{-5} < 1e-9).
  const auto tau = modforms::delta_series(401);
  double dirichlet = 0;
  for (int n = 400; n >= 1; --n) dirichlet += tau[n].get_d() / std::pow(static_cast<double>(n), 11.0);
  CHECK(std::fabs(to_double(v.l_at(11)) - dirichlet) < 1e-9);
}

TEST_CASE("k = 0 mod 4 eigenforms have epsilon +1, k = 2 mod 4 have -1") {
  const auto b = modforms::eigenforms(24, 64);
  for (const auto& f : b.forms) {
    const auto v = completed_lvalues(f, 64);
    CHECK(v.epsilon == 1);
    CHECK(verify_functional_equation(v).lambda_residual < pow10(-54));
  }
  const auto c = modforms::eigenforms(30, 64);
  const auto v = completed_lvalues(c.forms[0], 64);
  CHECK(v.epsilon == -1);
  CHECK(mp::abs(v.lambda_at(15)) <= 2 * v.trunc_bound);
}

TEST_CASE("linearity and table combination") {
  const auto b = modforms::eigenforms(24, 64);
  const auto v1 = completed_lvalues(b.forms[0], 64);
  const auto v2 = completed_lvalues(b.forms[1], 64);
  const std::vector<Real> a{Real(2), Real(3)};
  const auto h = modforms::linear_combination(std::span<const modforms::CuspForm>(b.forms), std::span<const Real>(a), 64);
  const auto vh = completed_lvalues(h, 64);
  const std::vector<CriticalLValues> tables{v1, v2};
  const auto vc = combine(std::span<const CriticalLValues>(tables), std::span<const Real>(a), h.leading_value);
  PrecisionGuard g(vh.working_precision);
  for (int s = 1; s < 24; ++s) {
    const Real direct = 2 * v1.lambda_at(s) + 3 * v2.lambda_at(s);
    CHECK(mp::abs(h.leading_value * vh.lambda_at(s) - direct) < 5 * mp::abs(h.leading_value) * vh.trunc_bound + pow10(-60));
    CHECK(mp::abs(vc.lambda_at(s) - vh.lambda_at(s)) < 5 * vh.trunc_bound + pow10(-60));
  }
}

TEST_CASE("doubling precision moves values by less than the truncation bound") {
  const auto lo = modforms::eigenforms(16, 40);
  const auto hi = modforms::eigenforms(16, 80);
  const auto vlo = completed_lvalues(lo.forms[0], 40);
  const auto vhi = completed_lvalues(hi.forms[0], 80);
  PrecisionGuard g(vhi.working_precision);
  for (int s = 1; s < 16; ++s) CHECK(mp::abs(vlo.lambda_at(s) - vhi.lambda_at(s)) < vlo.trunc_bound + pow10(-45));
}

TEST_CASE("too few coefficients are rejected") {
  const auto b = modforms::eigenforms(12, 40);
  auto f = b.forms[0];
  f.coeffs.resize(6);
  CHECK_THROWS_AS(completed_lvalues(f, 40), InsufficientPrecision);
}

TEST_CASE("tail bounds E1 and E2") {
  const auto t = tail_bounds(120, 1, Real(1));
  PrecisionGuard g(60);
  CHECK(mp::abs(t.e1 - Real(4) / mp::pow(Real(2), 30)) < Real("1e-50"));
  CHECK(t.e2 > 0);
  const Real k(120);
  CHECK(mp::abs(t.e2 - 2 * (2 * mp::sqrt(k) * mp::log(2 * k) + 1 + mp::pow(Real(2), 61) * mp::exp(-pi() * k))) <
        Real("1e-40"));
  CHECK_THROWS_AS(tail_bounds(120, 11, Real(1)), InvalidArgument);
  CHECK_THROWS_AS(tail_bounds(120, 0, Real(1)), InvalidArgument);
}

TEST_CASE("tail constant and the function g") {
  const Real c = tail_zeta_constant(30);
  const long double z = zeta_three_halves();
  const long double oracle = z * z / 4 - 0.5L;
  CHECK(std::fabs(to_double(c) - static_cast<double>(oracle)) < 1e-6);
  CHECK(std::fabs(to_double(c) - 1.206) < 5e-4);
  PrecisionGuard g(50);
  for (int x : {4, 12, 100}) CHECK(tail_g(Real(x)) > c);
}
