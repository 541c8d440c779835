#include "doctest.h"

#include "periodrh/criteria.hpp"
#include "periodrh/errors.hpp"
#include "periodrh/periodpoly.hpp"

#include <cmath>
#include <optional>
#include <vector>

using namespace periodrh;
using namespace periodrh::criteria;
namespace mp = boost::multiprecision;

namespace {

const double kTwoPi = 2 * M_PI;

// Double-precision evaluation of the four constants via lgamma.
struct Approx4 {
  double alpha, beta, gamma, delta;
};

Approx4 constants_double(int k, int N) {
  const int fl = k / 4;
  const double w1 = k - 1;
  Approx4 a{};
  a.alpha = 4 * std::exp(kTwoPi) / std::pow(N + 1.0, k / 4.0);
  a.beta = 4 * std::exp(kTwoPi + fl * std::log(kTwoPi) - std::lgamma(fl + 1.0)) * (std::sqrt(k) * std::log(2.0 * k) + 1);
  a.gamma = std::exp(kTwoPi * N + fl * std::log(kTwoPi * N) - w1 * std::log(N) - std::lgamma(fl + 1.0));
  const double tail = std::exp(kTwoPi * N + (k / 2) * std::log(kTwoPi * N) - std::lgamma(k / 2 + 1.0));
  a.delta = (std::exp(-kTwoPi * N) - tail) / std::pow(N, w1);
  return a;
}

bool close(const Real& x, double y, double rel) { return std::fabs(to_double(x) - y) <= rel * std::fabs(y); }

}  // namespace

TEST_CASE("criterion constants against a double-precision oracle") {
  const auto c = criterion_constants(120, 1);
  CHECK(close(c.alpha, 4 * std::exp(kTwoPi) / std::pow(2.0, 30), 1e-12));
  CHECK(std::fabs(to_double(c.alpha) - 1.99e-6) < 0.01e-6);
  for (int k : {42, 60, 120, 122, 150, 200, 300}) {
    const auto x = criterion_constants(k, 1);
    const auto y = constants_double(k, 1);
    CHECK(close(x.alpha, y.alpha, 1e-10));
    CHECK(close(x.beta, y.beta, 1e-10));
    CHECK(close(x.gamma, y.gamma, 1e-10));
    CHECK(close(x.delta, y.delta, 1e-10));
  }
  const auto c2 = criterion_constants(300, 2);
  const auto y2 = constants_double(300, 2);
  CHECK(close(c2.gamma, y2.gamma, 1e-10));
  CHECK(close(c2.alpha, y2.alpha, 1e-10));
  CHECK_THROWS_AS(criterion_constants(120, 11), InvalidArgument);
  CHECK_THROWS_AS(criterion_constants(121, 1), InvalidArgument);
  CHECK_THROWS_AS(criterion_constants(120, 0), InvalidArgument);
}

TEST_CASE("published bounds on delta and gamma") {
  for (int k : {150, 180, 220, 300}) {
    const auto c = criterion_constants(k, 1);
    CHECK(c.delta > Real("0.001867"));
    CHECK(c.gamma < Real("1e-10"));
  }
}

TEST_CASE("constants positive and delta monotone on the grid") {
  // delta - e^{-2 pi} is about 10^{-142} at k = 300. Below k = 52 the
  // subtracted term (2 pi)^{k/2}/(k/2)! e^{2 pi} exceeds e^{-2 pi}.
  std::optional<Real> prev;
  for (int k = 42; k <= 300; k += 2) {
    const auto c = criterion_constants(k, 1, 300);
    CHECK(c.alpha > 0);
    CHECK(c.beta > 0);
    CHECK(c.gamma > 0);
    CHECK((c.delta > 0) == (k >= 52));
    if (prev) CHECK(c.delta > *prev);
    prev = c.delta;
  }
}

TEST_CASE("positive combination threshold") {
  CHECK_FALSE(positive_combination_check(110));
  for (int k = 120; k <= 300; k += 2) CHECK(positive_combination_check(k));
}

TEST_CASE("U bounds") {
  const double u180 = 0.001865 / (4 * std::exp(kTwoPi)) * std::pow(2.0, 45);
  CHECK(close(u_bound(180), u180, 1e-12));
  CHECK(std::fabs(to_double(u_bound(180)) / 3.06e7 - 1) < 0.01);
  CHECK(mp::abs(u_bound(184) / u_bound(180) - 2) < Real("1e-40"));
  for (int k : {180, 200, 240}) CHECK(u_bound(k) < u_star(k));
  CHECK(close(u_star(160), 100 * std::pow(7.0 / 3, 5), 1e-12));
}

TEST_CASE("u_bound_check") {
  std::vector<Real> v{Real(2), Real(-1), Real(0)};
  auto r = u_bound_check(std::span<const Real>(v), 180);
  CHECK(r.ineq_holds);
  CHECK(r.sum_abs == 3);
  CHECK(r.abs_sum == 1);
  CHECK(r.c_plus == 2);
  CHECK(r.c_minus == 1);
  CHECK_FALSE(r.below_threshold);

  std::vector<Real> z{Real(3), Real(-1), Real(-2)};
  CHECK_FALSE(u_bound_check(std::span<const Real>(z), 300).ineq_holds);

  std::vector<Real> pos{Real(1), Real(4), Real(0)};
  const auto rp = u_bound_check(std::span<const Real>(pos), 180);
  CHECK(rp.c_minus == 0);
  CHECK(rp.pm_condition_holds);
  CHECK(u_bound_check(std::span<const Real>(pos), 120).below_threshold);

  std::vector<Real> zero{Real(0), Real(0)};
  CHECK_THROWS_AS(u_bound_check(std::span<const Real>(zero), 180), InvalidArgument);
}

TEST_CASE("constellation k0") {
  const std::vector<Real> one{Real(1)};
  const std::vector<Real> none;
  CHECK(constellation_k0(std::span<const Real>(one), std::span<const Real>(none)) == 180);
  const std::vector<Real> two{Real(1), Real(1)};
  CHECK(constellation_k0(std::span<const Real>(two), std::span<const Real>(one)) == 180);

  // Sum(a)/Sum(c) close to 1: k0 is the first even k with U(k) >= (1+t)/(1-t).
  const std::vector<Real> c{Real(1)};
  const std::vector<Real> a{Real("0.9999999999")};
  const int k0 = constellation_k0(std::span<const Real>(c), std::span<const Real>(a));
  CHECK(k0 % 2 == 0);
  CHECK(k0 > 180);
  const auto ok = [&](int k) {
    const Real u = u_bound(k);
    return a[0] <= (u - 1) / (u + 1) * c[0];
  };
  CHECK(ok(k0));
  CHECK_FALSE(ok(k0 - 2));
  CHECK_THROWS_AS(constellation_k0(std::span<const Real>(one), std::span<const Real>(two)), InvalidArgument);
}

TEST_CASE("main criterion: sufficiency only for Delta") {
  const auto basis = modforms::eigenforms(12, 64);
  auto rep = main_criterion(basis.forms[0]);
  CHECK(rep.overall == Overall::fail_inconclusive);
  CHECK(rep.c_upper_source == "deligne-eigenbasis");
  CHECK(*rep.c_upper == 1);
  CHECK(rep.c_lower <= 1 + Real("1e-30"));
  CHECK(rep.lhs == *rep.c_upper * rep.alpha + *rep.c_upper * rep.beta + rep.gamma);

  const auto values = lfunctions::completed_lvalues(basis.forms[0], 64);
  const auto p = periodpoly::modified_polynomial_p(values);
  attach_direct_check(rep, zeros::unimodularity_report(std::span<const Real>(p.real_coeffs()), 1e-10, 64));
  CHECK(*rep.direct_verdict == zeros::Verdict::unimodular);

  // Explicit series: Jenkins-Rouse bound.
  auto g = basis.forms[0];
  g.provenance = {};
  const auto rj = main_criterion(g);
  CHECK(rj.c_upper_source == "jenkins-rouse");
  CHECK(*rj.c_upper >= rj.c_lower);

  g.coeffs.resize(1);
  const auto rn = main_criterion(g);
  CHECK_FALSE(rn.c_upper.has_value());
  CHECK(rn.overall == Overall::fail_inconclusive);
  CHECK_FALSE(rn.reason.empty());
}

TEST_CASE("main criterion at k = 110 and k = 120") {
  modforms::CuspForm f;
  f.provenance.kind = modforms::Provenance::Kind::eigenform;
  f.coeffs = {Real(0), Real(1)};
  f.precision = 50;
  f.k = 120;
  CHECK(main_criterion(f).overall == Overall::sufficient_pass);
  f.k = 110;
  const auto r = main_criterion(f);
  CHECK(r.overall == Overall::fail_inconclusive);
  CHECK(r.c_upper.value() * r.beta > r.delta);
}

TEST_CASE("scan vectors") {
  CHECK(scan_vector(1, 1, 0, true, 0) == std::vector<long>{-1});
  CHECK(scan_vector(1, 1, 1, true, 0) == std::vector<long>{1});
  std::vector<std::vector<long>> all;
  for (std::uint64_t i = 0; i < 24; ++i) all.push_back(scan_vector(2, 2, i, true, 0));
  std::sort(all.begin(), all.end());
  CHECK(std::unique(all.begin(), all.end()) == all.end());
  for (const auto& v : all) CHECK((v[0] != 0 || v[1] != 0));
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto v = scan_vector(3, 1, i, false, 9);
    CHECK(v == scan_vector(3, 1, i, false, 9));
    CHECK((v[0] != 0 || v[1] != 0 || v[2] != 0));
    for (long x : v) CHECK((x >= -1 && x <= 1));
  }
}

TEST_CASE("exhaustive scan at k = 12") {
  const auto tables = build_tables(12, 64);
  ScanOptions opt;
  opt.exhaustive = true;
  const auto res = probability_scan(tables, 1, opt);
  CHECK(res.total == 2);
  CHECK(res.unimodular_count == 2);
  CHECK(res.p_hat == "1/1");
  CHECK(res.soundness_violations == 0);
  opt.budget = 2;
  CHECK_THROWS_AS(probability_scan(tables, 1, opt), BudgetExceeded);
  ScanOptions mc;
  CHECK_THROWS_AS(probability_scan(tables, 1, mc), InvalidArgument);
}

TEST_CASE("scan results do not depend on the worker count") {
  const auto tables = build_tables(24, 64);
  ScanOptions opt;
  opt.exhaustive = true;
  opt.keep_records = true;
  const auto one = probability_scan(tables, 2, opt);
  opt.threads = 3;
  const auto three = probability_scan(tables, 2, opt);
  CHECK(one.total == 24);
  CHECK(one.unimodular_count == three.unimodular_count);
  REQUIRE(one.records.size() == three.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    CHECK(one.records[i].coeffs == three.records[i].coeffs);
    CHECK(one.records[i].verdict == three.records[i].verdict);
    CHECK(one.records[i].max_circle_distance == three.records[i].max_circle_distance);
  }
  // Scaling invariance: c and 2c share a verdict.
  for (const auto& s : one.records) {
    std::vector<long> twice = s.coeffs;
    for (auto& x : twice) x *= 2;
    CHECK(classify_combination(tables, std::span<const long>(twice), 0).verdict == s.verdict);
  }
  // Zero-sum vectors have vanishing order 2.
  for (const auto& s : one.records) CHECK((s.zero_sum == (s.N == 2)));

  ScanOptions mc;
  mc.samples = 10;
  mc.seed = 5;
  const auto a = probability_scan(tables, 3, mc);
  mc.threads = 2;
  const auto b = probability_scan(tables, 3, mc);
  CHECK(a.unimodular_count == b.unimodular_count);
  CHECK(a.zero_sum_count == b.zero_sum_count);
  CHECK(a.p_hat == b.p_hat);
}
