#include "periodrh/numeric.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <cmath>
#include <limits>

namespace periodrh {

PrecisionGuard::PrecisionGuard(int digits10)
    : previous_(Real::default_precision()), changed_(previous_ != static_cast<unsigned>(digits10)) {
  if (digits10 < 1) throw std::invalid_argument("precision must be positive");
  if (changed_) Real::default_precision(static_cast<unsigned>(digits10));
}

PrecisionGuard::~PrecisionGuard() {
  if (changed_) Real::default_precision(previous_);
}

int current_precision() { return static_cast<int>(Real::default_precision()); }

Real pi() {
  Real x;
  mpfr_const_pi(x.backend().data(), MPFR_RNDN);
  return x;
}

Real two_pi() { return pi() * 2; }

Real from_string(const std::string& decimal) { return Real(decimal); }

std::string to_string(const Real& x, int digits) {
  if (x == 0) return "0";
  return x.str(digits, std::ios_base::scientific);
}

std::string to_string(const Real& x) { return to_string(x, static_cast<int>(x.precision())); }

double to_double(const Real& x) { return x.convert_to<double>(); }

double log10_abs(const Real& x) {
  if (x == 0) return -std::numeric_limits<double>::infinity();
  long exp2 = 0;
  const double mant = mpfr_get_d_2exp(&exp2, x.backend().data(), MPFR_RNDN);
  return std::log10(std::fabs(mant)) + static_cast<double>(exp2) * std::log10(2.0);
}

Real pow10(int exponent) { return boost::multiprecision::pow(Real(10), exponent); }

Real with_precision(const Real& x, int digits) {
  Real out;
  out.precision(static_cast<unsigned>(digits));
  mpfr_set(out.backend().data(), x.backend().data(), MPFR_RNDN);
  return out;
}

Real factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial of negative integer");
  Real x;
  mpfr_fac_ui(x.backend().data(), static_cast<unsigned long>(n), MPFR_RNDN);
  return x;
}

Real binomial(int n, int j) {
  if (j < 0 || j > n) return Real(0);
  mpz_t b;
  mpz_init(b);
  mpz_bin_uiui(b, static_cast<unsigned long>(n), static_cast<unsigned long>(j));
  Real x;
  mpfr_set_z(x.backend().data(), b, MPFR_RNDN);
  mpz_clear(b);
  return x;
}

Complex& Complex::operator/=(const Complex& o) {
  // Smith's algorithm keeps intermediate magnitudes bounded.
  if (boost::multiprecision::abs(o.re) >= boost::multiprecision::abs(o.im)) {
    Real r = o.im / o.re;
    Real d = o.re + o.im * r;
    Real nre = (re + im * r) / d;
    im = (im - re * r) / d;
    re = std::move(nre);
  } else {
    Real r = o.re / o.im;
    Real d = o.re * r + o.im;
    Real nre = (re * r + im) / d;
    im = (im * r - re) / d;
    re = std::move(nre);
  }
  return *this;
}

Real Complex::abs() const { return boost::multiprecision::hypot(re, im); }

Complex i_power(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {Real(1), Real(0)};
    case 1: return {Real(0), Real(1)};
    case 2: return {Real(-1), Real(0)};
    default: return {Real(0), Real(-1)};
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::at(std::uint64_t counter) const {
  const std::uint64_t key = splitmix64(seed_ ^ splitmix64(stream_ + 0x632BE59BD9B4E019ULL));
  return splitmix64(key + counter * 0xD1B54A32D192ED03ULL);
}

std::int64_t CounterRng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  for (;;) {
    const std::uint64_t v = next();
    if (v < limit) return lo + static_cast<std::int64_t>(v % span);
  }
}

}  // namespace periodrh
