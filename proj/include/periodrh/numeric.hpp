#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace periodrh {

/// Variable-precision binary float backed by MPFR. Every value carries its own
/// precision and a binary operation rounds to the precision of its left
/// operand, so caller-supplied values are lifted with with_precision on entry.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

/// Digits carried beyond the requested precision in every internal computation.
inline constexpr int kGuardDigits = 20;

/// Default working precision for weight k.
inline int default_precision(int k) { return k * 2 > 64 ? k * 2 : 64; }

// Boost 1.74 keeps the default precision for freshly constructed values in a
// single process-wide variable, so parallel work runs in separate processes.
// The guard only writes when the value actually changes.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(int digits10);
  ~PrecisionGuard();
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned previous_;
  bool changed_;
};

int current_precision();

inline const Real& max_of(const Real& a, const Real& b) { return a < b ? b : a; }
inline const Real& min_of(const Real& a, const Real& b) { return b < a ? b : a; }

Real pi();
Real two_pi();
Real from_string(const std::string& decimal);
/// Scientific notation with `digits` significant digits; stable across runs.
std::string to_string(const Real& x, int digits);
/// Scientific notation at the value's own precision.
std::string to_string(const Real& x);
double to_double(const Real& x);
/// log10 |x| without overflow; -inf for zero.
double log10_abs(const Real& x);
Real pow10(int exponent);
/// Copy of x rounded to `digits` significant decimal digits.
Real with_precision(const Real& x, int digits);
Real factorial(int n);
Real binomial(int n, int j);

struct Complex {
  Real re;
  Real im;

  Complex() : re(0), im(0) {}
  Complex(Real r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Complex& operator*=(const Real& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Complex& operator/=(const Complex& o);

  Real norm() const { return re * re + im * im; }
  Real abs() const;
  Complex conj() const { return {re, -im}; }
  bool is_zero() const { return re == 0 && im == 0; }
};

inline Complex operator+(Complex a, const Complex& b) { return a += b; }
inline Complex operator-(Complex a, const Complex& b) { return a -= b; }
inline Complex operator*(Complex a, const Complex& b) { return a *= b; }
inline Complex operator*(Complex a, const Real& s) { return a *= s; }
inline Complex operator*(const Real& s, Complex a) { return a *= s; }
inline Complex operator/(Complex a, const Complex& b) { return a /= b; }
inline Complex operator-(const Complex& a) { return {-a.re, -a.im}; }

/// i^e for any integer e.
Complex i_power(int e);

/// Counter-based generator: the i-th draw is a pure function of (seed, i).
/// Portable across platforms, unlike the standard distributions.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t at(std::uint64_t counter) const;
  std::uint64_t next() { return at(counter_++); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [lo, hi], rejection sampled (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace periodrh
