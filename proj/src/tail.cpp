#include "periodrh/tail.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace periodrh {

double lvalue_tail_log10(int k, int n0, double log10_c) {
  const double n1 = n0 + 1.0;
  if (n1 < k / std::numbers::pi) throw std::invalid_argument("lvalue_tail_log10: n0 + 1 must be >= k / pi");
  const double two_pi = 2 * std::numbers::pi;
  const double rho = std::exp((k / 2.0 - 1.0) / n1 - two_pi);
  return log10_c + std::log10(4.0 / std::numbers::pi) + (k / 2.0 - 1.0) * std::log10(n1) -
         two_pi * n1 * std::numbers::log10e - std::log10(1.0 - rho);
}

int lvalue_terms(int k, int digits, double log10_c) {
  int n0 = static_cast<int>(std::ceil(k / std::numbers::pi)) - 1;
  if (n0 < 1) n0 = 1;
  while (lvalue_tail_log10(k, n0, log10_c) >= -digits) ++n0;
  return n0;
}

}  // namespace periodrh
