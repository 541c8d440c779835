#pragma once

namespace periodrh {

/// log10 of an upper bound for
///   sum_{n > n0} |c(n)| [(2 pi n)^{-s} Gamma(s, 2 pi n) + (2 pi n)^{s-k} Gamma(k-s, 2 pi n)]
/// valid for every 1 <= s <= k-1 whenever |c(n)| <= C sigma_0(n) n^{(k-1)/2}
/// and C <= 10^log10_c.
///
/// For x = 2 pi n >= 2k and integer a < k, Gamma(a, x) <= 2 x^{a-1} e^{-x}, so
/// each bracket is at most 4 e^{-2 pi n} / (2 pi n); with sigma_0(n) <= 2 sqrt(n)
/// a term is at most (4C/pi) n^{k/2-1} e^{-2 pi n}. Consecutive terms shrink by
/// at least rho = exp((k/2-1)/(n0+1) - 2 pi) < 1, so the tail is bounded by
/// its first term over (1 - rho). Requires n0 + 1 >= k / pi.
double lvalue_tail_log10(int k, int n0, double log10_c);

/// Smallest n0 >= ceil(k/pi) - 1 whose tail bound is below 10^{-digits}.
int lvalue_terms(int k, int digits, double log10_c);

}  // namespace periodrh
