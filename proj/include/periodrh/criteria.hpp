#pragma once

#include "periodrh/lfunctions.hpp"
#include "periodrh/modforms.hpp"
#include "periodrh/numeric.hpp"
#include "periodrh/zeros.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace periodrh::criteria {

using modforms::CuspForm;

/// alpha and beta are per unit C_f.
struct CriterionConstants {
  int k = 0;
  int N = 0;
  Real alpha;
  Real beta;
  Real gamma;
  Real delta;
};

/// alpha = 4 e^{2 pi} / (N+1)^{k/4}
/// beta  = 4 e^{2 pi} (2 pi)^{[k/4]} [sqrt(k) log(2k) + 1] / [k/4]!
/// gamma = e^{2 pi N} (2 pi N)^{[k/4]} / (N^{w+1} [k/4]!)
/// delta = N^{-(w+1)} (e^{-2 pi N} - (2 pi N)^{k/2} / (k/2)! e^{2 pi N})
CriterionConstants criterion_constants(int k, int N, int precision = 50);

enum class Overall { sufficient_pass, fail_inconclusive };
std::string to_string(Overall o);

struct CriterionReport {
  int k = 0;
  int N = 0;
  Real c_lower;
  std::optional<Real> c_upper;
  /// "deligne-eigenbasis", "jenkins-rouse" or "none"
  std::string c_upper_source;
  Real alpha;
  Real beta;
  Real gamma;
  Real delta;
  Real lhs;
  Real rhs;
  bool key_inequality_holds = false;
  bool h_condition_holds = false;
  Overall overall = Overall::fail_inconclusive;
  std::string reason;
  /// Ground truth from the direct root check, when attached.
  std::optional<zeros::Verdict> direct_verdict;
  std::optional<Real> direct_max_circle_distance;
};

/// Evaluates C alpha + C beta + gamma < delta with C = c_upper and the disk
/// criterion for H_{k/2-1, N}. Sufficient only.
CriterionReport main_criterion(const CuspForm& f, int precision = 50);
void attach_direct_check(CriterionReport& report, const zeros::ZeroReport& direct);

/// U(k) = 0.001865 / (4 e^{2 pi}) 2^{k/4}
Real u_bound(int k, int precision = 50);
/// U*(k) = 100 (7/3)^{(k-150)/2}
Real u_star(int k, int precision = 50);

struct UBoundReport {
  int k = 0;
  Real u;
  Real u_star;
  Real sum_abs;
  Real abs_sum;
  Real c_plus;
  Real c_minus;
  bool ineq_holds = false;
  bool pm_condition_holds = false;
  /// k < 180: evaluated, but not a proven sufficient condition there.
  bool below_threshold = false;
};

UBoundReport u_bound_check(std::span<const Real> coeffs, int k, int precision = 50);

/// Smallest even k >= 180 with sum(a) <= (U(k)-1)/(U(k)+1) sum(c).
int constellation_k0(std::span<const Real> c, std::span<const Real> a);

/// Sufficient condition for every normalized eigenbasis combination with C_f <= 1:
/// alpha + beta + gamma < delta at N = 1 and the disk criterion for H_{k/2-1,1}.
bool positive_combination_check(int k);

/// Eigenbasis and its critical values for one weight; read-only once built.
struct EigenTables {
  int k = 0;
  int precision = 0;
  modforms::EigenBasis basis;
  std::vector<lfunctions::CriticalLValues> values;
};

EigenTables build_tables(int k, int precision);

struct ClassifyOptions {
  double tolerance = zeros::kDefaultTolerance;
  /// Also evaluate main_criterion and u_bound_check (soundness coupling).
  bool criteria = true;
};

struct SampleOutcome {
  std::vector<long> coeffs;
  int N = 0;
  zeros::Verdict verdict = zeros::Verdict::neither;
  bool reliable = false;
  Real max_circle_distance;
  bool criterion_pass = false;
  bool ubound_pass = false;
  bool zero_sum = false;
  /// A proven sufficient condition passed but the root check did not
  /// return unimodular.
  bool soundness_violation = false;
};

/// Ground-truth classification of sum_j coeffs_j f_j by a direct root check on
/// p_f (same root moduli as r_f), with the critical values combined linearly.
SampleOutcome classify_combination(const EigenTables& tables, std::span<const long> coeffs, std::uint64_t seed,
                                   const ClassifyOptions& options = {});

struct ScanOptions {
  bool exhaustive = false;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  /// Largest exhaustive enumeration accepted.
  std::uint64_t budget = 1'000'000;
  /// Worker processes (>= 1).
  int threads = 1;
  bool keep_records = false;
  ClassifyOptions classify;
};

struct ScanResult {
  int k = 0;
  int X = 0;
  std::string mode;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int precision = 0;
  std::uint64_t total = 0;
  std::uint64_t unimodular_count = 0;
  std::uint64_t zero_sum_count = 0;
  std::uint64_t zero_sum_unimodular = 0;
  std::uint64_t nonnegative_count = 0;
  std::uint64_t nonnegative_unimodular = 0;
  std::uint64_t unreliable_count = 0;
  std::uint64_t criterion_pass_count = 0;
  std::uint64_t ubound_pass_count = 0;
  std::uint64_t soundness_violations = 0;
  /// unimodular_count / total, reduced.
  std::string p_hat;
  double p_hat_value = 0;
  std::vector<SampleOutcome> records;
};

/// Classifies integer vectors in [-X, X]^r minus the origin: all of them
/// (exhaustive) or `samples` uniform draws with replacement. Sample i depends
/// only on (seed, i), so results do not depend on the worker count.
/// Throws BudgetExceeded when an exhaustive scan exceeds options.budget.
ScanResult probability_scan(const EigenTables& tables, int X, const ScanOptions& options);

/// Integer vector number `index` of the scan (exhaustive enumeration order or
/// the seeded draw).
std::vector<long> scan_vector(int r, int X, std::uint64_t index, bool exhaustive, std::uint64_t seed);

}  // namespace periodrh::criteria
