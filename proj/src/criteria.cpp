#include "periodrh/criteria.hpp"

#include "periodrh/errors.hpp"
#include "periodrh/periodpoly.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace periodrh::criteria {

namespace mp = boost::multiprecision;

namespace {

void check_weight(int k) {
  if (k < 12 || k % 2 != 0) throw InvalidArgument("weight must be even and at least 12, got " + std::to_string(k));
}

Real sample_distance(const Real& d) { return from_string(periodrh::to_string(d, 17)); }

zeros::Verdict parse_verdict(const std::string& s) {
  if (s == "unimodular") return zeros::Verdict::unimodular;
  if (s == "in_disk") return zeros::Verdict::in_disk;
  return zeros::Verdict::neither;
}

}  // namespace

std::string to_string(Overall o) { return o == Overall::sufficient_pass ? "sufficient-pass" : "fail-inconclusive"; }

CriterionConstants criterion_constants(int k, int N, int precision) {
  check_weight(k);
  if (N < 1 || N > k / 12) throw InvalidArgument("criterion_constants: order N must lie in [1, k/12]");
  PrecisionGuard guard(precision + kGuardDigits);
  const int w = k - 2;
  const int fl = k / 4;
  const Real tp = two_pi();
  const Real e2pi = mp::exp(tp);
  const Real kr(k);
  const Real tpn = tp * N;
  CriterionConstants c;
  c.k = k;
  c.N = N;
  c.alpha = 4 * e2pi / mp::pow(Real(N + 1), kr / 4);
  c.beta = 4 * e2pi * mp::pow(tp, fl) * (mp::sqrt(kr) * mp::log(2 * kr) + 1) / factorial(fl);
  c.gamma = mp::exp(tpn) * mp::pow(tpn, fl) / (mp::pow(Real(N), w + 1) * factorial(fl));
  c.delta = (mp::exp(-tpn) - mp::pow(tpn, k / 2) / factorial(k / 2) * mp::exp(tpn)) / mp::pow(Real(N), w + 1);
  return c;
}

CriterionReport main_criterion(const CuspForm& f, int precision) {
  check_weight(f.k);
  CriterionReport rep;
  rep.k = f.k;
  rep.N = f.N;
  const auto est = modforms::deligne_constant_estimate(f, f.n_max());
  PrecisionGuard guard(precision + kGuardDigits);
  rep.c_lower = with_precision(est.lower, precision + kGuardDigits);
  if (est.upper) {
    rep.c_upper = with_precision(*est.upper, precision + kGuardDigits);
    rep.c_upper_source = "deligne-eigenbasis";
  } else if (f.n_max() >= modforms::dim_cusp_forms(f.k)) {
    rep.c_upper = with_precision(modforms::jenkins_rouse_bound(f), precision + kGuardDigits);
    rep.c_upper_source = "jenkins-rouse";
  } else {
    rep.c_upper_source = "none";
  }

  const auto c = criterion_constants(f.k, f.N, precision);
  rep.alpha = c.alpha;
  rep.beta = c.beta;
  rep.gamma = c.gamma;
  rep.delta = c.delta;
  rep.rhs = c.delta;
  rep.h_condition_holds = zeros::h_disk_criterion(f.k / 2 - 1, f.N, precision).holds;

  if (!rep.c_upper) {
    rep.lhs = c.gamma;
    rep.reason = "no upper bound for C_f available";
    return rep;
  }
  rep.lhs = *rep.c_upper * c.alpha + *rep.c_upper * c.beta + c.gamma;
  rep.key_inequality_holds = rep.lhs < rep.rhs;
  if (rep.key_inequality_holds && rep.h_condition_holds) {
    rep.overall = Overall::sufficient_pass;
    rep.reason = "key inequality and H disk criterion hold";
  } else if (!rep.key_inequality_holds) {
    rep.reason = c.delta <= 0 ? "delta is not positive" : "key inequality fails: C alpha + C beta + gamma >= delta";
  } else {
    rep.reason = "H disk criterion not established for m = k/2 - 1";
  }
  return rep;
}

void attach_direct_check(CriterionReport& report, const zeros::ZeroReport& direct) {
  report.direct_verdict = direct.verdict;
  report.direct_max_circle_distance = direct.max_circle_distance;
}

Real u_bound(int k, int precision) {
  PrecisionGuard guard(precision + kGuardDigits);
  return Real("0.001865") / (4 * mp::exp(two_pi())) * mp::pow(Real(2), Real(k) / 4);
}

Real u_star(int k, int precision) {
  PrecisionGuard guard(precision + kGuardDigits);
  return 100 * mp::pow(Real(7) / 3, Real(k - 150) / 2);
}

UBoundReport u_bound_check(std::span<const Real> coeffs, int k, int precision) {
  check_weight(k);
  if (std::all_of(coeffs.begin(), coeffs.end(), [](const Real& c) { return c == 0; }))
    throw InvalidArgument("u_bound_check: all coefficients are zero");
  PrecisionGuard guard(precision + kGuardDigits);
  UBoundReport rep;
  rep.k = k;
  rep.u = u_bound(k, precision);
  rep.u_star = u_star(k, precision);
  rep.c_plus = 0;
  rep.c_minus = 0;
  Real sum(0);
  for (const auto& c0 : coeffs) {
    const Real c = with_precision(c0, precision + kGuardDigits);
    sum += c;
    if (c > 0)
      rep.c_plus += c;
    else
      rep.c_minus -= c;
  }
  rep.sum_abs = rep.c_plus + rep.c_minus;
  rep.abs_sum = mp::abs(sum);
  rep.ineq_holds = rep.sum_abs <= rep.u * rep.abs_sum;
  const Real ratio = (rep.u - 1) / (rep.u + 1);
  rep.pm_condition_holds = rep.c_plus <= ratio * rep.c_minus || rep.c_minus <= ratio * rep.c_plus;
  rep.below_threshold = k < 180;
  return rep;
}

int constellation_k0(std::span<const Real> c, std::span<const Real> a) {
  PrecisionGuard guard(50 + kGuardDigits);
  Real sc(0);
  Real sa(0);
  for (const auto& x : c) {
    if (x < 0) throw InvalidArgument("constellation_k0: c must be nonnegative");
    sc += with_precision(x, 50 + kGuardDigits);
  }
  for (const auto& x : a) {
    if (x < 0) throw InvalidArgument("constellation_k0: a must be nonnegative");
    sa += with_precision(x, 50 + kGuardDigits);
  }
  if (!(sc > sa)) throw InvalidArgument("constellation_k0: needs sum(c) > sum(a)");
  const auto holds = [&](int k) {
    const Real u = u_bound(k);
    return sa <= (u - 1) / (u + 1) * sc;
  };
  if (holds(180)) return 180;
  // U grows like 2^{k/4}, so the condition is monotone in k.
  int lo = 180;
  long step = 2;
  while (!holds(static_cast<int>(lo + step))) {
    lo = static_cast<int>(lo + step);
    step *= 2;
    if (lo + step > std::numeric_limits<int>::max() / 2) throw NumericalError("constellation_k0: search exceeded int range");
  }
  int hi = static_cast<int>(lo + step);
  while (hi - lo > 2) {
    const int mid = lo + ((hi - lo) / 4) * 2;
    if (holds(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

bool positive_combination_check(int k) {
  check_weight(k);
  const auto c = criterion_constants(k, 1);
  PrecisionGuard guard(50 + kGuardDigits);
  const bool key = c.alpha + c.beta + c.gamma < c.delta;
  return key && zeros::h_disk_criterion(k / 2 - 1, 1).holds;
}

EigenTables build_tables(int k, int precision) {
  check_weight(k);
  EigenTables t;
  t.k = k;
  t.precision = precision;
  t.basis = modforms::eigenforms(k, precision);
  t.values.reserve(t.basis.forms.size());
  for (const auto& f : t.basis.forms) t.values.push_back(lfunctions::completed_lvalues(f, precision));
  return t;
}

SampleOutcome classify_combination(const EigenTables& tables, std::span<const long> coeffs, std::uint64_t seed,
                                   const ClassifyOptions& options) {
  if (coeffs.size() != tables.values.size())
    throw InvalidArgument("classify_combination: expected " + std::to_string(tables.values.size()) + " coefficients");
  SampleOutcome out;
  out.coeffs.assign(coeffs.begin(), coeffs.end());
  out.zero_sum = std::accumulate(coeffs.begin(), coeffs.end(), 0L) == 0;
  std::vector<Real> a;
  a.reserve(coeffs.size());
  for (long c : coeffs) a.emplace_back(c);

  const auto f = modforms::linear_combination(std::span<const CuspForm>(tables.basis.forms), std::span<const Real>(a),
                                              tables.precision);
  out.N = f.N;
  const auto values = lfunctions::combine(std::span<const lfunctions::CriticalLValues>(tables.values),
                                          std::span<const Real>(a), f.leading_value);
  const auto p = periodpoly::modified_polynomial_p(values);
  const auto rep = zeros::unimodularity_report(std::span<const Real>(p.real_coeffs()), options.tolerance,
                                               tables.precision, seed, false);
  out.verdict = rep.verdict;
  out.reliable = rep.reliable;
  out.max_circle_distance = sample_distance(rep.max_circle_distance);

  if (options.criteria) {
    out.criterion_pass = main_criterion(f).overall == Overall::sufficient_pass;
    const auto ub = u_bound_check(std::span<const Real>(a), tables.k);
    out.ubound_pass = ub.ineq_holds && !ub.below_threshold;
    out.soundness_violation = (out.criterion_pass || out.ubound_pass) && out.verdict != zeros::Verdict::unimodular;
  }
  return out;
}

std::vector<long> scan_vector(int r, int X, std::uint64_t index, bool exhaustive, std::uint64_t seed) {
  std::vector<long> v(static_cast<std::size_t>(r));
  if (exhaustive) {
    // Mixed radix 2X+1, first coordinate most significant; the origin sits at
    // the middle index and is skipped.
    const std::uint64_t base = 2 * static_cast<std::uint64_t>(X) + 1;
    std::uint64_t size = 1;
    for (int j = 0; j < r; ++j) size *= base;
    std::uint64_t code = index < (size - 1) / 2 ? index : index + 1;
    for (int j = r - 1; j >= 0; --j) {
      v[static_cast<std::size_t>(j)] = static_cast<long>(code % base) - X;
      code /= base;
    }
    return v;
  }
  CounterRng rng(seed, index);
  do {
    for (auto& x : v) x = static_cast<long>(rng.uniform_int(-X, X));
  } while (std::all_of(v.begin(), v.end(), [](long x) { return x == 0; }));
  return v;
}

namespace {

std::uint64_t root_seed(std::uint64_t seed, std::uint64_t index) {
  return CounterRng(seed, index).at(std::numeric_limits<std::uint64_t>::max());
}

std::string encode(std::uint64_t index, const SampleOutcome& s) {
  std::ostringstream os;
  os << index << ' ' << s.N << ' ' << zeros::to_string(s.verdict) << ' ' << s.reliable << ' ' << s.criterion_pass
     << ' ' << s.ubound_pass << ' ' << s.soundness_violation << ' ' << periodrh::to_string(s.max_circle_distance, 17) << '\n';
  return os.str();
}

void decode(const std::string& line, std::vector<SampleOutcome>& out) {
  std::istringstream is(line);
  std::uint64_t index = 0;
  std::string verdict;
  std::string dist;
  SampleOutcome s;
  is >> index >> s.N >> verdict >> s.reliable >> s.criterion_pass >> s.ubound_pass >> s.soundness_violation >> dist;
  if (!is || index >= out.size()) throw NumericalError("probability_scan: malformed worker record");
  s.verdict = parse_verdict(verdict);
  s.max_circle_distance = from_string(dist);
  out[index] = std::move(s);
}

std::vector<SampleOutcome> run_forked(const EigenTables& tables, int X, const ScanOptions& options,
                                      std::uint64_t count, int workers) {
  std::vector<std::FILE*> files;
  std::vector<pid_t> pids;
  for (int w = 0; w < workers; ++w) {
    const std::uint64_t begin = count * static_cast<std::uint64_t>(w) / static_cast<std::uint64_t>(workers);
    const std::uint64_t end = count * static_cast<std::uint64_t>(w + 1) / static_cast<std::uint64_t>(workers);
    std::FILE* file = std::tmpfile();
    if (file == nullptr) throw NumericalError("probability_scan: cannot create worker file");
    std::fflush(nullptr);
    const pid_t pid = fork();
    if (pid < 0) throw NumericalError("probability_scan: fork failed");
    if (pid == 0) {
      int status = 0;
      try {
        const int r = static_cast<int>(tables.values.size());
        for (std::uint64_t i = begin; i < end; ++i) {
          const auto v = scan_vector(r, X, i, options.exhaustive, options.seed);
          const auto s = classify_combination(tables, std::span<const long>(v), root_seed(options.seed, i),
                                              options.classify);
          const auto line = encode(i, s);
          std::fputs(line.c_str(), file);
        }
      } catch (const std::exception& e) {
        std::fprintf(file, "ERR %s\n", e.what());
        status = 1;
      }
      std::fflush(file);
      _exit(status);
    }
    files.push_back(file);
    pids.push_back(pid);
  }

  std::vector<SampleOutcome> out(count);
  std::string failure;
  for (std::size_t w = 0; w < pids.size(); ++w) {
    int status = 0;
    waitpid(pids[w], &status, 0);
    std::rewind(files[w]);
    char buf[512];
    while (std::fgets(buf, sizeof buf, files[w]) != nullptr) {
      const std::string line(buf);
      if (line.rfind("ERR ", 0) == 0) {
        failure = line.substr(4);
        continue;
      }
      if (failure.empty()) decode(line, out);
    }
    std::fclose(files[w]);
    if (failure.empty() && !(WIFEXITED(status) && WEXITSTATUS(status) == 0)) failure = "worker terminated abnormally";
  }
  if (!failure.empty()) throw NumericalError("probability_scan: " + failure);
  return out;
}

}  // namespace

ScanResult probability_scan(const EigenTables& tables, int X, const ScanOptions& options) {
  check_weight(tables.k);
  if (X < 1) throw InvalidArgument("probability_scan: X must be at least 1");
  if (tables.values.empty()) throw InvalidArgument("probability_scan: S_k is zero-dimensional");
  if (options.threads < 1) throw InvalidArgument("probability_scan: threads must be at least 1");
  const int r = static_cast<int>(tables.values.size());

  std::uint64_t count = 0;
  if (options.exhaustive) {
    const std::uint64_t base = 2 * static_cast<std::uint64_t>(X) + 1;
    std::uint64_t size = 1;
    for (int j = 0; j < r; ++j) {
      if (size > options.budget / base + 1) throw BudgetExceeded("probability_scan: (2X+1)^r exceeds the budget");
      size *= base;
    }
    if (size > options.budget) throw BudgetExceeded("probability_scan: (2X+1)^r exceeds the budget");
    count = size - 1;
  } else {
    if (options.samples == 0) throw InvalidArgument("probability_scan: Monte Carlo mode needs a sample count");
    count = options.samples;
  }

  std::vector<SampleOutcome> samples;
  const int workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(options.threads), count));
  if (workers <= 1) {
    samples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto v = scan_vector(r, X, i, options.exhaustive, options.seed);
      samples.push_back(
          classify_combination(tables, std::span<const long>(v), root_seed(options.seed, i), options.classify));
    }
  } else {
    samples = run_forked(tables, X, options, count, workers);
  }

  ScanResult res;
  res.k = tables.k;
  res.X = X;
  res.mode = options.exhaustive ? "exhaustive" : "montecarlo";
  res.samples = options.exhaustive ? 0 : options.samples;
  res.seed = options.seed;
  res.precision = tables.precision;
  res.total = count;
  for (std::uint64_t i = 0; i < count; ++i) {
    auto& s = samples[i];
    if (s.coeffs.empty()) s.coeffs = scan_vector(r, X, i, options.exhaustive, options.seed);
    s.zero_sum = std::accumulate(s.coeffs.begin(), s.coeffs.end(), 0L) == 0;
    const bool uni = s.verdict == zeros::Verdict::unimodular;
    const bool nonneg = std::all_of(s.coeffs.begin(), s.coeffs.end(), [](long x) { return x >= 0; });
    res.unimodular_count += uni;
    res.zero_sum_count += s.zero_sum;
    res.zero_sum_unimodular += s.zero_sum && uni;
    res.nonnegative_count += nonneg;
    res.nonnegative_unimodular += nonneg && uni;
    res.unreliable_count += !s.reliable;
    res.criterion_pass_count += s.criterion_pass;
    res.ubound_pass_count += s.ubound_pass;
    res.soundness_violations += s.soundness_violation;
  }
  const std::uint64_t g = std::gcd(res.unimodular_count, res.total);
  res.p_hat = std::to_string(res.unimodular_count / g) + "/" + std::to_string(res.total / g);
  res.p_hat_value = static_cast<double>(res.unimodular_count) / static_cast<double>(res.total);
  if (options.keep_records) res.records = std::move(samples);
  return res;
}

}  // namespace periodrh::criteria
