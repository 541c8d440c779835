#include "periodrh/cli.hpp"

#include "periodrh/errors.hpp"
#include "periodrh/periodpoly.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace periodrh::cli {

namespace fs = std::filesystem;
namespace mp = boost::multiprecision;

namespace {

std::string dec(const Real& x, int digits) { return periodrh::to_string(x, digits); }

json complex_json(const Complex& z, int digits) { return {{"re", dec(z.re, digits)}, {"im", dec(z.im, digits)}}; }

json real_array(std::span<const Real> xs, int digits, std::size_t from = 0) {
  json a = json::array();
  for (std::size_t i = from; i < xs.size(); ++i) a.push_back(dec(xs[i], digits));
  return a;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  f << data;
  if (!f) throw std::ios_base::failure("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------- serializers

json zero_report_json(const zeros::ZeroReport& rep, int digits) {
  json roots = json::array();
  for (std::size_t i = 0; i < rep.roots.size(); ++i)
    roots.push_back({{"re", dec(rep.roots[i].re, digits)},
                     {"im", dec(rep.roots[i].im, digits)},
                     {"abs", dec(rep.roots[i].abs(), digits)},
                     {"residual", dec(rep.residuals[i], 6)}});
  json j = {{"degree", rep.degree},
            {"verdict", zeros::to_string(rep.verdict)},
            {"tolerance", rep.tolerance},
            {"reliable", rep.reliable},
            {"precision", rep.precision},
            {"max_circle_distance", dec(rep.max_circle_distance, 6)},
            {"max_disk_excess", dec(rep.max_disk_excess, 6)},
            {"max_abs", dec(rep.max_abs, 20)},
            {"scale_exponent", rep.scale_exponent},
            {"stripped_leading", rep.stripped_leading},
            {"zero_roots", rep.zero_roots},
            {"seed", rep.seed},
            {"method", rep.method},
            {"iterations", rep.iterations},
            {"roots", roots}};
  j["cohn_check"] = rep.cohn_check ? json(*rep.cohn_check) : json(nullptr);
  return j;
}

std::string roots_csv(const zeros::ZeroReport& rep, int digits) {
  std::ostringstream os;
  os << "re,im,abs,residual\n";
  for (std::size_t i = 0; i < rep.roots.size(); ++i)
    os << dec(rep.roots[i].re, digits) << ',' << dec(rep.roots[i].im, digits) << ',' << dec(rep.roots[i].abs(), digits)
       << ',' << dec(rep.residuals[i], 6) << '\n';
  return os.str();
}

json polynomial_json(const periodpoly::PeriodPolynomial& p, int digits) {
  json coeffs = json::array();
  for (const auto& c : p.coeffs) coeffs.push_back(complex_json(c, digits));
  return {{"kind", periodpoly::to_string(p.kind)}, {"k", p.k},         {"degree", p.degree},
          {"precision", p.precision},            {"coeffs", coeffs}, {"degenerate_leading", p.degenerate_leading}};
}

json lvalues_json(const lfunctions::CriticalLValues& v, int digits) {
  const auto fe = lfunctions::verify_functional_equation(v);
  return {{"k", v.k},
          {"epsilon", v.epsilon},
          {"lambda", real_array(v.lambda, digits, 1)},
          {"L", real_array(v.l, digits, 1)},
          {"trunc_bound", dec(v.trunc_bound, 6)},
          {"c_upper", dec(v.c_upper, 20)},
          {"unverified_tail", v.unverified_tail},
          {"precision", v.precision},
          {"working_precision", v.working_precision},
          {"n_terms", v.n_terms},
          {"functional_equation",
           {{"lambda_residual", dec(fe.lambda_residual, 6)}, {"l_identity_residual", dec(fe.l_identity_residual, 6)}}}};
}

json criterion_json(const criteria::CriterionReport& r) {
  json j = {{"k", r.k},
            {"N", r.N},
            {"c_lower", dec(r.c_lower, 20)},
            {"c_upper_source", r.c_upper_source},
            {"alpha", dec(r.alpha, 30)},
            {"beta", dec(r.beta, 30)},
            {"gamma", dec(r.gamma, 30)},
            {"delta", dec(r.delta, 30)},
            {"lhs", dec(r.lhs, 30)},
            {"rhs", dec(r.rhs, 30)},
            {"key_inequality_holds", r.key_inequality_holds},
            {"h_condition_holds", r.h_condition_holds},
            {"overall", criteria::to_string(r.overall)},
            {"reason", r.reason}};
  j["c_upper"] = r.c_upper ? json(dec(*r.c_upper, 30)) : json(nullptr);
  j["direct_verdict"] = r.direct_verdict ? json(zeros::to_string(*r.direct_verdict)) : json(nullptr);
  j["direct_max_circle_distance"] = r.direct_max_circle_distance ? json(dec(*r.direct_max_circle_distance, 6)) : json(nullptr);
  return j;
}

json ubound_json(const criteria::UBoundReport& r) {
  return {{"k", r.k},
          {"u", dec(r.u, 30)},
          {"u_star", dec(r.u_star, 30)},
          {"sum_abs", dec(r.sum_abs, 30)},
          {"abs_sum", dec(r.abs_sum, 30)},
          {"c_plus", dec(r.c_plus, 30)},
          {"c_minus", dec(r.c_minus, 30)},
          {"ineq_holds", r.ineq_holds},
          {"pm_condition_holds", r.pm_condition_holds},
          {"below_threshold", r.below_threshold}};
}

std::string vector_string(const std::vector<long>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

json scan_json(const criteria::ScanResult& r) {
  json j = {{"k", r.k},
            {"X", r.X},
            {"mode", r.mode},
            {"samples", r.samples},
            {"seed", r.seed},
            {"precision", r.precision},
            {"total", r.total},
            {"unimodular_count", r.unimodular_count},
            {"zero_sum_count", r.zero_sum_count},
            {"zero_sum_unimodular", r.zero_sum_unimodular},
            {"nonnegative_count", r.nonnegative_count},
            {"nonnegative_unimodular", r.nonnegative_unimodular},
            {"unreliable_count", r.unreliable_count},
            {"criterion_pass_count", r.criterion_pass_count},
            {"ubound_pass_count", r.ubound_pass_count},
            {"soundness_violations", r.soundness_violations},
            {"p_hat", r.p_hat},
            {"p_hat_value", r.p_hat_value}};
  if (!r.records.empty()) {
    json recs = json::array();
    for (const auto& s : r.records)
      recs.push_back({{"vector", s.coeffs},
                      {"N", s.N},
                      {"verdict", zeros::to_string(s.verdict)},
                      {"max_circle_distance", dec(s.max_circle_distance, 6)},
                      {"reliable", s.reliable},
                      {"criterion_pass", s.criterion_pass},
                      {"ubound_pass", s.ubound_pass}});
    j["records"] = recs;
  }
  return j;
}

std::string scan_csv(const criteria::ScanResult& r) {
  std::ostringstream os;
  os << "vector,N,verdict,max_circle_distance\n";
  for (const auto& s : r.records)
    os << vector_string(s.coeffs) << ',' << s.N << ',' << zeros::to_string(s.verdict) << ','
       << dec(s.max_circle_distance, 6) << '\n';
  return os.str();
}

// ------------------------------------------------------------------ targets

struct Target {
  std::string label;
  modforms::CuspForm form;
  lfunctions::CriticalLValues values;
};

std::vector<Real> parse_reals(const std::vector<std::string>& parts, int digits) {
  PrecisionGuard guard(digits);
  std::vector<Real> out;
  for (const auto& s : parts) {
    try {
      out.push_back(from_string(s));
    } catch (const std::exception&) {
      throw InvalidArgument("not a number: '" + s + "'");
    }
  }
  return out;
}

std::vector<Target> targets(const criteria::EigenTables& t, const std::vector<std::string>& combo, int form_index) {
  const int P = t.precision;
  std::vector<Target> out;
  if (!combo.empty()) {
    if (form_index >= 0) throw InvalidArgument("--combo and --form are exclusive");
    if (combo.size() != t.values.size())
      throw InvalidArgument("--combo needs " + std::to_string(t.values.size()) + " coefficients (dim S_k)");
    const auto a = parse_reals(combo, P + kGuardDigits);
    auto f = modforms::linear_combination(std::span<const modforms::CuspForm>(t.basis.forms), std::span<const Real>(a), P);
    auto v = lfunctions::combine(std::span<const lfunctions::CriticalLValues>(t.values), std::span<const Real>(a),
                                 f.leading_value);
    out.push_back({"combination", std::move(f), std::move(v)});
    return out;
  }
  const int r = static_cast<int>(t.values.size());
  if (form_index >= r) throw InvalidArgument("--form must be below dim S_k = " + std::to_string(r));
  for (int i = 0; i < r; ++i)
    if (form_index < 0 || i == form_index)
      out.push_back({"eigenform " + std::to_string(i), t.basis.forms[static_cast<std::size_t>(i)],
                     t.values[static_cast<std::size_t>(i)]});
  return out;
}

periodpoly::PeriodPolynomial make_period(const lfunctions::CriticalLValues& v, const std::string& kind) {
  if (kind == "r") return periodpoly::period_polynomial_r(v);
  if (kind == "p") return periodpoly::modified_polynomial_p(v);
  if (kind == "q") return periodpoly::half_polynomial_q(v);
  throw InvalidArgument("--kind must be r, p or q");
}

zeros::ZeroReport roots_of(const periodpoly::PeriodPolynomial& poly, const RunConfig& cfg, int P) {
  if (poly.kind == periodpoly::Kind::r)
    return zeros::unimodularity_report(std::span<const Complex>(poly.coeffs), cfg.tolerance, P, cfg.seed);
  return zeros::unimodularity_report(std::span<const Real>(poly.real_coeffs()), cfg.tolerance, P, cfg.seed);
}

void check_weight_arg(int k) {
  if (k < 12 || k % 2 != 0) throw InvalidArgument("k must be even and at least 12");
  if (modforms::dim_cusp_forms(k) == 0) throw InvalidArgument("S_" + std::to_string(k) + " is zero-dimensional");
}

// --------------------------------------------------------------- commands

Report cmd_eigenforms(int k, int terms, const RunConfig& cfg) {
  check_weight_arg(k);
  const auto t = load_tables(k, cfg);
  const auto& s = t.basis.system;
  json forms = json::array();
  for (std::size_t i = 0; i < t.basis.forms.size(); ++i) {
    const auto& f = t.basis.forms[i];
    std::vector<Real> head(f.coeffs.begin() + 1, f.coeffs.begin() + 1 + std::min(terms, f.n_max()));
    forms.push_back({{"index", i},
                     {"t2_eigenvalue", dec(s.eigenvalues[i], t.precision)},
                     {"coefficients", real_array(head, t.precision)},
                     {"n_max", f.n_max()},
                     {"epsilon", t.values[i].epsilon}});
  }
  json charpoly = json::array();
  for (const auto& c : s.t2_charpoly) charpoly.push_back(c.get_str());
  json result = {{"k", k},
                 {"r", s.r},
                 {"precision", t.precision},
                 {"working_precision", s.working_precision},
                 {"t2_charpoly", charpoly},
                 {"residual", dec(s.residual, 6)},
                 {"min_separation", dec(s.min_separation, 20)},
                 {"forms", forms}};
  return {"eigenforms", "eigenforms-k" + std::to_string(k), result, std::nullopt, t.precision};
}

Report cmd_lvalues(int k, const std::vector<std::string>& combo, int form, const RunConfig& cfg) {
  check_weight_arg(k);
  const auto t = load_tables(k, cfg);
  json items = json::array();
  std::ostringstream csv;
  csv << "form,s,lambda,L\n";
  for (const auto& tg : targets(t, combo, form)) {
    json j = lvalues_json(tg.values, t.precision);
    j["form"] = tg.label;
    items.push_back(j);
    for (int s = 1; s < k; ++s)
      csv << tg.label << ',' << s << ',' << dec(tg.values.lambda_at(s), t.precision) << ','
          << dec(tg.values.l_at(s), t.precision) << '\n';
  }
  return {"lvalues", "lvalues-k" + std::to_string(k), {{"k", k}, {"items", items}}, csv.str(), t.precision};
}

Report cmd_period(int k, const std::string& kind, const std::vector<std::string>& combo, int form, const RunConfig& cfg) {
  check_weight_arg(k);
  const auto t = load_tables(k, cfg);
  json items = json::array();
  std::ostringstream csv;
  csv << "form,n,re,im\n";
  for (const auto& tg : targets(t, combo, form)) {
    const auto poly = make_period(tg.values, kind);
    json j = polynomial_json(poly, t.precision);
    j["form"] = tg.label;
    if (poly.kind == periodpoly::Kind::p) j["self_reciprocity_residual"] = dec(periodpoly::self_reciprocity_residual(poly), 6);
    items.push_back(j);
    for (std::size_t n = 0; n < poly.coeffs.size(); ++n)
      csv << tg.label << ',' << n << ',' << dec(poly.coeffs[n].re, t.precision) << ',' << dec(poly.coeffs[n].im, t.precision)
          << '\n';
  }
  return {"period", "period-" + kind + "-k" + std::to_string(k), {{"k", k}, {"kind", kind}, {"items", items}}, csv.str(), t.precision};
}

std::vector<Complex> read_poly_file(const fs::path& path, int digits) {
  std::ifstream f(path);
  if (!f) throw std::ios_base::failure("cannot open " + path.string());
  PrecisionGuard guard(digits);
  std::vector<Complex> coeffs;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    std::vector<std::string> parts;
    for (std::string tok; is >> tok;) parts.push_back(tok);
    if (parts.empty()) continue;
    if (parts.size() > 2) throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected 're' or 're im'");
    const auto v = parse_reals(parts, digits);
    coeffs.push_back(v.size() == 2 ? Complex(v[0], v[1]) : Complex(v[0]));
  }
  if (coeffs.empty()) throw InvalidArgument(path.string() + ": no coefficients");
  return coeffs;
}

Report cmd_zeros(const std::string& file, int from_period, const std::string& kind, const std::vector<std::string>& combo,
                 int form, const RunConfig& cfg) {
  if (file.empty() == (from_period == 0)) throw InvalidArgument("zeros needs exactly one of <poly-file> or --from-period k");
  if (!file.empty()) {
    const int P = cfg.precision > 0 ? cfg.precision : 64;
    const auto coeffs = read_poly_file(file, P + kGuardDigits);
    const auto rep = zeros::unimodularity_report(std::span<const Complex>(coeffs), cfg.tolerance, P, cfg.seed);
    json result = zero_report_json(rep, P);
    result["source"] = fs::path(file).filename().string();
    return {"zeros", "zeros-" + fs::path(file).stem().string(), result, roots_csv(rep, P), P};
  }
  check_weight_arg(from_period);
  const auto t = load_tables(from_period, cfg);
  auto tgs = targets(t, combo, form);
  if (tgs.size() != 1) throw InvalidArgument("zeros --from-period needs --form i or --combo when dim S_k > 1");
  const auto poly = make_period(tgs[0].values, kind);
  const auto rep = roots_of(poly, cfg, t.precision);
  json result = zero_report_json(rep, t.precision);
  result["source"] = kind + "_f, k = " + std::to_string(from_period) + ", " + tgs[0].label;
  return {"zeros", "zeros-" + kind + "-k" + std::to_string(from_period), result, roots_csv(rep, t.precision), t.precision};
}

Report cmd_criterion(int k, const std::vector<std::string>& combo, int form, const RunConfig& cfg) {
  check_weight_arg(k);
  const auto t = load_tables(k, cfg);
  json items = json::array();
  for (const auto& tg : targets(t, combo, form)) {
    auto rep = criteria::main_criterion(tg.form);
    const auto p = periodpoly::modified_polynomial_p(tg.values);
    criteria::attach_direct_check(rep, roots_of(p, cfg, t.precision));
    json j = criterion_json(rep);
    j["form"] = tg.label;
    items.push_back(j);
  }
  return {"criterion", "criterion-k" + std::to_string(k), {{"k", k}, {"items", items}}, std::nullopt, t.precision};
}

Report cmd_ubound(int k, const std::vector<std::string>& combo, const RunConfig& cfg) {
  if (k < 12 || k % 2 != 0) throw InvalidArgument("k must be even and at least 12");
  if (combo.empty()) throw InvalidArgument("ubound needs --combo");
  const auto a = parse_reals(combo, 70);
  const auto rep = criteria::u_bound_check(std::span<const Real>(a), k);
  (void)cfg;
  return {"ubound", "ubound-k" + std::to_string(k), ubound_json(rep), std::nullopt, 50};
}

Report cmd_hpoly(int m, int N, int samples, const RunConfig& cfg) {
  if (m < 1 || N < 1) throw InvalidArgument("hpoly needs m >= 1 and N >= 1");
  const int P = cfg.precision > 0 ? cfg.precision : std::max(64, m);
  const auto te = zeros::truncated_exp(m, N, P);
  const auto rep = zeros::unimodularity_report(std::span<const Real>(te.h_coeffs), cfg.tolerance, P, cfg.seed);
  const auto crit = zeros::h_disk_criterion(m, N, P);
  json result = {{"m", m},
                 {"N", N},
                 {"roots", zero_report_json(rep, P)},
                 {"verdict", zeros::to_string(rep.verdict)},
                 {"criterion",
                  {{"holds", crit.holds},
                   {"basis", crit.basis},
                   {"eq_h2_holds", crit.eq_h2_holds},
                   {"order_within_bound", crit.order_within_bound},
                   {"lower_bound", dec(crit.lower_bound, 20)}}}};
  if (samples > 0) {
    const auto s = zeros::sample_t_lower_bound(m, N, samples, cfg.seed, P);
    result["t_sample"] = {{"minimum", dec(s.minimum, 20)},
                          {"argmin", complex_json(s.argmin, 20)},
                          {"n_samples", s.n_samples},
                          {"seed", s.seed},
                          {"lower_bound", dec(zeros::t_lower_bound(m, N, P), 20)}};
  }
  return {"hpoly", "hpoly-m" + std::to_string(m) + "-N" + std::to_string(N), result, roots_csv(rep, P), P};
}

Report cmd_scan(int k, int X, bool exhaustive, std::uint64_t samples, bool records, const RunConfig& cfg) {
  check_weight_arg(k);
  if (X < 1) throw InvalidArgument("X must be at least 1");
  if (exhaustive == (samples > 0)) throw InvalidArgument("scan needs exactly one of --exhaustive or --samples n");
  const auto t = load_tables(k, cfg);
  criteria::ScanOptions opt;
  opt.exhaustive = exhaustive;
  opt.samples = samples;
  opt.seed = cfg.seed;
  opt.budget = cfg.budget;
  opt.threads = cfg.threads;
  opt.keep_records = records || cfg.output != OutputMode::json;
  opt.classify.tolerance = cfg.tolerance;
  const auto res = criteria::probability_scan(t, X, opt);
  json result = scan_json(res);
  if (!records) result.erase("records");
  return {"scan", "scan-k" + std::to_string(k) + "-X" + std::to_string(X), result, scan_csv(res), t.precision};
}

Report cmd_zeta(int k, const std::vector<std::string>& combo, int form, const RunConfig& cfg) {
  check_weight_arg(k);
  const auto t = load_tables(k, cfg);
  json items = json::array();
  for (const auto& tg : targets(t, combo, form)) {
    const auto p = periodpoly::modified_polynomial_p(tg.values);
    const auto z = periodpoly::rv_transform(std::span<const Real>(p.real_coeffs()), t.precision, "p_f " + tg.label);
    const auto c = periodpoly::zeta_checks(z, t.precision, cfg.seed);
    items.push_back({{"form", tg.label},
                     {"degree", z.degree},
                     {"sign", z.sign},
                     {"coeffs", real_array(z.coeffs, t.precision)},
                     {"functional_equation_residual", dec(c.functional_equation_residual, 6)},
                     {"max_critical_line_distance", dec(c.max_critical_line_distance, 6)},
                     {"roots", c.roots},
                     {"reliable", c.reliable}});
  }
  return {"zeta", "zeta-k" + std::to_string(k), {{"k", k}, {"items", items}}, std::nullopt, t.precision};
}

Report cmd_report(int k, const RunConfig& cfg) {
  check_weight_arg(k);
  const auto t = load_tables(k, cfg);
  const int P = t.precision;
  json forms = json::array();
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const auto& v = t.values[i];
    const auto fe = lfunctions::verify_functional_equation(v);
    const auto p = periodpoly::modified_polynomial_p(v);
    const auto q = periodpoly::half_polynomial_q(v);
    const auto rp = roots_of(p, cfg, P);
    const auto rq = roots_of(q, cfg, P);
    auto crit = criteria::main_criterion(t.basis.forms[i]);
    criteria::attach_direct_check(crit, rp);
    json item = {{"index", i},
                 {"t2_eigenvalue", dec(t.basis.system.eigenvalues[i], 30)},
                 {"epsilon", v.epsilon},
                 {"lambda_residual", dec(fe.lambda_residual, 6)},
                 {"l_identity_residual", dec(fe.l_identity_residual, 6)},
                 {"self_reciprocity_residual", dec(periodpoly::self_reciprocity_residual(p), 6)},
                 {"reconstruct_residual", dec(periodpoly::reconstruct_p_from_q(q, p), 6)},
                 {"period_verdict", zeros::to_string(rp.verdict)},
                 {"period_max_circle_distance", dec(rp.max_circle_distance, 6)},
                 {"q_verdict", zeros::to_string(rq.verdict)},
                 {"criterion", criterion_json(crit)}};
    try {
      const auto z = periodpoly::rv_transform(std::span<const Real>(p.real_coeffs()), P);
      const auto c = periodpoly::zeta_checks(z, P, cfg.seed);
      item["zeta"] = {{"functional_equation_residual", dec(c.functional_equation_residual, 6)},
                      {"max_critical_line_distance", dec(c.max_critical_line_distance, 6)}};
    } catch (const InvalidArgument& e) {
      item["zeta"] = {{"undefined", e.what()}};
    }
    forms.push_back(item);
  }
  json result = {{"k", k},
                 {"r", t.values.size()},
                 {"precision", P},
                 {"eigen_residual", dec(t.basis.system.residual, 6)},
                 {"positive_combination_check", criteria::positive_combination_check(k)},
                 {"forms", forms}};
  return {"report", "report-k" + std::to_string(k), result, std::nullopt, P};
}

// -------------------------------------------------------------- cache codec

int digits_of(std::span<const Real> xs) {
  unsigned p = 0;
  for (const auto& x : xs) p = std::max(p, x.precision());
  return static_cast<int>(p);
}

json real_block(std::span<const Real> xs) {
  const int d = digits_of(xs);
  json vals = json::array();
  // Extra digits make the decimal form round-trip exactly at `d` digits.
  for (const auto& x : xs) vals.push_back(dec(x, d + 5));
  return {{"digits", d}, {"values", vals}};
}

std::vector<Real> read_block(const json& j) {
  PrecisionGuard guard(j.at("digits").get<int>());
  std::vector<Real> out;
  for (const auto& s : j.at("values")) out.push_back(from_string(s.get<std::string>()));
  return out;
}

Real read_one(const json& j) { return read_block(j).at(0); }
json one_block(const Real& x) { return real_block(std::span<const Real>(&x, 1)); }

}  // namespace

// ------------------------------------------------------------------ config

void validate(const RunConfig& c) {
  if (c.precision != 0 && c.precision < 32) throw InvalidArgument("--precision must be at least 32");
  if (!(c.tolerance > 0 && c.tolerance < 1e-4)) throw InvalidArgument("--tolerance must lie in (0, 1e-4)");
  if (c.budget < 1) throw InvalidArgument("--budget must be at least 1");
  if (c.threads < 1) throw InvalidArgument("--threads must be at least 1");
}

fs::path default_cache_dir() {
  if (const char* env = std::getenv(kCacheEnv); env != nullptr && *env != '\0') return env;
  if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0') return fs::path(home) / ".cache" / "periodrh";
  return fs::path(".periodrh-cache");
}

fs::path cache_path(const fs::path& cache_dir, int k, int precision) {
  return cache_dir / std::to_string(k) / std::to_string(precision) / ("tables-v" + std::to_string(kCacheVersion) + ".json");
}

json tables_to_json(const criteria::EigenTables& t) {
  const auto& s = t.basis.system;
  json matrix = json::array();
  for (const auto& row : s.t2_matrix) {
    json r = json::array();
    for (const auto& x : row) r.push_back(x.get_str());
    matrix.push_back(r);
  }
  json charpoly = json::array();
  for (const auto& c : s.t2_charpoly) charpoly.push_back(c.get_str());
  json vectors = json::array();
  for (const auto& v : s.eigenvectors) vectors.push_back(real_block(v));
  json forms = json::array();
  for (const auto& f : t.basis.forms)
    forms.push_back({{"k", f.k},
                     {"N", f.N},
                     {"precision", f.precision},
                     {"index", f.provenance.index},
                     {"label", f.provenance.label},
                     {"leading_value", one_block(f.leading_value)},
                     {"coeffs", real_block(f.coeffs)}});
  json values = json::array();
  for (const auto& v : t.values)
    values.push_back({{"k", v.k},
                      {"epsilon", v.epsilon},
                      {"lambda", real_block(v.lambda)},
                      {"l", real_block(v.l)},
                      {"trunc_bound", one_block(v.trunc_bound)},
                      {"c_upper", one_block(v.c_upper)},
                      {"unverified_tail", v.unverified_tail},
                      {"precision", v.precision},
                      {"working_precision", v.working_precision},
                      {"n_terms", v.n_terms}});
  return {{"cache_version", kCacheVersion},
          {"k", t.k},
          {"precision", t.precision},
          {"system",
           {{"k", s.k},
            {"r", s.r},
            {"precision", s.precision},
            {"working_precision", s.working_precision},
            {"t2_matrix", matrix},
            {"t2_charpoly", charpoly},
            {"eigenvalues", real_block(s.eigenvalues)},
            {"eigenvectors", vectors},
            {"residual", one_block(s.residual)},
            {"min_separation", one_block(s.min_separation)}}},
          {"forms", forms},
          {"values", values}};
}

criteria::EigenTables tables_from_json(const json& j) {
  if (j.at("cache_version").get<int>() != kCacheVersion) throw InvalidArgument("cache version mismatch");
  criteria::EigenTables t;
  t.k = j.at("k").get<int>();
  t.precision = j.at("precision").get<int>();
  const auto& js = j.at("system");
  auto& s = t.basis.system;
  s.k = js.at("k").get<int>();
  s.r = js.at("r").get<int>();
  s.precision = js.at("precision").get<int>();
  s.working_precision = js.at("working_precision").get<int>();
  for (const auto& row : js.at("t2_matrix")) {
    std::vector<modforms::Integer> r;
    for (const auto& x : row) r.emplace_back(x.get<std::string>());
    s.t2_matrix.push_back(std::move(r));
  }
  for (const auto& c : js.at("t2_charpoly")) s.t2_charpoly.emplace_back(c.get<std::string>());
  s.eigenvalues = read_block(js.at("eigenvalues"));
  for (const auto& v : js.at("eigenvectors")) s.eigenvectors.push_back(read_block(v));
  s.residual = read_one(js.at("residual"));
  s.min_separation = read_one(js.at("min_separation"));
  for (const auto& jf : j.at("forms")) {
    modforms::CuspForm f;
    f.k = jf.at("k").get<int>();
    f.N = jf.at("N").get<int>();
    f.precision = jf.at("precision").get<int>();
    f.provenance.kind = modforms::Provenance::Kind::eigenform;
    f.provenance.index = jf.at("index").get<int>();
    f.provenance.label = jf.at("label").get<std::string>();
    f.leading_value = read_one(jf.at("leading_value"));
    f.coeffs = read_block(jf.at("coeffs"));
    t.basis.forms.push_back(std::move(f));
  }
  for (const auto& jv : j.at("values")) {
    lfunctions::CriticalLValues v;
    v.k = jv.at("k").get<int>();
    v.epsilon = jv.at("epsilon").get<int>();
    v.lambda = read_block(jv.at("lambda"));
    v.l = read_block(jv.at("l"));
    v.trunc_bound = read_one(jv.at("trunc_bound"));
    v.c_upper = read_one(jv.at("c_upper"));
    v.unverified_tail = jv.at("unverified_tail").get<bool>();
    v.precision = jv.at("precision").get<int>();
    v.working_precision = jv.at("working_precision").get<int>();
    v.n_terms = jv.at("n_terms").get<int>();
    t.values.push_back(std::move(v));
  }
  if (t.basis.forms.size() != t.values.size() || static_cast<int>(t.values.size()) != s.r)
    throw InvalidArgument("cache file is inconsistent");
  return t;
}

criteria::EigenTables load_tables(int k, const RunConfig& config) {
  const int P = config.precision_for(k);
  const fs::path path = cache_path(config.cache_dir.empty() ? default_cache_dir() : config.cache_dir, k, P);
  if (config.use_cache && fs::exists(path)) {
    try {
      auto t = tables_from_json(json::parse(read_file(path)));
      if (t.k == k && t.precision == P) return t;
    } catch (const std::exception&) {
      // Unreadable or stale entry: rebuild and overwrite below.
    }
  }
  auto t = criteria::build_tables(k, P);
  if (config.use_cache) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp" + std::to_string(::getpid());
    write_file(tmp, tables_to_json(t).dump());
    fs::rename(tmp, path);
  }
  return t;
}

// ------------------------------------------------------------------ output

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalError("sha256: digest failed");
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string content_digest(const json& doc) {
  json copy = doc;
  if (copy.contains("metadata")) copy["metadata"].erase("timestamp");
  copy.erase("digests");
  return sha256_hex(copy.dump(2));
}

json document(const Report& report, const RunConfig& config, const std::optional<std::string>& csv_digest) {
  json meta = {{"tool", "periodrh"},
               {"tool_version", kToolVersion},
               {"command", report.command},
               {"precision", report.precision},
               {"tolerance", config.tolerance},
               {"seed", config.seed},
               {"timestamp", timestamp_utc()}};
  json doc = {{"schema_version", kSchemaVersion}, {"metadata", meta}, {"result", report.result}};
  json digests = {{"content_sha256", content_digest(doc)}};
  if (csv_digest) digests["csv_sha256"] = *csv_digest;
  doc["digests"] = digests;
  return doc;
}

std::vector<fs::path> emit_report(const Report& report, const RunConfig& config, std::ostream& out) {
  std::vector<fs::path> written;
  const bool want_csv = config.output != OutputMode::json;
  if (want_csv && !report.csv) throw InvalidArgument("csv output is not available for '" + report.command + "'");
  if (config.output == OutputMode::both && config.out_dir.empty()) throw InvalidArgument("--output both needs --out-dir");

  std::optional<std::string> csv_digest;
  if (want_csv) csv_digest = sha256_hex(*report.csv);
  const json doc = document(report, config, config.output == OutputMode::both ? csv_digest : std::nullopt);
  const std::string json_text = doc.dump(2) + "\n";

  if (config.out_dir.empty()) {
    out << (config.output == OutputMode::csv ? *report.csv : json_text);
    return written;
  }
  fs::create_directories(config.out_dir);
  const std::string stem = config.content_addressed
                               ? report.stem + "-" + doc["digests"]["content_sha256"].get<std::string>().substr(0, 16)
                               : report.stem;
  if (config.output != OutputMode::csv) {
    written.push_back(config.out_dir / (stem + ".json"));
    write_file(written.back(), json_text);
  }
  if (want_csv) {
    written.push_back(config.out_dir / (stem + ".csv"));
    write_file(written.back(), *report.csv);
  }
  for (const auto& p : written) out << p.string() << "\n";
  return written;
}

// ---------------------------------------------------------------- dispatch

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Period polynomials of level-1 cusp forms and their unimodularity", "periodrh"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string output = "json";
  std::string cache_dir;
  app.add_option("--precision", cfg.precision, "Decimal digits (default max(64, 2k))");
  app.add_option("--tolerance", cfg.tolerance, "Verdict tolerance on ||root| - 1|");
  app.add_option("--cache-dir", cache_dir, std::string("Cache directory (default $") + kCacheEnv + " or ~/.cache/periodrh)");
  app.add_flag("--no-cache", "Recompute without reading or writing the cache");
  app.add_option("--seed", cfg.seed, "Seed for root finding and sampling");
  app.add_option("--budget", cfg.budget, "Largest exhaustive enumeration");
  app.add_option("--output", output, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
  std::string out_dir;
  app.add_option("--out-dir", out_dir, "Write files here instead of standard output");
  app.add_flag("--content-addressed", cfg.content_addressed, "Name files by content digest");
  app.add_option("--threads", cfg.threads, "Worker cap for scans");

  int k = 0;
  int form = -1;
  std::string combo_text;
  std::string kind = "r";

  auto add_combo = [&](CLI::App* sub) { sub->add_option("--combo", combo_text, "Coefficients c1,c2,... over the eigenbasis"); };
  auto add_form = [&](CLI::App* sub) { sub->add_option("--form", form, "Eigenform index"); };

  int terms = 10;
  auto* eig = app.add_subcommand("eigenforms", "Normalized Hecke eigenbasis of S_k");
  eig->add_option("k", k)->required();
  eig->add_option("--terms", terms, "Coefficients to print per form");

  auto* lval = app.add_subcommand("lvalues", "Critical values of Lambda and L");
  lval->add_option("k", k)->required();
  add_combo(lval);
  add_form(lval);

  auto* per = app.add_subcommand("period", "Period polynomial coefficients");
  per->add_option("k", k)->required();
  per->add_option("--kind", kind, "r, p or q")->check(CLI::IsMember({"r", "p", "q"}));
  add_combo(per);
  add_form(per);

  std::string poly_file;
  int from_period = 0;
  auto* zer = app.add_subcommand("zeros", "Roots and unimodularity verdict");
  zer->add_option("poly-file", poly_file, "Ascending coefficients, one 're' or 're im' per line");
  zer->add_option("--from-period", from_period, "Use the period polynomial of weight k");
  zer->add_option("--kind", kind, "r, p or q")->check(CLI::IsMember({"r", "p", "q"}));
  add_combo(zer);
  add_form(zer);

  auto* crit = app.add_subcommand("criterion", "Sufficient criterion with the direct check attached");
  crit->add_option("k", k)->required();
  add_combo(crit);
  add_form(crit);

  auto* ub = app.add_subcommand("ubound", "U-bound inequality for a coefficient vector");
  ub->add_option("k", k)->required();
  ub->add_option("--combo", combo_text, "Coefficients c1,c2,...")->required();

  int m = 0;
  int N = 0;
  int t_samples = 0;
  auto* hp = app.add_subcommand("hpoly", "Truncated exponential H_{m,N}: roots and disk criterion");
  hp->add_option("m", m)->required();
  hp->add_option("N", N)->required();
  hp->add_option("--samples", t_samples, "Seeded samples of |T_{m,N}| on the disk");

  int X = 0;
  bool exhaustive = false;
  std::uint64_t samples = 0;
  bool records = false;
  auto* sc = app.add_subcommand("scan", "Unimodular fraction over integer combinations in [-X, X]^r");
  sc->add_option("k", k)->required();
  sc->add_option("X", X)->required();
  auto* ex = sc->add_flag("--exhaustive", exhaustive, "Enumerate the whole box");
  sc->add_option("--samples", samples, "Monte Carlo sample count")->excludes(ex);
  sc->add_flag("--records", records, "Include per-sample records in the JSON");

  auto* zet = app.add_subcommand("zeta", "Zeta polynomial of p_f");
  zet->add_option("k", k)->required();
  add_combo(zet);
  add_form(zet);

  auto* rep = app.add_subcommand("report", "Full pipeline for one weight");
  rep->add_option("k", k)->required();

  std::vector<const char*> argv{"periodrh"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return invalid;
  }

  try {
    cfg.output = output == "csv" ? OutputMode::csv : output == "both" ? OutputMode::both : OutputMode::json;
    cfg.cache_dir = cache_dir;
    cfg.out_dir = out_dir;
    cfg.use_cache = app.count("--no-cache") == 0;
    validate(cfg);
    std::vector<std::string> combo;
    if (!combo_text.empty()) combo = CLI::detail::split(combo_text, ',');

    Report report;
    if (*eig) report = cmd_eigenforms(k, terms, cfg);
    else if (*lval) report = cmd_lvalues(k, combo, form, cfg);
    else if (*per) report = cmd_period(k, kind, combo, form, cfg);
    else if (*zer) report = cmd_zeros(poly_file, from_period, kind, combo, form, cfg);
    else if (*crit) report = cmd_criterion(k, combo, form, cfg);
    else if (*ub) report = cmd_ubound(k, combo, cfg);
    else if (*hp) report = cmd_hpoly(m, N, t_samples, cfg);
    else if (*sc) report = cmd_scan(k, X, exhaustive, samples, records, cfg);
    else if (*zet) report = cmd_zeta(k, combo, form, cfg);
    else report = cmd_report(k, cfg);
    emit_report(report, cfg, out);
    return ok;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return invalid;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return budget;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return numerical;
  } catch (const InsufficientPrecision& e) {
    err << "numerical failure: " << e.what() << "\n";
    return numerical;
  } catch (const std::ios_base::failure& e) {
    err << "i/o error: " << e.what() << "\n";
    return io_error;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return io_error;
  }
}

}  // namespace periodrh::cli
