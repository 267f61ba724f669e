// freud: command-line front end.
//
// Exit status: 0 success, 1 verification failure, 2 usage error,
// 3 numerical convergence failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "freud/store.hpp"

using namespace freud;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;
constexpr int kConvergence = 3;

struct Job {
  int m = 2;
  std::string t = "0";
  long n_max = 50;
  long bits = 0;
  double target = 1e-40;
  int max_escalations = 4;
  std::string out = "-";
  std::string cache_dir;
  bool no_cache = false;
  std::string format = "json";
  bool cross_check = false;
  std::string truncations = "full";
  std::string n_grid;
  std::string quantity = "beta";
  std::string which = "all";
  std::string perturb;
  std::string summary;
  std::string m_list = "2,3,4,5";
  std::string bits_list = "256,512";

  PrecisionContext ctx() const {
    PrecisionContext c;
    c.target_rel_error = target;
    if (bits > 0) c.working_bits = bits;
    c.max_escalations = max_escalations;
    c.validate();
    return c;
  }
  std::optional<Cache> cache() const {
    if (no_cache) return std::nullopt;
    std::string dir = cache_dir;
    if (dir.empty()) {
      if (const char* env = std::getenv("FREUD_CACHE_DIR")) dir = env;
    }
    if (dir.empty()) return std::nullopt;
    return Cache(dir);
  }
};

void emit(const Job& job, const std::string& content) {
  if (job.out.empty() || job.out == "-") {
    std::cout << content;
    std::cout.flush();
  } else {
    atomic_write(job.out, content);
  }
}

std::vector<long> parse_longs(const std::string& s, const char* what) {
  std::vector<long> out;
  if (s.empty()) throw UsageError(std::string(what) + " is empty");
  auto to_long = [&](const std::string& x) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(x, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != x.size()) throw UsageError(std::string(what) + ": not an integer: '" + x + "'");
    return v;
  };
  if (s.find(':') != std::string::npos) {
    std::vector<long> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(to_long(item));
    if (parts.size() != 3 || parts[2] <= 0 || parts[1] < parts[0]) {
      throw UsageError(std::string(what) + ": expected lo:hi:step, got '" + s + "'");
    }
    for (long n = parts[0]; n <= parts[1]; n += parts[2]) out.push_back(n);
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_long(item));
  return out;
}

// ---------------------------------------------------------------------------
// Tables, through the cache

ValidatedTables tables(const Job& job, int m, const std::string& t_text, long n_max) {
  auto ctx = job.ctx();
  Weight w(m, t_text);
  if (n_max < 1) throw UsageError("--n-max must be >= 1");
  CacheKey key;
  key.kind = "recurrence";
  key.m = m;
  key.t = t_text;
  key.n_max = n_max;
  key.working_bits = job.bits > 0 ? job.bits : precision_for(n_max, m, ctx);
  key.method = to_string(Method::stieltjes);
  key.target_rel_error = job.target;
  auto cache = job.cache();
  if (cache) {
    if (auto hit = cache->load(key)) {
      std::cerr << "cache hit " << key.hash() << "\n";
      return validated_from_json(*hit);
    }
  }
  Json j = to_json(validated_recurrence(w, n_max, ctx, Method::stieltjes, key.working_bits));
  if (cache) {
    cache->store(key, j);
    std::cerr << "cache store " << key.hash() << "\n";
  }
  // Always continue from the serialized form so cached and fresh runs see
  // the same numbers.
  return validated_from_json(j);
}

MomentTable moments(const Job& job, const Weight& w) {
  auto ctx = job.ctx();
  CacheKey key;
  key.kind = "moments";
  key.m = w.m();
  key.t = w.t_text();
  key.n_max = job.n_max;
  key.working_bits = job.bits > 0 ? job.bits : std::max(256L, ctx.target_bits() + 64);
  key.method = "gamma-series";
  key.target_rel_error = job.target;
  auto cache = job.cache();
  if (cache) {
    if (auto hit = cache->load(key)) {
      std::cerr << "cache hit " << key.hash() << "\n";
      return moments_from_json(*hit);
    }
  }
  Json j;
  {
    PrecisionScope scope(key.working_bits);
    j = to_json(moment_table(w, job.n_max, ctx));
  }
  if (cache) {
    cache->store(key, j);
    std::cerr << "cache store " << key.hash() << "\n";
  }
  return moments_from_json(j);
}

Real times_rel(const Real& x, const Real& rel) {
  PrecisionScope scope(64);
  return abs(x) * rel;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_moments(const Job& job) {
  Weight w(job.m, canonical_decimal(job.t));
  auto mu = moments(job, w);
  std::vector<Real> oracle_diff;
  bool ok = true;
  if (job.cross_check) {
    PrecisionScope scope(mu.bits());
    for (long k = 0; k <= mu.max_order(); ++k) {
      Real q = moment_quadrature_oracle(k, w, job.ctx());
      PrecisionScope s(64);
      oracle_diff.push_back(rel_diff(q, mu.even(k)));
      if (oracle_diff.back().to_double() > 10 * job.target) ok = false;
    }
  }
  if (job.format == "csv") {
    std::ostringstream os;
    os << "k,index,value,rel_err" << (job.cross_check ? ",oracle_rel_diff" : "") << "\n";
    for (long k = 0; k <= mu.max_order(); ++k) {
      const auto i = static_cast<std::size_t>(k);
      os << k << "," << 2 * k << "," << decimal(mu.even(k), times_rel(mu.even(k), mu.err_bounds()[i])) << ","
         << bound_decimal(mu.err_bounds()[i]);
      if (job.cross_check) os << "," << bound_decimal(oracle_diff[i]);
      os << "\n";
    }
    emit(job, os.str());
  } else {
    Json j = to_json(mu);
    if (job.cross_check) {
      Json c;
      c["tolerance"] = bound_decimal(static_cast<long double>(10 * job.target));
      c["pass"] = ok;
      Json d = Json::array();
      for (const auto& x : oracle_diff) d.push_back(bound_decimal(x));
      c["rel_diff"] = d;
      j["cross_check"] = c;
    }
    emit(job, j.dump(1) + "\n");
  }
  return ok ? kOk : kVerifyFailed;
}

int cmd_recurrence(const Job& job) {
  auto v = tables(job, job.m, canonical_decimal(job.t), job.n_max);
  const auto& rec = v.table;
  const long nh = std::min(rec.n_max, 80L);
  std::vector<Real> agree;
  {
    PrecisionScope scope(rec.bits);
    auto hk = recurrence_table_hankel(v.moments, nh);
    PrecisionScope s(64);
    for (long n = 0; n <= nh; ++n) agree.push_back(rel_diff(rec.beta[n], hk.beta[n]));
  }
  Real worst(0L);
  for (const auto& a : agree) worst = max(worst, a);
  const bool ok = worst.to_double() <= std::max(1e-20, 100 * job.target);

  if (job.format == "csv") {
    std::ostringstream os;
    os << "n,beta,lnh,p,lnD,agreement\n";
    for (long n = 0; n <= rec.n_max; ++n) {
      const auto i = static_cast<std::size_t>(n);
      os << n << "," << decimal(rec.beta[i], times_rel(rec.beta[i], rec.beta_err[i])) << ","
         << decimal(rec.lnh[i], rec.lnh_err[i]) << "," << decimal(rec.p[i], rec.p_err[i]) << ","
         << decimal(rec.lnD[i], rec.lnD_err[i]) << "," << (n <= nh ? bound_decimal(agree[i]) : "") << "\n";
    }
    emit(job, os.str());
  } else {
    Json j = to_json(rec);
    Json a = Json::array();
    for (const auto& x : agree) a.push_back(bound_decimal(x));
    j["hankel_agreement"] = a;
    j["hankel_agreement_max"] = bound_decimal(worst);
    j["hankel_pass"] = ok;
    emit(job, j.dump(1) + "\n");
  }
  return ok ? kOk : kVerifyFailed;
}

const std::vector<std::string>& validator_tags(int m) {
  static const std::vector<std::string> m2{"dpainleve1", "sum-rule", "p-identity", "p-difference", "ladder",
                                           "s1-s2prime", "volterra", "lnh-derivative", "dp-dt"};
  static const std::vector<std::string> m3{"dpainleve-hierarchy", "p-identity", "four-equalities", "ladder",
                                           "s1-s2prime", "volterra", "lnh-derivative", "dp-dt"};
  return m == 2 ? m2 : m3;
}

const std::set<std::string>& all_tags() {
  static const std::set<std::string> s = [] {
    std::set<std::string> out;
    for (int m : {2, 3}) out.insert(validator_tags(m).begin(), validator_tags(m).end());
    return out;
  }();
  return s;
}

int cmd_verify(const Job& job) {
  if (job.m != 2 && job.m != 3) throw UsageError("verify supports m = 2 or m = 3");
  std::vector<std::string> which;
  if (job.which == "all") {
    which = validator_tags(job.m);
  } else {
    std::stringstream ss(job.which);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!all_tags().count(item)) throw UsageError("unknown identity tag '" + item + "'");
      const auto& ok = validator_tags(job.m);
      if (std::find(ok.begin(), ok.end(), item) == ok.end()) {
        throw UsageError("identity '" + item + "' does not apply to m = " + std::to_string(job.m));
      }
      which.push_back(item);
    }
    if (which.empty()) throw UsageError("--which is empty");
  }
  std::optional<std::pair<long, double>> perturb;
  if (!job.perturb.empty()) {
    const auto colon = job.perturb.find(':');
    if (colon == std::string::npos) throw UsageError("--perturb-beta expects n:delta");
    try {
      perturb = std::make_pair(std::stol(job.perturb.substr(0, colon)), std::stod(job.perturb.substr(colon + 1)));
    } catch (const std::exception&) {
      throw UsageError("--perturb-beta expects n:delta, got '" + job.perturb + "'");
    }
  }

  const std::string t = canonical_decimal(job.t);
  auto v = tables(job, job.m, t, job.n_max);
  if (perturb) {
    if (perturb->first < 1 || perturb->first > v.table.n_max) throw UsageError("--perturb-beta index out of range");
    perturb_beta(v.table, perturb->first, perturb->second);
  }
  PrecisionScope scope(v.table.bits);
  const auto& rec = v.table;
  const auto& mu = v.moments;
  std::vector<long> fd_n;
  for (long n = 1; n <= std::min(20L, job.n_max - 1); ++n) fd_n.push_back(n);
  FdOptions fd;
  if (perturb) fd.perturb = perturb;

  std::vector<ResidualReport> reports;
  auto add = [&](ResidualReport r) { reports.push_back(std::move(r)); };
  for (const auto& tag : which) {
    if (tag == "dpainleve1") add(check_dpainleve1(rec));
    else if (tag == "sum-rule") add(check_sum_rule_m2(rec));
    else if (tag == "p-identity") add(job.m == 2 ? check_p_identity_m2(rec) : check_p_identity_m3(rec));
    else if (tag == "p-difference") add(check_p_difference_eq_m2(rec));
    else if (tag == "dpainleve-hierarchy") add(check_dpainleve_hierarchy_m3(rec));
    else if (tag == "four-equalities") for (auto& r : check_m3_four_equalities(rec, mu)) add(std::move(r));
    else if (tag == "ladder") add(check_ladder_closed_forms(rec, mu));
    else if (tag == "s1-s2prime") for (auto& r : check_S1_S2prime(rec, mu)) add(std::move(r));
    else if (tag == "volterra") add(check_volterra(rec.weight, fd_n, job.ctx(), fd));
    else if (tag == "lnh-derivative") add(check_lnh_derivative(rec.weight, fd_n, job.ctx(), fd));
    else if (tag == "dp-dt") add(check_dp_dt(rec.weight, fd_n, job.ctx(), fd));
  }
  bool pass = true;
  for (const auto& r : reports) pass = pass && r.pass;

  if (job.format == "csv") {
    std::ostringstream os;
    os << "name,n,residual,tolerance,pass\n";
    for (const auto& r : reports) {
      for (std::size_t i = 0; i < r.n.size(); ++i) {
        os << r.name << "," << r.n[i] << "," << bound_decimal(r.residuals[i]) << "," << bound_decimal(r.tolerance)
           << "," << (r.pass ? "true" : "false") << "\n";
      }
    }
    emit(job, os.str());
  } else {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "verify";
    j["m"] = job.m;
    j["t"] = t;
    j["n_max"] = job.n_max;
    j["bits"] = rec.bits;
    j["which"] = which;
    if (perturb) j["perturb_beta"] = {{"n", perturb->first}, {"delta", job.perturb.substr(job.perturb.find(':') + 1)}};
    j["pass"] = pass;
    Json a = Json::array();
    for (const auto& r : reports) a.push_back(to_json(r));
    j["reports"] = a;
    emit(job, j.dump(1) + "\n");
  }
  for (const auto& r : reports) {
    if (!r.pass) std::cerr << "FAILED " << r.name << " max residual " << bound_decimal(r.max_residual) << "\n";
  }
  return pass ? kOk : kVerifyFailed;
}

int cmd_asympt(const Job& job) {
  const Quantity q = parse_quantity(job.quantity);
  const auto grid = parse_longs(job.n_grid, "--n-grid");
  for (long n : grid) {
    if (n < 1) throw UsageError("--n-grid entries must be positive");
  }
  const std::string t = canonical_decimal(job.t);
  if (q == Quantity::lnD0 && t != "0") throw UsageError("lnD0 requires --t 0");
  PrecisionScope p0(256);
  AsymptoticExpansion e = q == Quantity::lnD0 ? lnD0_expansion(job.m, job.m <= 3)
                                              : expansion(q, job.m, Weight(job.m, t).t());
  std::vector<std::size_t> trunc;
  if (job.truncations == "full") {
    trunc.push_back(e.size());
  } else {
    for (long k : parse_longs(job.truncations, "--truncations")) {
      if (k < 0) throw UsageError("--truncations entries must be nonnegative");
      trunc.push_back(static_cast<std::size_t>(k));
    }
  }
  // Validate cheap arguments before building a table.
  if (grid.size() < 4) throw UsageError("--n-grid needs at least 4 points");
  for (auto k : trunc) {
    if (k > e.size()) throw UsageError("truncation " + std::to_string(k) + " exceeds the " + std::to_string(e.size()) + " printed terms");
  }
  const long top = *std::max_element(grid.begin(), grid.end());
  auto v = tables(job, job.m, t, top);
  PrecisionScope scope(v.table.bits);
  auto rep = compare(v.table, q == Quantity::lnD0 ? lnD0_expansion(job.m, job.m <= 3) : expansion(q, job.m, v.table.weight.t()),
                     grid, trunc);
  const auto exact_err = [&](std::size_t gi) -> Real {
    const auto n = static_cast<std::size_t>(rep.n_grid[gi]);
    const auto& r = v.table;
    switch (q) {
      case Quantity::beta: return times_rel(r.beta[n], r.beta_err[n]);
      case Quantity::p: return r.p_err[n];
      case Quantity::lnh: return r.lnh_err[n];
      default: return r.lnD_err[n];
    }
  };

  Json summary = to_json(rep);
  if (job.format == "csv") {
    std::ostringstream os;
    os << "n,exact";
    for (auto k : trunc) os << ",truncated_" << k;
    for (auto k : trunc) os << ",residual_" << k;
    os << "\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Real err = exact_err(i);
      os << grid[i] << "," << decimal(rep.exact[i], err);
      for (std::size_t k = 0; k < trunc.size(); ++k) os << "," << decimal(rep.truncated[k][i], err);
      for (std::size_t k = 0; k < trunc.size(); ++k) os << "," << decimal(rep.residuals[k][i], err);
      os << "\n";
    }
    emit(job, os.str());
    if (!job.summary.empty()) atomic_write(job.summary, summary.dump(1) + "\n");
  } else {
    Json rows = Json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Real err = exact_err(i);
      Json row;
      row["n"] = grid[i];
      row["exact"] = decimal(rep.exact[i], err);
      Json res = Json::array();
      for (std::size_t k = 0; k < trunc.size(); ++k) res.push_back(decimal(rep.residuals[k][i], err));
      row["residuals"] = res;
      rows.push_back(row);
    }
    summary["rows"] = rows;
    emit(job, summary.dump(1) + "\n");
  }
  return kOk;
}

int cmd_lemma(const Job& job, bool m_given) {
  std::vector<long> ms = m_given ? std::vector<long>{job.m} : parse_longs(job.m_list, "--m-list");
  const auto grid = parse_longs(job.n_grid.empty() ? "10,20,40" : job.n_grid, "--n-grid");
  for (long m : ms) {
    if (m < 2) throw DomainError("m = " + std::to_string(m) + " is not supported (m >= 2)");
  }
  bool pass = true;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "lemma";
  j["n_grid"] = grid;
  Json per_m = Json::array();
  std::ostringstream csv;
  csv << "m,n,exact,lemma,gap\n";
  const long top = *std::max_element(grid.begin(), grid.end());
  for (long m : ms) {
    auto v = tables(job, static_cast<int>(m), "0", top);
    PrecisionScope scope(v.table.bits);
    Json e;
    e["m"] = m;
    e["n2_coefficient"] = lemma_n2_coefficient(static_cast<int>(m)).str(30);
    e["constant"] = lemma_constant(static_cast<int>(m)).str(30);
    Json gaps = Json::array();
    bool monotone = true;
    Real prev;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto n = static_cast<std::size_t>(grid[i]);
      Real lemma = lnD0_expansion(static_cast<int>(m), grid[i], false);
      Real gap = v.table.lnD.at(n) - lemma;
      if (i > 0 && !(abs(gap) < abs(prev))) monotone = false;
      prev = gap;
      gaps.push_back({{"n", grid[i]}, {"gap", decimal(gap, v.table.lnD_err[n])}});
      csv << m << "," << grid[i] << "," << decimal(v.table.lnD[n], v.table.lnD_err[n]) << ","
          << lemma.str(30) << "," << decimal(gap, v.table.lnD_err[n]) << "\n";
    }
    e["gaps"] = gaps;
    e["gap_decreasing"] = monotone;
    pass = pass && monotone;
    if (m == 2 || m == 3) {
      auto c = lemma_consistency(static_cast<int>(m));
      e["consistency"] = to_json(c);
      pass = pass && c.ok;
    }
    per_m.push_back(e);
  }
  j["results"] = per_m;
  j["pass"] = pass;
  emit(job, job.format == "csv" ? csv.str() : j.dump(1) + "\n");
  return pass ? kOk : kVerifyFailed;
}

int cmd_demo_instability(const Job& job) {
  if (job.m != 2) throw UsageError("demo-instability supports m = 2 only");
  const std::string t = canonical_decimal(job.t);
  auto v = tables(job, 2, t, job.n_max);
  std::vector<InstabilityReport> runs;
  for (long b : parse_longs(job.bits_list, "--start-bits")) runs.push_back(demo_forward_instability(v.table, b));
  if (job.format == "csv") {
    std::ostringstream os;
    os << "n";
    for (const auto& r : runs) os << ",dev_" << r.start_bits;
    os << "\n";
    std::size_t rows = 0;
    for (const auto& r : runs) rows = std::max(rows, r.relative_deviation.size());
    for (std::size_t n = 0; n < rows; ++n) {
      os << n;
      for (const auto& r : runs) os << "," << (n < r.relative_deviation.size() ? bound_decimal(r.relative_deviation[n]) : "");
      os << "\n";
    }
    emit(job, os.str());
  } else {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "forward-instability";
    j["m"] = 2;
    j["t"] = t;
    j["exact_bits"] = v.table.bits;
    Json a = Json::array();
    for (const auto& r : runs) a.push_back(to_json(r));
    j["runs"] = a;
    emit(job, j.dump(1) + "\n");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrence coefficients, identities and asymptotics for the weight exp(-x^(2m) + t x^2)"};
  app.require_subcommand(1);
  Job job;

  auto common = [&](CLI::App* sub, long default_n) {
    job.n_max = default_n;
    sub->add_option("--m", job.m, "exponent m >= 2");
    sub->add_option("--t", job.t, "deformation parameter, decimal");
    sub->add_option("--n-max", job.n_max, "largest n");
    sub->add_option("--bits", job.bits, "starting working precision (0 = calibrated)");
    sub->add_option("--target", job.target, "target relative error of validated tables");
    sub->add_option("--max-escalations", job.max_escalations, "precision doublings before giving up");
    sub->add_option("--out", job.out, "output file ('-' for stdout)");
    sub->add_option("--cache-dir", job.cache_dir, "cache directory (default $FREUD_CACHE_DIR)");
    sub->add_flag("--no-cache", job.no_cache, "ignore the cache");
    sub->add_option("--format", job.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* moments_cmd = app.add_subcommand("moments", "even moments mu_0 .. mu_{2 n_max}");
  auto* rec_cmd = app.add_subcommand("recurrence", "validated recurrence table with Hankel cross-check");
  auto* verify_cmd = app.add_subcommand("verify", "run identity validators");
  auto* asympt_cmd = app.add_subcommand("asympt", "compare exact values with asymptotic expansions");
  auto* lemma_cmd = app.add_subcommand("lemma", "general-m ln D_n(0) check");
  auto* demo_cmd = app.add_subcommand("demo-instability", "forward iteration of the m = 2 recurrence");

  for (auto* s : {moments_cmd, rec_cmd, verify_cmd, asympt_cmd, lemma_cmd, demo_cmd}) common(s, 50);
  moments_cmd->add_flag("--cross-check", job.cross_check, "compare every moment with quadrature");
  verify_cmd->add_option("--which", job.which, "comma-separated identity tags or 'all'");
  verify_cmd->add_option("--perturb-beta", job.perturb, "n:delta, multiply beta_n by 1 + delta first");
  asympt_cmd->add_option("--quantity", job.quantity, "beta, p, lnD, lnh or lnD0");
  asympt_cmd->add_option("--n-grid", job.n_grid, "lo:hi:step or comma list")->required();
  asympt_cmd->add_option("--truncations", job.truncations, "comma list of term counts or 'full'");
  asympt_cmd->add_option("--summary", job.summary, "with --format csv, also write the JSON summary here");
  lemma_cmd->add_option("--m-list", job.m_list, "exponents to check when --m is absent");
  lemma_cmd->add_option("--n-grid", job.n_grid, "comma list of n (default 10,20,40)");
  demo_cmd->add_option("--start-bits", job.bits_list, "comma list of starting precisions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (moments_cmd->parsed()) return cmd_moments(job);
    if (rec_cmd->parsed()) return cmd_recurrence(job);
    if (verify_cmd->parsed()) return cmd_verify(job);
    if (asympt_cmd->parsed()) return cmd_asympt(job);
    if (lemma_cmd->parsed()) return cmd_lemma(job, lemma_cmd->count("--m") > 0);
    if (demo_cmd->parsed()) {
      if (demo_cmd->count("--n-max") == 0) job.n_max = 300;
      return cmd_demo_instability(job);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return kConvergence;
  } catch (const PrecisionExhausted& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return kConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
