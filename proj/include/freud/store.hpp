#ifndef FREUD_STORE_HPP
#define FREUD_STORE_HPP

// On-disk representation of tables and reports, and the persistent cache.
//
// High-precision values are decimal strings. Stored tables carry enough
// digits to reparse bit-identically at their precision; report values carry
// a digit count derived from their error bound.

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <unistd.h>

#include "freud/asymptotics.hpp"
#include "freud/identities.hpp"
#include "freud/moments.hpp"
#include "freud/orthopoly.hpp"

namespace freud {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

class IoError : public FreudError {
 public:
  using FreudError::FreudError;
};

// ---------------------------------------------------------------------------
// Decimal strings

/// Canonical form of a decimal literal: no redundant sign, leading or
/// trailing zeros, and no exponent unless it is large. "1.50e1" -> "15".
inline std::string canonical_decimal(std::string_view text) {
  static const std::regex re(R"(^([+-]?)([0-9]*)(?:\.([0-9]*))?(?:[eE]([+-]?[0-9]+))?$)");
  std::string s(text);
  std::smatch mt;
  if (!std::regex_match(s, mt, re) || (mt[2].length() == 0 && mt[3].length() == 0)) {
    throw UsageError("not a decimal number: '" + s + "'");
  }
  std::string digits = mt[2].str() + mt[3].str();
  long exp10 = -static_cast<long>(mt[3].length());
  if (mt[4].matched) {
    if (mt[4].length() > 9) throw UsageError("decimal exponent out of range: '" + s + "'");
    exp10 += std::stol(mt[4].str());
  }
  const auto first = digits.find_first_not_of('0');
  if (first == std::string::npos) return "0";
  digits.erase(0, first);
  while (digits.back() == '0') {
    digits.pop_back();
    ++exp10;
  }
  const std::string sign = mt[1].str() == "-" ? "-" : "";
  const long len = static_cast<long>(digits.size());
  if (exp10 >= 0 && exp10 <= 30) return sign + digits + std::string(static_cast<std::size_t>(exp10), '0');
  if (exp10 < 0 && len + exp10 > 0) {
    return sign + digits.substr(0, static_cast<std::size_t>(len + exp10)) + "." +
           digits.substr(static_cast<std::size_t>(len + exp10));
  }
  if (exp10 < 0 && len + exp10 > -30) {
    return sign + "0." + std::string(static_cast<std::size_t>(-(len + exp10)), '0') + digits;
  }
  return sign + digits + "e" + std::to_string(exp10);
}

/// Digits that reparse to the same value at the value's own precision.
inline std::string exact_decimal(const Real& x) { return x.str(); }

/// Error bound rendered with three digits, rounded upward.
inline std::string bound_decimal(const Real& e) {
  if (e.is_zero()) return "0";
  if (!e.is_finite()) return e.str(3);
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.2RUe", e.raw());
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}
inline std::string bound_decimal(long double e) {
  PrecisionScope scope(64);
  Real r;
  mpfr_set_ld(r.raw(), e, MPFR_RNDU);
  return bound_decimal(r);
}

/// Significant digits justified by an absolute error bound, between 3 and
/// the value's own precision.
inline int digits_for(const Real& x, const Real& abs_err) {
  const int cap = static_cast<int>(mpfr_get_str_ndigits(10, x.precision()));
  if (x.is_zero()) return 3;
  if (abs_err.is_zero()) return cap;
  PrecisionScope scope(64);
  const double lg = (log(abs(x)) - log(abs_err)).to_double() / std::log(10.0);
  const int d = static_cast<int>(std::floor(lg));
  return std::clamp(d, 3, cap);
}
inline std::string decimal(const Real& x, const Real& abs_err) { return x.str(digits_for(x, abs_err)); }

namespace detail {

inline Json decimals(const std::vector<Real>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(exact_decimal(x));
  return a;
}

inline std::vector<Real> parse_decimals(const Json& a, long bits) {
  PrecisionScope scope(bits);
  std::vector<Real> out;
  out.reserve(a.size());
  for (const auto& s : a) out.push_back(Real::parse(s.get<std::string>()));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tables

inline Json to_json(const MomentTable& mu) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "moments";
  j["m"] = mu.weight().m();
  j["t"] = mu.weight().t_text();
  j["bits"] = mu.bits();
  j["max_order"] = mu.max_order();
  j["index"] = "value[k] is mu_{2k}; odd moments vanish";
  j["value"] = detail::decimals(mu.values());
  j["rel_err"] = detail::decimals(mu.err_bounds());
  return j;
}

inline MomentTable moments_from_json(const Json& j) {
  const long bits = j.at("bits").get<long>();
  Weight w(j.at("m").get<int>(), j.at("t").get<std::string>());
  return MomentTable(std::move(w), j.at("max_order").get<long>(), detail::parse_decimals(j.at("value"), bits),
                     detail::parse_decimals(j.at("rel_err"), 64), bits);
}

inline Json to_json(const RecurrenceTable& rec) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "recurrence";
  j["m"] = rec.weight.m();
  j["t"] = rec.weight.t_text();
  j["n_max"] = rec.n_max;
  j["method"] = to_string(rec.method);
  j["bits"] = rec.bits;
  j["beta"] = detail::decimals(rec.beta);
  j["lnh"] = detail::decimals(rec.lnh);
  j["p"] = detail::decimals(rec.p);
  j["lnD"] = detail::decimals(rec.lnD);
  j["beta_rel_err"] = detail::decimals(rec.beta_err);
  j["lnh_abs_err"] = detail::decimals(rec.lnh_err);
  j["p_abs_err"] = detail::decimals(rec.p_err);
  j["lnD_abs_err"] = detail::decimals(rec.lnD_err);
  return j;
}

inline RecurrenceTable recurrence_from_json(const Json& j) {
  const long bits = j.at("bits").get<long>();
  RecurrenceTable rec(Weight(j.at("m").get<int>(), j.at("t").get<std::string>()), j.at("n_max").get<long>(),
                      parse_method(j.at("method").get<std::string>()), bits);
  rec.beta = detail::parse_decimals(j.at("beta"), bits);
  rec.lnh = detail::parse_decimals(j.at("lnh"), bits);
  rec.p = detail::parse_decimals(j.at("p"), bits);
  rec.lnD = detail::parse_decimals(j.at("lnD"), bits);
  rec.beta_err = detail::parse_decimals(j.at("beta_rel_err"), 64);
  rec.lnh_err = detail::parse_decimals(j.at("lnh_abs_err"), 64);
  rec.p_err = detail::parse_decimals(j.at("p_abs_err"), 64);
  rec.lnD_err = detail::parse_decimals(j.at("lnD_abs_err"), 64);
  return rec;
}

/// Validated table plus the moments it was built from.
inline Json to_json(const ValidatedTables& v) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "validated-recurrence";
  j["table"] = to_json(v.table);
  j["moments"] = to_json(v.moments);
  return j;
}

inline ValidatedTables validated_from_json(const Json& j) {
  return {moments_from_json(j.at("moments")), recurrence_from_json(j.at("table"))};
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const ResidualReport& r) {
  Json j;
  j["name"] = r.name;
  j["m"] = r.m;
  j["t"] = r.t;
  j["n_lo"] = r.n_lo;
  j["n_hi"] = r.n_hi;
  j["pass"] = r.pass;
  j["max_residual"] = bound_decimal(r.max_residual);
  j["tolerance"] = bound_decimal(r.tolerance);
  Json rows = Json::array();
  for (std::size_t i = 0; i < r.n.size(); ++i) {
    Json row;
    row["n"] = r.n[i];
    row["residual"] = bound_decimal(r.residuals[i]);
    if (i < r.orders.size()) {
      Json o = Json::array();
      for (double x : r.orders[i]) o.push_back(std::isfinite(x) ? Json(x) : Json(nullptr));
      row["orders"] = o;
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  if (!r.orders.empty()) j["order_pass"] = r.order_pass;
  return j;
}

inline Json to_json(const ExpansionReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "asymptotics";
  j["quantity"] = to_string(r.quantity);
  j["m"] = r.m;
  j["t"] = r.t;
  j["n_grid"] = r.n_grid;
  j["fit_points"] = r.fit_points;
  Json tr = Json::array();
  for (std::size_t k = 0; k < r.truncations.size(); ++k) {
    Json e;
    e["terms"] = r.truncations[k];
    e["fitted_order"] = r.fitted_orders[k];
    e["r_squared"] = r.r_squared[k];
    e["expected_order"] = std::isfinite(r.expected_orders[k]) ? Json(r.expected_orders[k]) : Json(nullptr);
    e["monotone_from"] = r.monotone_from[k];
    tr.push_back(e);
  }
  j["truncations"] = tr;
  return j;
}

inline Json to_json(const InstabilityReport& r) {
  Json j;
  j["start_bits"] = r.start_bits;
  j["n_max"] = r.n_max;
  j["divergence_index"] = r.divergence_index;
  Json d = Json::array();
  for (const auto& x : r.relative_deviation) d.push_back(bound_decimal(x));
  j["relative_deviation"] = d;
  return j;
}

inline Json to_json(const LemmaConsistency& c) {
  Json j;
  j["m"] = c.m;
  j["ok"] = c.ok;
  j["n2_difference"] = bound_decimal(c.n2_difference);
  j["n_difference"] = bound_decimal(c.n_difference);
  j["log_difference"] = bound_decimal(c.log_difference);
  j["constant_difference"] = bound_decimal(c.constant_difference);
  return j;
}

// ---------------------------------------------------------------------------
// Files

/// Writes to a sibling temporary and renames it over `path`.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

inline std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Cache

/// Shortest decimal that round-trips the double.
inline std::string shortest(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

struct CacheKey {
  int schema_version = kSchemaVersion;
  std::string kind;  // "moments" or "recurrence"
  int m = 0;
  std::string t;     // canonical decimal
  long n_max = 0;
  long working_bits = 0;
  std::string method;
  double target_rel_error = 0;

  std::string str() const {
    std::ostringstream ss;
    ss << "v" << schema_version << " " << kind << " m=" << m << " t=" << t << " n_max=" << n_max
       << " bits=" << working_bits << " method=" << method << " target=" << shortest(target_rel_error);
    return ss.str();
  }
  /// 64-bit FNV-1a of str(), as 16 hex digits.
  std::string hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : str()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

/// One JSON file per key, named by the key hash, plus index.txt listing
/// "hash key" lines.
class Cache {
 public:
  explicit Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path file_for(const CacheKey& k) const { return dir_ / (k.hash() + ".json"); }

  std::optional<Json> load(const CacheKey& k) const {
    auto text = read_file(file_for(k));
    if (!text) return std::nullopt;
    try {
      Json j = Json::parse(*text);
      if (j.at("key").get<std::string>() != k.str()) return std::nullopt;
      return j.at("data");
    } catch (const Json::exception&) {
      return std::nullopt;
    }
  }

  void store(const CacheKey& k, const Json& data) const {
    Json j;
    j["key"] = k.str();
    j["data"] = data;
    atomic_write(file_for(k), j.dump());
    const auto index = dir_ / "index.txt";
    const std::string line = k.hash() + " " + k.str() + "\n";
    std::string current = read_file(index).value_or("");
    if (current.find(line) == std::string::npos) atomic_write(index, current + line);
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace freud

#endif  // FREUD_STORE_HPP
