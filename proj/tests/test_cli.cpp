#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "freud/store.hpp"

using namespace freud;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  fs::path p = fs::path(testing::TempDir()) / ("freud_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) { return read_file(p).value_or(""); }

Run run(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout";
  const fs::path err = dir / "stderr";
  const std::string cmd = std::string("env -u FREUD_CACHE_DIR ") + FREUD_CLI_PATH + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST(Store, CanonicalDecimal) {
  EXPECT_EQ(canonical_decimal("1"), "1");
  EXPECT_EQ(canonical_decimal("1.0"), "1");
  EXPECT_EQ(canonical_decimal("+01.500"), "1.5");
  EXPECT_EQ(canonical_decimal("-0"), "0");
  EXPECT_EQ(canonical_decimal("-.25"), "-0.25");
  EXPECT_EQ(canonical_decimal("15e-1"), "1.5");
  EXPECT_EQ(canonical_decimal("3E2"), "300");
  EXPECT_EQ(canonical_decimal("0.000125"), "0.000125");
  EXPECT_EQ(canonical_decimal("1e100"), "1e100");
  EXPECT_THROW(canonical_decimal("abc"), UsageError);
  EXPECT_THROW(canonical_decimal("."), UsageError);
  EXPECT_THROW(canonical_decimal("1.2.3"), UsageError);
}

TEST(Store, CacheKeyIsDeterministic) {
  CacheKey a{kSchemaVersion, "recurrence", 2, "1", 50, 320, "stieltjes", 1e-40};
  CacheKey b = a;
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(a.str(), "v1 recurrence m=2 t=1 n_max=50 bits=320 method=stieltjes target=1e-40");
  b.t = "1.5";
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Store, RecurrenceRoundTripIsBitExact) {
  PrecisionContext ctx;
  auto v = validated_recurrence(Weight(3, "-1.25"), 30, ctx);
  Json j = to_json(v);
  auto back = validated_from_json(Json::parse(j.dump()));
  ASSERT_EQ(back.table.beta.size(), v.table.beta.size());
  EXPECT_EQ(back.table.bits, v.table.bits);
  EXPECT_EQ(back.table.weight.t_text(), "-1.25");
  for (std::size_t i = 0; i < v.table.beta.size(); ++i) {
    EXPECT_TRUE(back.table.beta[i] == v.table.beta[i]) << i;
    EXPECT_TRUE(back.table.lnh[i] == v.table.lnh[i]) << i;
    EXPECT_TRUE(back.table.p[i] == v.table.p[i]) << i;
  }
  for (long k = 0; k <= v.moments.max_order(); ++k) EXPECT_TRUE(back.moments.even(k) == v.moments.even(k));
  EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(Store, DigitsFollowErrorBounds) {
  PrecisionScope scope(256);
  Real x = pi();
  EXPECT_EQ(decimal(x, Real(1e-10)), "3.141592654e+00");
  EXPECT_EQ(digits_for(x, Real(0)), static_cast<int>(mpfr_get_str_ndigits(10, 256)));
  EXPECT_EQ(digits_for(x, Real(10)), 3);
  EXPECT_EQ(bound_decimal(Real(1.001e-5)), "1.01e-05");
}

TEST(Cli, ExitCodes) {
  auto dir = scratch("exit");
  EXPECT_EQ(run("--help", dir).status, 0);
  EXPECT_EQ(run("", dir).status, 2);
  EXPECT_EQ(run("nonsense", dir).status, 2);
  EXPECT_EQ(run("moments --m 2 --bogus-flag", dir).status, 2);
  EXPECT_EQ(run("moments --m 1", dir).status, 2);
  EXPECT_EQ(run("moments --m 2 --t abc", dir).status, 2);
  EXPECT_EQ(run("moments --m 2 --format xml", dir).status, 2);
  EXPECT_EQ(run("verify --m 2 --which no-such-identity", dir).status, 2);
  EXPECT_EQ(run("verify --m 3 --which sum-rule", dir).status, 2);
  EXPECT_EQ(run("asympt --m 2 --n-grid ''", dir).status, 2);
  EXPECT_EQ(run("asympt --m 2 --n-grid 10,20", dir).status, 2);
  EXPECT_EQ(run("asympt --m 2 --n-grid 10:40:10 --truncations 99", dir).status, 2);
  EXPECT_EQ(run("asympt --m 2 --t 1 --quantity lnD0 --n-grid 10:40:10", dir).status, 2);
  EXPECT_EQ(run("lemma --m 1", dir).status, 2);
  EXPECT_EQ(run("demo-instability --m 3", dir).status, 2);
  EXPECT_EQ(run("recurrence --m 3 --n-max 80 --bits 128 --target 1e-20 --max-escalations 0", dir).status, 3);

  EXPECT_EQ(run("verify --m 2 --t 1 --n-max 30", dir).status, 0);
  auto bad = run("verify --m 2 --t 1 --n-max 30 --which dpainleve1,sum-rule --perturb-beta 5:1e-6", dir);
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.err.find("FAILED dpainleve1"), std::string::npos);
  EXPECT_NE(bad.out.find("\"pass\": false"), std::string::npos);
}

TEST(Cli, MomentsFile) {
  auto dir = scratch("moments");
  auto r = run("moments --m 2 --t 0 --n-max 4", dir);
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  // mu_0 = Gamma(1/4) / 2.
  EXPECT_EQ(j["value"][0].get<std::string>().substr(0, 22), "1.81280495411095415596");
  auto c = run("moments --m 3 --t 1 --n-max 6 --cross-check", dir);
  ASSERT_EQ(c.status, 0) << c.err;
  EXPECT_TRUE(Json::parse(c.out)["cross_check"]["pass"].get<bool>());
}

TEST(Cli, RecurrenceCsv) {
  auto dir = scratch("recurrence");
  auto r = run("recurrence --m 3 --t -2 --n-max 60 --format csv", dir);
  ASSERT_EQ(r.status, 0) << r.err;
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 62u);
  EXPECT_EQ(ls[0], "n,beta,lnh,p,lnD,agreement");
  auto row0 = fields(ls[1]);
  EXPECT_EQ(row0[0], "0");
  EXPECT_EQ(row0[1], "0");
  EXPECT_EQ(fields(ls[2])[3], "0");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto f = fields(ls[i]);
    ASSERT_EQ(f.size(), 6u) << ls[i];
    EXPECT_LT(std::stod(f[5]), 1e-20) << "n=" << f[0];
  }
}

TEST(Cli, DeterministicAndCached) {
  auto dir = scratch("determinism");
  const std::string cache = (dir / "cache").string();
  const std::vector<std::string> commands{
      "moments --m 3 --t 0.5 --n-max 8 --format csv",
      "recurrence --m 2 --t 1.0 --n-max 40",
      "verify --m 3 --t 1 --n-max 24",
      "asympt --m 2 --t 1 --quantity beta --n-grid 40:80:10 --truncations 2,7 --format csv",
      "lemma --m-list 2,4 --n-grid 10,20",
      "demo-instability --m 2 --t 0 --n-max 160 --format csv",
  };
  for (const auto& c : commands) {
    auto fresh1 = run(c + " --no-cache", dir);
    auto fresh2 = run(c + " --no-cache", dir);
    ASSERT_EQ(fresh1.status, 0) << c << "\n" << fresh1.err;
    EXPECT_EQ(fresh1.out, fresh2.out) << c;
    auto cold = run(c + " --cache-dir " + cache, dir);
    auto warm = run(c + " --cache-dir " + cache, dir);
    EXPECT_EQ(cold.out, fresh1.out) << c;
    EXPECT_EQ(warm.out, fresh1.out) << c;
    EXPECT_NE(warm.err.find("cache hit"), std::string::npos) << c;
  }
  // Output files are written whole.
  auto f = run("recurrence --m 2 --t 1 --n-max 40 --cache-dir " + cache + " --out " + (dir / "r.json").string(), dir);
  EXPECT_EQ(f.status, 0);
  EXPECT_EQ(f.out, "");
  EXPECT_EQ(slurp(dir / "r.json"), run("recurrence --m 2 --t 1 --n-max 40 --no-cache", dir).out);

  // Layout: one file per key named by its hash, listed in index.txt.
  const std::string index = slurp(fs::path(cache) / "index.txt");
  std::size_t entries = 0;
  for (const auto& l : lines(index)) {
    ASSERT_GE(l.size(), 17u);
    EXPECT_TRUE(fs::exists(fs::path(cache) / (l.substr(0, 16) + ".json"))) << l;
    ++entries;
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(cache)) files += e.path().extension() == ".json";
  EXPECT_EQ(entries, files);
  // "1.0" and "1" share an entry.
  EXPECT_EQ(index.find("t=1.0"), std::string::npos);
}

TEST(Cli, CacheDirFromEnvironment) {
  auto dir = scratch("env");
  const std::string cache = (dir / "envcache").string();
  const std::string cmd = "FREUD_CACHE_DIR=" + cache + " " + FREUD_CLI_PATH +
                          " recurrence --m 2 --n-max 12 > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(fs::path(cache) / "index.txt"));
}

TEST(Cli, AsymptoticSummary) {
  auto dir = scratch("asympt");
  auto r = run("asympt --m 2 --t 0 --quantity beta --n-grid 60:200:10 --truncations 1 --format csv --summary " +
                   (dir / "s.json").string(),
               dir);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(lines(r.out)[0], "n,exact,truncated_1,residual_1");
  auto s = Json::parse(slurp(dir / "s.json"));
  EXPECT_NEAR(s["truncations"][0]["fitted_order"].get<double>(), -1.5, 0.3);
}
