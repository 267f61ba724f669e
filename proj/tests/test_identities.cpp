#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "freud/identities.hpp"

using namespace freud;

namespace {

const ValidatedTables& tables(int m, const std::string& t) {
  static std::map<std::pair<int, std::string>, ValidatedTables> cache;
  auto key = std::make_pair(m, t);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, validated_recurrence(Weight(m, t), m == 2 ? 62 : 44, PrecisionContext{})).first;
  }
  return it->second;
}

void expect_clean(const ResidualReport& r, double bound) {
  EXPECT_TRUE(r.pass) << r.name << " m=" << r.m << " t=" << r.t << " max=" << r.max_residual
                      << " tol=" << r.tolerance;
  EXPECT_LT(r.max_residual.to_double(), bound) << r.name << " t=" << r.t;
  EXPECT_EQ(r.pass, r.max_residual <= r.tolerance && r.order_pass);
}

std::vector<long> upto(long hi) {
  std::vector<long> v;
  for (long n = 0; n <= hi; ++n) v.push_back(n);
  return v;
}

}  // namespace

TEST(DiscretePainleveI, FirstStepAtZeroFromHankelPath) {
  PrecisionScope scope(256);
  auto mu = moment_table(Weight(2, "0"), 6);
  auto rec = recurrence_table_hankel(mu, 3);
  Real direct = 4 * rec.beta[1] * (rec.beta[0] + rec.beta[1] + rec.beta[2]) - 1;
  EXPECT_LT(abs(direct).to_double(), 1e-70);
  auto rep = check_dpainleve1(rec, NRange{1, 1});
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.n, std::vector<long>{1});
}

TEST(DiscretePainleveI, StieltjesTablesToSixty) {
  for (const char* t : {"-2", "0", "1", "3"}) expect_clean(check_dpainleve1(tables(2, t).table, NRange{1, 60}), 1e-20);
}

TEST(DiscretePainleveI, NeedsQuarticWeight) {
  EXPECT_THROW(check_dpainleve1(tables(3, "0").table), UsageError);
  EXPECT_THROW(check_dpainleve1(tables(2, "0").table, NRange{0, 5}), UsageError);
  EXPECT_THROW(check_dpainleve1(tables(2, "0").table, NRange{1, 62}), UsageError);
}

TEST(SumRuleM2, SmallestCaseByHand) {
  const auto& rec = tables(2, "0").table;
  PrecisionScope scope(rec.bits);
  const auto& b = rec.beta;
  Real lhs = b[0] + b[1];
  Real rhs = b[1] * (4 * (b[0] + b[1]) * (b[1] + b[2]));
  EXPECT_LT(abs(lhs - rhs).to_double(), 1e-60);
  EXPECT_TRUE(check_sum_rule_m2(rec, NRange{1, 1}).pass);
}

TEST(SumRuleM2, BulkAtUnitT) { expect_clean(check_sum_rule_m2(tables(2, "1").table, NRange{1, 50}), 1e-18); }

TEST(PIdentityM2, ZeroAndBulk) {
  auto r0 = check_p_identity_m2(tables(2, "1").table, NRange{0, 0});
  EXPECT_TRUE(r0.residuals[0].is_zero());
  for (const char* t : {"-2", "0", "3"}) expect_clean(check_p_identity_m2(tables(2, t).table, NRange{0, 50}), 1e-18);
}

TEST(PDifferenceEquationM2, SpotAtTwo) {
  const auto& rec = tables(2, "3").table;
  PrecisionScope scope(rec.bits);
  // Written out from p_1 = 0, p_2 = -beta_1, p_3 = -beta_1 - beta_2.
  const Real t(3);
  const Real b1 = rec.beta[1], b2 = rec.beta[2];
  const Real p1(0), p2 = -b1, p3 = -b1 - b2;
  Real lhs = (p1 - p3) * (2 + 2 * t * (p2 - p3) - 4 * (p1 - p2) * (p2 - p3)) + p2 + p3 - 2 * t * (p2 - p3) * (p2 - p3);
  EXPECT_LT(abs(lhs).to_double(), 1e-60);
  auto rep = check_p_difference_eq_m2(rec, NRange{2, 2});
  EXPECT_LT(abs(rep.residuals[0] - abs(lhs)).to_double(), 1e-60);
  for (const char* t2 : {"-2", "0", "1", "3"}) {
    expect_clean(check_p_difference_eq_m2(tables(2, t2).table, NRange{1, 50}), 1e-18);
  }
}

TEST(HierarchyM3, SpotAtTwoFromHankelBetas) {
  PrecisionScope scope(400);
  auto mu = moment_table(Weight(3, "-2"), 10);
  auto hk = recurrence_table_hankel(mu, 5);
  const auto& b = hk.beta;
  const Real t(-2);
  Real lhs = 6 * b[2] *
                 (b[0] * b[1] + b[1] * b[1] + 2 * b[1] * b[2] + b[1] * b[3] + b[2] * b[2] + 2 * b[2] * b[3] +
                  b[3] * b[3] + b[3] * b[4]) -
             2 * t * b[2];
  EXPECT_LT(abs(lhs - 2).to_double(), 1e-80);
  EXPECT_TRUE(check_dpainleve_hierarchy_m3(hk, NRange{2, 2}).pass);
}

TEST(HierarchyM3, BulkAndPIdentity) {
  for (const char* t : {"-2", "0", "3"}) {
    expect_clean(check_dpainleve_hierarchy_m3(tables(3, t).table, NRange{1, 40}), 1e-18);
    expect_clean(check_p_identity_m3(tables(3, t).table, NRange{1, 40}), 1e-18);
  }
  EXPECT_THROW(check_dpainleve_hierarchy_m3(tables(2, "0").table), UsageError);
}

TEST(Ladder, QuarticClosedFormsAtOne) {
  const auto& vt = tables(2, "1");
  auto d = compute_ladder(vt.table, vt.moments, 1);
  ASSERT_EQ(d.A.size(), 3u);
  ASSERT_EQ(d.B.size(), 2u);
  PrecisionScope scope(vt.table.bits);
  const auto& b = vt.table.beta;
  EXPECT_LT(abs(d.A[0] - (4 * b[1] + 4 * b[2] - 2)).to_double(), 1e-20);
  EXPECT_TRUE(d.A[1].is_zero());
  EXPECT_LT(abs(d.A[2] - 4).to_double(), 1e-20);
  EXPECT_TRUE(d.B[0].is_zero());
  EXPECT_LT(abs(d.B[1] - 4 * b[1]).to_double(), 1e-20);
}

TEST(Ladder, SexticAuxiliaries) {
  const auto& vt = tables(3, "0");
  PrecisionScope scope(vt.table.bits);
  const auto& b = vt.table.beta;
  auto d2 = compute_ladder(vt.table, vt.moments, 2);
  auto d3 = compute_ladder(vt.table, vt.moments, 3);
  EXPECT_LT(abs(d2.r - 6 * b[2] * (b[1] + b[2] + b[3])).to_double(), 1e-20);
  EXPECT_LT(abs(d2.R - d2.r - d3.r).to_double(), 1e-20);
  ASSERT_EQ(d2.A.size(), 5u);
  ASSERT_EQ(d2.B.size(), 4u);
  for (std::size_t k = 1; k < d2.A.size(); k += 2) EXPECT_TRUE(d2.A[k].is_zero());
  for (std::size_t k = 0; k < d2.B.size(); k += 2) EXPECT_TRUE(d2.B[k].is_zero());
  EXPECT_THROW(compute_ladder(vt.table, vt.moments, 999), UsageError);
}

TEST(Ladder, ClosedFormsAndCompatibilityOnGrid) {
  for (int m : {2, 3}) {
    for (const char* t : {"-2", "0", "3"}) {
      const auto& vt = tables(m, t);
      expect_clean(check_ladder_closed_forms(vt.table, vt.moments, NRange{0, 30}), 1e-18);
      for (const auto& r : check_S1_S2prime(vt.table, vt.moments, NRange{1, 30})) expect_clean(r, 1e-18);
    }
  }
}

TEST(Ladder, SumRuleAtOneByHand) {
  // m=2, n=1 with A_0 = 4x^2 - 2t + 4beta_1, A_1 = 4x^2 - 2t + 4beta_1 + 4beta_2,
  // B_1 = 4 beta_1 x: the x^0, x^2 and x^4 coefficients of (S2').
  const auto& vt = tables(2, "3");
  PrecisionScope scope(vt.table.bits);
  const auto& b = vt.table.beta;
  const Real t(3);
  const Real a0 = 4 * b[1] - 2 * t, a1 = 4 * b[1] + 4 * b[2] - 2 * t;
  EXPECT_LT(abs(a0 - b[1] * a1 * a0).to_double(), 1e-60);
  EXPECT_LT(abs(16 * b[1] * b[1] - 8 * t * b[1] + 4 - b[1] * 4 * (a1 + a0)).to_double(), 1e-60);
  EXPECT_LT(abs(16 * b[1] - 16 * b[1]).to_double(), 1e-60);
  auto reps = check_S1_S2prime(vt.table, vt.moments, NRange{1, 1});
  for (const auto& r : reps) EXPECT_TRUE(r.pass) << r.name;
}

TEST(FourEqualitiesM3, GridAndSpot) {
  for (const char* t : {"-2", "0", "3"}) {
    const auto& vt = tables(3, t);
    for (const auto& r : check_m3_four_equalities(vt.table, vt.moments, NRange{1, 40})) expect_clean(r, 1e-18);
  }
  // sum_{j<2} R_j - 4t = beta_2 (R_2 - 2t)(R_1 - 2t) at t = 0.
  const auto& vt = tables(3, "0");
  PrecisionScope scope(vt.table.bits);
  auto R0 = compute_ladder(vt.table, vt.moments, 0).R;
  auto R1 = compute_ladder(vt.table, vt.moments, 1).R;
  auto R2 = compute_ladder(vt.table, vt.moments, 2).R;
  EXPECT_LT(abs(R0 + R1 - vt.table.beta[2] * R2 * R1).to_double(), 1e-40);
  EXPECT_LT(abs(R0 - 6 * vt.moments.even(2) / vt.moments.even(0)).to_double(), 1e-60);
}

TEST(Derivatives, VolterraAtFixedStep) {
  PrecisionContext ctx;
  ctx.working_bits = 256;
  FdOptions opt;
  opt.h = 1e-8;
  auto rep = check_volterra(Weight(2, "1"), {0, 5}, ctx, opt);
  ASSERT_EQ(rep.orders.size(), 2u);
  EXPECT_TRUE(rep.residuals[0].is_zero());
  EXPECT_TRUE(std::isnan(rep.orders[0][0]));
  // Ratio of residuals when halving h: 4 within 20%.
  for (double o : rep.orders[1]) EXPECT_NEAR(std::exp2(o), 4.0, 0.8);
  EXPECT_TRUE(rep.pass);
}

TEST(Derivatives, OrderTwoForAllThreeIdentities) {
  PrecisionContext ctx;
  for (int m : {2, 3}) {
    Weight w(m, "1");
    for (const auto& rep : {check_volterra(w, upto(20), ctx), check_lnh_derivative(w, upto(20), ctx),
                            check_dp_dt(w, upto(20), ctx)}) {
      EXPECT_TRUE(rep.pass) << rep.name << " m=" << m;
      EXPECT_TRUE(rep.order_pass) << rep.name;
      for (std::size_t i = 0; i < rep.orders.size(); ++i) {
        for (double o : rep.orders[i]) {
          if (!std::isnan(o)) {
            EXPECT_NEAR(o, 2.0, 0.3) << rep.name << " n=" << rep.n[i];
          }
        }
      }
    }
  }
}

TEST(Derivatives, TrivialEnds) {
  PrecisionContext ctx;
  auto dp = check_dp_dt(Weight(3, "1"), {1}, ctx);
  EXPECT_TRUE(dp.residuals[0].is_zero());
  auto lh = check_lnh_derivative(Weight(2, "1"), {0}, ctx);
  EXPECT_FALSE(std::isnan(lh.orders[0][0]));
  EXPECT_TRUE(lh.pass);
  EXPECT_THROW(check_volterra(Weight(2, "1"), {}, ctx), UsageError);
}

TEST(Detection, EveryValidatorRejectsAPerturbedBeta) {
  const double delta = 1e-6;
  for (long k : {1L, 7L, 20L}) {
    auto r2 = tables(2, "1").table;
    perturb_beta(r2, k, delta);
    EXPECT_FALSE(check_dpainleve1(r2, NRange{1, 50}).pass) << k;
    EXPECT_FALSE(check_sum_rule_m2(r2, NRange{1, 50}).pass) << k;
    EXPECT_FALSE(check_p_identity_m2(r2, NRange{0, 50}).pass) << k;
    EXPECT_FALSE(check_p_difference_eq_m2(r2, NRange{1, 50}).pass) << k;
    const auto& v2 = tables(2, "1");
    for (const auto& r : check_S1_S2prime(r2, v2.moments, NRange{1, 30})) EXPECT_FALSE(r.pass) << r.name << k;
    EXPECT_FALSE(check_ladder_closed_forms(r2, v2.moments, NRange{0, 30}).pass) << k;

    auto r3 = tables(3, "1").table;
    perturb_beta(r3, k, delta);
    const auto& v3 = tables(3, "1");
    EXPECT_FALSE(check_dpainleve_hierarchy_m3(r3, NRange{1, 40}).pass) << k;
    EXPECT_FALSE(check_p_identity_m3(r3, NRange{1, 40}).pass) << k;
    for (const auto& r : check_m3_four_equalities(r3, v3.moments, NRange{1, 40})) EXPECT_FALSE(r.pass) << r.name << k;
  }
  PrecisionContext ctx;
  FdOptions opt;
  opt.perturb = std::make_pair(7L, delta);
  for (int m : {2, 3}) {
    Weight w(m, "1");
    EXPECT_FALSE(check_volterra(w, upto(20), ctx, opt).pass);
    EXPECT_FALSE(check_lnh_derivative(w, upto(20), ctx, opt).pass);
    EXPECT_FALSE(check_dp_dt(w, upto(20), ctx, opt).pass);
  }
}

TEST(ForwardInstability, DivergesAndLaterWithMorePrecision) {
  PrecisionContext ctx;
  auto exact = validated_recurrence(Weight(2, "0"), 400, ctx).table;
  auto at256 = demo_forward_instability(exact, 256);
  auto at512 = demo_forward_instability(exact, 512);
  ASSERT_GT(at256.divergence_index, 0);
  ASSERT_GT(at512.divergence_index, 0);
  EXPECT_GT(at512.divergence_index, at256.divergence_index);
  EXPECT_LT(at256.divergence_index, 400);
  std::cout << "divergence index: 256 bits -> " << at256.divergence_index << ", 512 bits -> "
            << at512.divergence_index << "\n";
  EXPECT_THROW(demo_forward_instability(tables(3, "0").table, 256), UsageError);
}
