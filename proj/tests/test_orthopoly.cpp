#include <gtest/gtest.h>

#include "freud/orthopoly.hpp"

using namespace freud;

namespace {

MomentTable moments_for(int m, const char* t, long order, long bits) {
  PrecisionScope scope(bits);
  return moment_table(Weight(m, t), order);
}

}  // namespace

TEST(HankelLogDeterminant, SmallOrders) {
  PrecisionScope scope(256);
  auto mu = moment_table(Weight(2, "0"), 4);
  EXPECT_TRUE(hankel_log_determinant(mu, 0).is_zero());
  Real mu0 = tgamma(ratio(1, 4)) / 2;
  Real mu2 = tgamma(ratio(3, 4)) / 2;
  EXPECT_LT(abs(hankel_log_determinant(mu, 1) - log(mu0)).to_double(), 1e-70);
  EXPECT_NEAR(hankel_log_determinant(mu, 1).to_double(), 0.5949, 1e-4);
  // mu_1 = 0, so D_2 = mu_0 mu_2.
  EXPECT_LT(abs(hankel_log_determinant(mu, 2) - log(mu0 * mu2)).to_double(), 1e-70);
  EXPECT_THROW(hankel_log_determinant(mu, 6), std::out_of_range);
}

TEST(HankelLogDeterminant, LowPrecisionIsDetected) {
  // 80 x 80 Hankel matrix at 128 bits loses every digit.
  PrecisionScope scope(128);
  auto mu = moment_table(Weight(3, "0"), 80);
  EXPECT_THROW(recurrence_table_hankel(mu, 80), PrecisionExhausted);
}

TEST(RecurrenceTable, FirstCoefficientsFromClosedForms) {
  PrecisionScope scope(256);
  auto mu = moment_table(Weight(2, "0"), 6);
  for (auto rec : {recurrence_table_hankel(mu, 3), recurrence_table_stieltjes(mu, 3)}) {
    EXPECT_TRUE(rec.beta[0].is_zero());
    Real b1 = tgamma(ratio(3, 4)) / tgamma(ratio(1, 4));
    EXPECT_LT(rel_diff(rec.beta[1], b1).to_double(), 1e-70);
    EXPECT_NEAR(rec.beta[1].to_double(), 0.3379891200, 1e-9);
    // Discrete Painleve I at n=1, t=0: 4 beta_1 (beta_1 + beta_2) = 1.
    Real b2 = 1 / (4 * b1) - b1;
    EXPECT_LT(rel_diff(rec.beta[2], b2).to_double(), 1e-70);
    EXPECT_NEAR(rec.beta[2].to_double(), 0.4017, 1e-4);
    EXPECT_TRUE(rec.lnD[0].is_zero());
    EXPECT_LT(abs(rec.lnh[0] - log(mu.even(0))).to_double(), 1e-70);
    EXPECT_TRUE(rec.p[0].is_zero());
    EXPECT_TRUE(rec.p[1].is_zero());
  }
}

TEST(RecurrenceTable, DualPathAgreementM2T1) {
  auto mu = moments_for(2, "1", 40, 512);
  PrecisionScope scope(512);
  auto a = recurrence_table_hankel(mu, 40);
  auto b = recurrence_table_stieltjes(mu, 40);
  for (long n = 1; n <= 40; ++n) {
    EXPECT_LT(rel_diff(a.beta[n], b.beta[n]).to_double(), 1e-20) << n;
    EXPECT_LT(abs(a.lnh[n] - b.lnh[n]).to_double(), 1e-20) << n;
    EXPECT_LT(abs(a.lnD[n + 1] - b.lnD[n + 1]).to_double(), 1e-20) << n;
    EXPECT_LT(abs(a.p[n] - b.p[n]).to_double(), 1e-20) << n;
  }
}

TEST(RecurrenceTable, InvariantsHoldOnValidatedTables) {
  PrecisionContext ctx;
  for (int m : {2, 3}) {
    for (const char* ts : {"-2", "0", "1", "3"}) {
      auto vt = validated_recurrence(Weight(m, ts), 60, ctx);
      const auto& rec = vt.table;
      PrecisionScope scope(rec.bits);
      Real running(0);
      EXPECT_TRUE(rec.lnD[0].is_zero());
      for (long n = 0; n <= rec.n_max; ++n) {
        if (n >= 1) {
          EXPECT_GT(rec.beta[n].sign(), 0);
          Real via_lnD = exp(rec.lnD[n + 1] + rec.lnD[n - 1] - 2 * rec.lnD[n]);
          EXPECT_LT(rel_diff(via_lnD, rec.beta[n]).to_double(), 1e-30);
        }
        EXPECT_LT(abs(rec.p[n] + running).to_double(), 1e-40) << "telescoped p at n=" << n;
        running += rec.beta[n];
        EXPECT_LT(abs(rec.lnD[n + 1] - rec.lnD[n] - rec.lnh[n]).to_double(), 1e-40);
        EXPECT_LE(rec.beta_err[n].to_double(), ctx.target_rel_error);
      }
    }
  }
}

TEST(RecurrenceTable, DualPathOracleAcrossGrid) {
  PrecisionContext ctx;
  for (int m : {2, 3}) {
    for (const char* ts : {"-2", "0", "1", "3"}) {
      Weight w(m, ts);
      auto vt = validated_recurrence(w, 60, ctx);
      PrecisionScope scope(vt.table.bits);
      auto hk = recurrence_table_hankel(vt.moments, 60);
      for (long n = 1; n <= 60; ++n) {
        Real bound = max(Real(1e-30), 10 * vt.table.beta_err[n]);
        EXPECT_LE(rel_diff(hk.beta[n], vt.table.beta[n]), bound) << "m=" << m << " t=" << ts << " n=" << n;
        EXPECT_LT(abs(hk.lnD[n + 1] - vt.table.lnD[n + 1]).to_double(), 1e-25);
      }
    }
  }
}

TEST(Polynomial, LowDegreesAndParity) {
  PrecisionScope scope(256);
  auto mu = moment_table(Weight(2, "0.5"), 30);
  auto rec = recurrence_table_stieltjes(mu, 30);
  auto p0 = polynomial(rec, 0);
  ASSERT_EQ(p0.degree(), 0);
  EXPECT_EQ(p0[0], Real(1));
  auto p1 = polynomial(rec, 1);
  ASSERT_EQ(p1.degree(), 1);
  EXPECT_TRUE(p1[0].is_zero());
  EXPECT_EQ(p1[1], Real(1));
  auto p2 = polynomial(rec, 2);
  EXPECT_EQ(p2[0], -rec.beta[1]);
  EXPECT_TRUE(p2[1].is_zero());
  EXPECT_EQ(p2[2], Real(1));
  for (long n = 0; n <= 30; ++n) {
    auto pn = polynomial(rec, n);
    EXPECT_EQ(pn[n], Real(1));
    for (long j = (n + 1) % 2; j < n; j += 2) EXPECT_TRUE(pn[j].is_zero()) << n << " " << j;
    if (n >= 2) {
      EXPECT_LT(abs(pn[n - 2] - rec.p[n]).to_double(), 1e-60);
    }
  }
  EXPECT_THROW(polynomial(rec, 31), std::out_of_range);
}

TEST(InnerProduct, OrthogonalityAndRecurrence) {
  PrecisionScope scope(400);
  auto mu = moment_table(Weight(3, "-1"), 64);
  auto rec = recurrence_table_stieltjes(mu, 31);
  std::vector<MonicPolynomial> P;
  for (long n = 0; n <= 31; ++n) P.push_back(polynomial(rec, n));
  EXPECT_EQ(inner_product(P[0], P[0], mu), mu.even(0));
  for (long j = 0; j <= 30; ++j) {
    for (long k = j + 1; k <= 30; ++k) {
      Real ip = abs(inner_product(P[j], P[k], mu));
      EXPECT_LE(ip, Real(1e-20) * sqrt(exp(rec.lnh[j] + rec.lnh[k]))) << j << "," << k;
    }
  }
  for (long n = 0; n <= 30; ++n) {
    Real xp = inner_product(shift_up(P[n].coeffs, 1), P[n + 1].coeffs, mu);
    EXPECT_LT(rel_diff(xp, exp(rec.lnh[n + 1])).to_double(), 1e-40);
  }
  std::vector<Real> big(70, Real(1));
  EXPECT_THROW(inner_product(big, big, mu), std::out_of_range);
}
