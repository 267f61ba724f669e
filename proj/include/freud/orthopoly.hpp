#ifndef FREUD_ORTHOPOLY_HPP
#define FREUD_ORTHOPOLY_HPP

// Monic orthogonal polynomials for the Freud weight, built from moments:
//
//   x P_n = P_{n+1} + beta_n P_{n-1},   h_n = <P_n, P_n>,
//   D_n = det(mu_{j+k})_{j,k<n} = prod_{j<n} h_j,   p(n) = [x^{n-2}] P_n.
//
// Two independent routes fill a RecurrenceTable: leading minors of the
// Hankel moment matrix, and a Stieltjes-type iteration on explicit
// coefficient vectors with moment-space inner products.

#include <optional>
#include <string>
#include <vector>

#include "freud/core.hpp"
#include "freud/moments.hpp"
#include "freud/real.hpp"

namespace freud {

enum class Method { hankel_ratio, stieltjes };

inline std::string to_string(Method m) { return m == Method::hankel_ratio ? "hankel-ratio" : "stieltjes"; }

inline Method parse_method(std::string_view s) {
  if (s == "hankel-ratio") return Method::hankel_ratio;
  if (s == "stieltjes") return Method::stieltjes;
  throw UsageError("unknown method '" + std::string(s) + "'");
}

/// beta_0..beta_{n_max}, ln h_0..ln h_{n_max}, p(0)..p(n_max) and
/// ln D_0..ln D_{n_max+1}. Error arrays are zero unless the table came
/// out of validated_recurrence (beta_err relative, the rest absolute).
struct RecurrenceTable {
  RecurrenceTable(Weight w, long n, Method how, long precision)
      : weight(std::move(w)), n_max(n), method(how), bits(precision) {}

  Weight weight;
  long n_max = 0;
  Method method = Method::stieltjes;
  long bits = 0;
  std::vector<Real> beta;
  std::vector<Real> lnh;
  std::vector<Real> p;
  std::vector<Real> lnD;
  std::vector<Real> beta_err;
  std::vector<Real> lnh_err;
  std::vector<Real> p_err;
  std::vector<Real> lnD_err;

  /// Relative error estimate of beta_n, floored at the rounding level.
  long double beta_rel_err(long n) const {
    long double floor_err = std::ldexp(1.0L, static_cast<int>(8 - bits));
    if (beta_err.empty()) return floor_err;
    return std::max(floor_err, beta_err.at(static_cast<std::size_t>(n)).to_ld());
  }
  long double p_abs_err(long n) const {
    long double floor_err = std::ldexp(1.0L, static_cast<int>(8 - bits)) * (1 + std::fabs(p.at(n).to_ld()));
    if (p_err.empty()) return floor_err;
    return std::max(floor_err, p_err.at(static_cast<std::size_t>(n)).to_ld());
  }
};

/// Monic polynomial; coeffs[j] multiplies x^j. Slots of the wrong parity
/// are never written and stay exactly zero.
struct MonicPolynomial {
  std::vector<Real> coeffs;

  long degree() const { return static_cast<long>(coeffs.size()) - 1; }
  const Real& operator[](long j) const { return coeffs.at(static_cast<std::size_t>(j)); }
  Real evaluate(const Real& x) const {
    Real acc(0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
};

/// Bilinear form <a, b> = sum_{i,j} a_i b_j mu_{i+j}.
inline Real inner_product(const std::vector<Real>& a, const std::vector<Real>& b, const MomentTable& mu) {
  const long da = static_cast<long>(a.size()) - 1;
  const long db = static_cast<long>(b.size()) - 1;
  if (da + db > mu.max_index()) {
    throw std::out_of_range("inner_product needs moments up to order " + std::to_string(da + db));
  }
  Real sum(0);
  Real row;
  for (long i = 0; i <= da; ++i) {
    if (a[i].is_zero()) continue;
    row = Real(0);
    for (long j = (i % 2 == 0 ? 0 : 1); j <= db; j += 2) {
      if (b[j].is_zero()) continue;
      row += b[j] * mu[i + j];
    }
    sum += a[i] * row;
  }
  return sum;
}

inline Real inner_product(const MonicPolynomial& a, const MonicPolynomial& b, const MomentTable& mu) {
  return inner_product(a.coeffs, b.coeffs, mu);
}

/// x^k * P as a coefficient vector.
inline std::vector<Real> shift_up(const std::vector<Real>& c, long k) {
  std::vector<Real> out(c.size() + static_cast<std::size_t>(k), Real(0));
  for (std::size_t j = 0; j < c.size(); ++j) out[j + static_cast<std::size_t>(k)] = c[j];
  return out;
}

namespace detail {

/// Pivots d_0..d_{order-1} of the unpivoted LDL^T factorization of the
/// Hankel moment matrix; D_n = d_0 ... d_{n-1}. The matrix is positive
/// definite, so a nonpositive pivot means the precision ran out.
inline std::vector<Real> hankel_pivots(const MomentTable& mu, long order) {
  if (2 * order - 2 > mu.max_index()) {
    throw std::out_of_range("Hankel matrix of order " + std::to_string(order) + " needs moments up to " +
                            std::to_string(2 * order - 2));
  }
  const auto n = static_cast<std::size_t>(order);
  // L stored row-major, lower triangle; entries with i+j odd vanish.
  std::vector<std::vector<Real>> L(n);
  std::vector<Real> d(n);
  Real acc;
  for (std::size_t i = 0; i < n; ++i) {
    L[i].resize(i + 1);
    for (std::size_t j = (i % 2); j <= i; j += 2) {
      acc = mu[static_cast<long>(i + j)];
      for (std::size_t k = (j % 2); k < j; k += 2) acc -= L[i][k] * L[j][k] * d[k];
      if (j == i) {
        if (acc.sign() <= 0) {
          throw PrecisionExhausted("Hankel pivot " + std::to_string(i) + " is not positive at " +
                                   std::to_string(working_precision()) + " bits");
        }
        d[i] = acc;
        L[i][i] = Real(1);
      } else {
        L[i][j] = acc / d[j];
      }
    }
  }
  return d;
}

inline void fill_p_from_beta(RecurrenceTable& rec) {
  rec.p.assign(static_cast<std::size_t>(rec.n_max + 1), Real(0));
  Real running(0);
  for (long n = 1; n <= rec.n_max; ++n) {
    running += rec.beta[n - 1];
    rec.p[n] = -running;
  }
}

}  // namespace detail

/// ln D_n from the n x n moment matrix; D_0 = 1.
inline Real hankel_log_determinant(const MomentTable& mu, long n) {
  if (n < 0) throw DomainError("hankel_log_determinant: n must be nonnegative");
  if (n == 0) return Real(0);
  Real acc(0);
  for (const auto& d : detail::hankel_pivots(mu, n)) acc += log(d);
  return acc;
}

/// Table from leading Hankel minors: beta_n = D_{n+1} D_{n-1} / D_n^2.
inline RecurrenceTable recurrence_table_hankel(const MomentTable& mu, long n_max) {
  if (n_max < 0) throw DomainError("n_max must be nonnegative");
  RecurrenceTable rec(mu.weight(), n_max, Method::hankel_ratio, static_cast<long>(working_precision()));
  const auto pivots = detail::hankel_pivots(mu, n_max + 1);
  rec.lnD.reserve(static_cast<std::size_t>(n_max + 2));
  rec.lnD.emplace_back(0);
  for (const auto& d : pivots) rec.lnD.push_back(rec.lnD.back() + log(d));
  rec.lnh.resize(static_cast<std::size_t>(n_max + 1));
  rec.beta.resize(static_cast<std::size_t>(n_max + 1));
  rec.beta[0] = Real(0);
  for (long n = 0; n <= n_max; ++n) {
    rec.lnh[n] = rec.lnD[n + 1] - rec.lnD[n];
    if (n >= 1) rec.beta[n] = exp(rec.lnD[n + 1] + rec.lnD[n - 1] - 2 * rec.lnD[n]);
  }
  detail::fill_p_from_beta(rec);
  return rec;
}

/// Coefficient vectors of P_0..P_{n_max} by the three-term recurrence, with
/// h_n = <P_n, P_n> and beta_n = h_n / h_{n-1} from moment-space products.
inline RecurrenceTable recurrence_table_stieltjes(const MomentTable& mu, long n_max) {
  if (n_max < 0) throw DomainError("n_max must be nonnegative");
  if (2 * n_max > mu.max_index()) {
    throw std::out_of_range("stieltjes table to n=" + std::to_string(n_max) + " needs moments up to " +
                            std::to_string(2 * n_max));
  }
  RecurrenceTable rec(mu.weight(), n_max, Method::stieltjes, static_cast<long>(working_precision()));
  const auto N = static_cast<std::size_t>(n_max + 1);
  rec.beta.resize(N);
  rec.lnh.resize(N);
  rec.p.assign(N, Real(0));
  rec.lnD.assign(N + 1, Real(0));

  std::vector<Real> prev;          // P_{n-1}
  std::vector<Real> cur{Real(1)};  // P_n
  Real h_prev;
  for (long n = 0; n <= n_max; ++n) {
    Real h = inner_product(cur, cur, mu);
    if (h.sign() <= 0) {
      throw PrecisionExhausted("norm h_" + std::to_string(n) + " is not positive at " +
                               std::to_string(working_precision()) + " bits");
    }
    rec.beta[n] = n == 0 ? Real(0) : h / h_prev;
    rec.lnh[n] = log(h);
    rec.lnD[n + 1] = rec.lnD[n] + rec.lnh[n];
    if (n >= 2) rec.p[n] = cur[n - 2];
    if (n == n_max) break;
    // P_{n+1} = x P_n - beta_n P_{n-1}, writing only slots of parity n+1.
    std::vector<Real> next(static_cast<std::size_t>(n + 2), Real(0));
    for (long j = (n + 1) % 2; j <= n + 1; j += 2) {
      if (j >= 1) next[j] = cur[j - 1];
      if (n >= 1 && j <= n - 1) next[j] -= rec.beta[n] * prev[j];
    }
    prev = std::move(cur);
    cur = std::move(next);
    h_prev = std::move(h);
  }
  return rec;
}

/// P_n rebuilt from the table's recurrence coefficients.
inline MonicPolynomial polynomial(const RecurrenceTable& rec, long n) {
  if (n < 0 || n > rec.n_max) {
    throw std::out_of_range("polynomial degree " + std::to_string(n) + " outside table");
  }
  std::vector<Real> prev;
  std::vector<Real> cur{Real(1)};
  for (long k = 0; k < n; ++k) {
    std::vector<Real> next(static_cast<std::size_t>(k + 2), Real(0));
    for (long j = (k + 1) % 2; j <= k + 1; j += 2) {
      if (j >= 1) next[j] = cur[j - 1];
      if (k >= 1 && j <= k - 1) next[j] -= rec.beta[k] * prev[j];
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return MonicPolynomial{std::move(cur)};
}

/// Moments and table produced together by validated_recurrence.
struct ValidatedTables {
  MomentTable moments;
  RecurrenceTable table;
};

namespace detail {

inline RecurrenceTable build_table(const MomentTable& mu, long n_max, Method method) {
  return method == Method::stieltjes ? recurrence_table_stieltjes(mu, n_max) : recurrence_table_hankel(mu, n_max);
}

inline std::vector<Real> diffs(const std::vector<Real>& lo, const std::vector<Real>& hi, bool relative) {
  std::vector<Real> out;
  out.reserve(hi.size());
  PrecisionScope scope(64);
  for (std::size_t i = 0; i < hi.size(); ++i) {
    Real d = relative ? rel_diff(lo[i], hi[i]) : abs(hi[i] - lo[i]);
    out.push_back(d);
  }
  return out;
}

}  // namespace detail

/// Builds the table at p and p + 64 bits, starting from precision_for, and
/// doubles p until every beta_n agrees to target_rel_error. The returned
/// table is the higher-precision one, carrying the disagreement as errors.
inline ValidatedTables validated_recurrence(const Weight& w, long n_max, const PrecisionContext& ctx,
                                            Method method = Method::stieltjes, long start_bits = 0) {
  ctx.validate();
  long bits = start_bits > 0 ? start_bits : precision_for(std::max(1L, n_max), w.m(), ctx);
  std::string last_failure;
  for (int attempt = 0; attempt <= ctx.max_escalations; ++attempt, bits *= 2) {
    try {
      std::optional<RecurrenceTable> lo;
      {
        PrecisionScope scope(bits);
        auto mu = moment_table(w, n_max, ctx);
        lo = detail::build_table(mu, n_max, method);
      }
      PrecisionScope scope(bits + 64);
      auto mu = moment_table(w, n_max, ctx);
      auto hi = detail::build_table(mu, n_max, method);
      hi.beta_err = detail::diffs(lo->beta, hi.beta, true);
      hi.lnh_err = detail::diffs(lo->lnh, hi.lnh, false);
      hi.p_err = detail::diffs(lo->p, hi.p, false);
      hi.lnD_err = detail::diffs(lo->lnD, hi.lnD, false);
      Real worst(0);
      for (const auto& e : hi.beta_err) worst = max(worst, e);
      if (worst.to_double() <= ctx.target_rel_error) return {std::move(mu), std::move(hi)};
      last_failure = "beta disagreement " + worst.str(3) + " at " + std::to_string(bits) + " bits";
    } catch (const PrecisionExhausted& e) {
      last_failure = e.what();
    }
  }
  throw PrecisionExhausted("validated_recurrence(m=" + std::to_string(w.m()) + ", t=" + w.t_text() +
                           ", n_max=" + std::to_string(n_max) + ") failed after escalation: " + last_failure);
}

}  // namespace freud

#endif  // FREUD_ORTHOPOLY_HPP
