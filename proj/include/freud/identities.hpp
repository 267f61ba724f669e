#ifndef FREUD_IDENTITIES_HPP
#define FREUD_IDENTITIES_HPP

// Residual validators for the algebraic, difference and differential
// identities satisfied by the recurrence coefficients.
//
// Tolerances are 100 x a first-order error bound propagated from the
// table's per-entry error estimates (see Approx below).

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "freud/orthopoly.hpp"

namespace freud {

struct NRange {
  long lo = 0;
  long hi = 0;
};

struct ResidualReport {
  std::string name;
  int m = 0;
  std::string t;
  long n_lo = 0;
  long n_hi = 0;
  std::vector<long> n;
  std::vector<Real> residuals;
  Real max_residual{0L};
  Real tolerance{0L};
  bool pass = true;
  // Derivative checks only: observed orders log2(r(h)/r(h/2)) and
  // log2(r(h/2)/r(h/4)) per n (NaN where the residual vanishes identically).
  std::vector<std::array<double, 2>> orders;
  bool order_pass = true;
};

/// Value with an absolute error bound carried through first-order
/// propagation plus one rounding per operation.
struct Approx {
  Real v;
  long double e = 0;

  Approx() : v(0L) {}
  Approx(Real value, long double err = 0) : v(std::move(value)), e(err) {}
  Approx(long k) : v(k) {}
  Approx(int k) : v(static_cast<long>(k)) {}

  static long double unit() { return std::ldexp(1.0L, static_cast<int>(1 - working_precision())); }
  static long double mag(const Real& x) { return std::fabs(x.to_ld()); }

  friend Approx operator+(const Approx& a, const Approx& b) {
    Approx r(a.v + b.v);
    r.e = a.e + b.e + unit() * (mag(a.v) + mag(b.v));
    return r;
  }
  friend Approx operator-(const Approx& a, const Approx& b) {
    Approx r(a.v - b.v);
    r.e = a.e + b.e + unit() * (mag(a.v) + mag(b.v));
    return r;
  }
  friend Approx operator-(const Approx& a) { return Approx(-a.v, a.e); }
  friend Approx operator*(const Approx& a, const Approx& b) {
    Approx r(a.v * b.v);
    r.e = mag(a.v) * b.e + mag(b.v) * a.e + a.e * b.e + unit() * mag(r.v);
    return r;
  }
  friend Approx operator*(long k, const Approx& a) {
    Approx r(a.v * k);
    r.e = std::fabs(static_cast<long double>(k)) * a.e + unit() * mag(r.v);
    return r;
  }
  friend Approx operator/(const Approx& a, long k) {
    Approx r(a.v / k);
    r.e = a.e / std::fabs(static_cast<long double>(k)) + unit() * mag(r.v);
    return r;
  }
  Approx& operator+=(const Approx& o) { return *this = *this + o; }
};

namespace detail {

inline Real ld_to_real(long double x) {
  Real r;
  mpfr_set_ld(r.raw(), x, MPFR_RNDN);
  return r;
}

inline Approx beta_at(const RecurrenceTable& rec, long j) {
  if (j < 0) return Approx(0L);  // beta_{-1} only ever multiplies beta_0 = 0
  const Real& b = rec.beta.at(static_cast<std::size_t>(j));
  return Approx(b, rec.beta_rel_err(j) * std::fabs(b.to_ld()));
}

inline Approx p_at(const RecurrenceTable& rec, long j) { return Approx(rec.p.at(static_cast<std::size_t>(j)), rec.p_abs_err(j)); }

inline Approx t_of(const RecurrenceTable& rec) {
  Real t = rec.weight.t();
  return Approx(t, Approx::unit() * std::fabs(t.to_ld()));
}

inline void require_m(const RecurrenceTable& rec, int m, const char* what) {
  if (rec.weight.m() != m) {
    throw UsageError(std::string(what) + " applies to m=" + std::to_string(m) + ", table has m=" +
                     std::to_string(rec.weight.m()));
  }
}

inline NRange resolve(std::optional<NRange> asked, NRange valid, const char* what) {
  NRange r = asked.value_or(valid);
  if (r.lo > r.hi || r.lo < valid.lo || r.hi > valid.hi) {
    throw UsageError(std::string(what) + ": range [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) +
                     "] outside valid [" + std::to_string(valid.lo) + ", " + std::to_string(valid.hi) + "]");
  }
  return r;
}

inline ResidualReport start_report(std::string name, const Weight& w, NRange r) {
  ResidualReport rep;
  rep.name = std::move(name);
  rep.m = w.m();
  rep.t = w.t_text();
  rep.n_lo = r.lo;
  rep.n_hi = r.hi;
  return rep;
}

inline void add_residual(ResidualReport& rep, long n, const Real& residual, long double err_bound) {
  PrecisionScope scope(64);
  Real r = abs(residual);
  rep.n.push_back(n);
  rep.residuals.push_back(r);
  rep.max_residual = max(rep.max_residual, r);
  rep.tolerance = max(rep.tolerance, ld_to_real(100 * err_bound));
}

inline void finish(ResidualReport& rep) { rep.pass = rep.max_residual <= rep.tolerance && rep.order_pass; }

/// Residual = lhs - rhs evaluated by f(n) for each n in range.
template <typename F>
ResidualReport run_check(std::string name, const RecurrenceTable& rec, NRange r, F&& f) {
  PrecisionScope scope(rec.bits);
  auto rep = start_report(std::move(name), rec.weight, r);
  for (long n = r.lo; n <= r.hi; ++n) {
    const Approx res = f(n);
    add_residual(rep, n, res.v, res.e);
  }
  finish(rep);
  return rep;
}

}  // namespace detail

/// Multiplies beta_n by (1 + delta) and re-telescopes p; used to confirm
/// that validators notice a corrupted table.
inline void perturb_beta(RecurrenceTable& rec, long n, double delta) {
  PrecisionScope scope(rec.bits);
  rec.beta.at(static_cast<std::size_t>(n)) *= Real(1) + Real(delta);
  detail::fill_p_from_beta(rec);
}

// ---------------------------------------------------------------------------
// m = 2

/// 4 beta_n (beta_{n-1} + beta_n + beta_{n+1} - t/2) - n.
inline ResidualReport check_dpainleve1(const RecurrenceTable& rec, std::optional<NRange> range = {}) {
  detail::require_m(rec, 2, "check_dpainleve1");
  const NRange r = detail::resolve(range, {1, rec.n_max - 1}, "check_dpainleve1");
  return detail::run_check("dpainleve1", rec, r, [&](long n) {
    using detail::beta_at;
    Approx bn = beta_at(rec, n);
    return 4L * bn * (beta_at(rec, n - 1) + bn + beta_at(rec, n + 1) - detail::t_of(rec) / 2) - Approx(n);
  });
}

/// sum_{j<n}(beta_j + beta_{j+1}) - n t / 2
///   = beta_n [t^2 - 2t(beta_{n-1} + 2 beta_n + beta_{n+1}) + 4(beta_{n-1} + beta_n)(beta_n + beta_{n+1})].
inline ResidualReport check_sum_rule_m2(const RecurrenceTable& rec, std::optional<NRange> range = {}) {
  detail::require_m(rec, 2, "check_sum_rule_m2");
  const NRange r = detail::resolve(range, {1, rec.n_max - 1}, "check_sum_rule_m2");
  PrecisionScope scope(rec.bits);
  using detail::beta_at;
  Approx partial(0L);
  long summed = 0;
  const Approx t = detail::t_of(rec);
  return detail::run_check("sum_rule_m2", rec, r, [&](long n) {
    for (; summed < n; ++summed) partial += beta_at(rec, summed) + beta_at(rec, summed + 1);
    Approx bm = beta_at(rec, n - 1), b = beta_at(rec, n), bp = beta_at(rec, n + 1);
    Approx lhs = partial - Approx(n) * t / 2;
    Approx rhs = b * (t * t - 2L * t * (bm + 2L * b + bp) + 4L * (bm + b) * (b + bp));
    return lhs - rhs;
  });
}

/// p(n) = beta_n/2 + t beta_n^2 - 2 beta_n (beta_{n-1} + beta_n)(beta_n + beta_{n+1}).
inline ResidualReport check_p_identity_m2(const RecurrenceTable& rec, std::optional<NRange> range = {}) {
  detail::require_m(rec, 2, "check_p_identity_m2");
  const NRange r = detail::resolve(range, {0, rec.n_max - 1}, "check_p_identity_m2");
  return detail::run_check("p_identity_m2", rec, r, [&](long n) {
    using detail::beta_at;
    Approx bm = beta_at(rec, n - 1), b = beta_at(rec, n), bp = beta_at(rec, n + 1);
    Approx rhs = b / 2 + detail::t_of(rec) * b * b - 2L * b * (bm + b) * (b + bp);
    return detail::p_at(rec, n) - rhs;
  });
}

/// Second-order difference equation for p alone:
/// (p_{n-1} - p_{n+1})[n + 2t(p_n - p_{n+1}) - 4(p_{n-1} - p_n)(p_n - p_{n+1})]
///   + p_n + p_{n+1} - 2t(p_n - p_{n+1})^2 = 0.
inline ResidualReport check_p_difference_eq_m2(const RecurrenceTable& rec, std::optional<NRange> range = {}) {
  detail::require_m(rec, 2, "check_p_difference_eq_m2");
  const NRange r = detail::resolve(range, {1, rec.n_max - 1}, "check_p_difference_eq_m2");
  return detail::run_check("p_difference_eq_m2", rec, r, [&](long n) {
    using detail::p_at;
    Approx pm = p_at(rec, n - 1), p = p_at(rec, n), pp = p_at(rec, n + 1);
    Approx t = detail::t_of(rec);
    Approx d0 = p - pp, d1 = pm - p;
    return (pm - pp) * (Approx(n) + 2L * t * d0 - 4L * d1 * d0) + p + pp - 2L * t * d0 * d0;
  });
}

// ---------------------------------------------------------------------------
// m = 3

/// 6 beta_n (beta_{n-2}beta_{n-1} + beta_{n-1}^2 + 2beta_{n-1}beta_n + beta_{n-1}beta_{n+1}
///   + beta_n^2 + 2beta_n beta_{n+1} + beta_{n+1}^2 + beta_{n+1}beta_{n+2}) - 2t beta_n - n.
inline ResidualReport check_dpainleve_hierarchy_m3(const RecurrenceTable& rec, std::optional<NRange> range = {}) {
  detail::require_m(rec, 3, "check_dpainleve_hierarchy_m3");
  const NRange r = detail::resolve(range, {1, rec.n_max - 2}, "check_dpainleve_hierarchy_m3");
  return detail::run_check("dpainleve_hierarchy_m3", rec, r, [&](long n) {
    using detail::beta_at;
    Approx b2 = beta_at(rec, n - 2), b1 = beta_at(rec, n - 1), b = beta_at(rec, n);
    Approx c1 = beta_at(rec, n + 1), c2 = beta_at(rec, n + 2);
    Approx inner = b2 * b1 + b1 * b1 + 2L * b1 * b + b1 * c1 + b * b + 2L * b * c1 + c1 * c1 + c1 * c2;
    return 6L * b * inner - 2L * detail::t_of(rec) * b - Approx(n);
  });
}

/// p(n) = beta_n/2 [1 + 2t beta_n - 6 beta_n^2 (beta_{n-1} + beta_n + beta_{n+1})
///   - 6(beta_n + beta_{n+1}) beta_{n-1}(beta_{n-2} + beta_{n-1} + beta_n)
///   - 6(beta_{n-1} + beta_n) beta_{n+1}(beta_n + beta_{n+1} + beta_{n+2})].
inline ResidualReport check_p_identity_m3(const RecurrenceTable& rec, std::optional<NRange> range = {}) {
  detail::require_m(rec, 3, "check_p_identity_m3");
  const NRange r = detail::resolve(range, {1, rec.n_max - 2}, "check_p_identity_m3");
  return detail::run_check("p_identity_m3", rec, r, [&](long n) {
    using detail::beta_at;
    Approx b2 = beta_at(rec, n - 2), b1 = beta_at(rec, n - 1), b = beta_at(rec, n);
    Approx c1 = beta_at(rec, n + 1), c2 = beta_at(rec, n + 2);
    Approx bracket = Approx(1L) + 2L * detail::t_of(rec) * b - 6L * b * b * (b1 + b + c1) -
                     6L * (b + c1) * b1 * (b2 + b1 + b) - 6L * (b1 + b) * c1 * (b + c1 + c2);
    return detail::p_at(rec, n) - b * bracket / 2;
  });
}

// ---------------------------------------------------------------------------
// Ladder functions A_n(x), B_n(x)

/// Coefficients (by power of x) of A_n and B_n from their integral
/// definitions, next to the closed forms for m = 2, 3.
struct LadderData {
  int m = 0;
  long n = 0;
  std::vector<Real> A;
  std::vector<Real> B;
  std::vector<long double> A_err;
  std::vector<long double> B_err;
  std::vector<Real> A_closed;
  std::vector<Real> B_closed;
  // m = 3 auxiliaries: integral definitions and their beta closed forms.
  Real r{0L}, R{0L}, r_closed{0L}, R_closed{0L};
  long double r_err = 0, R_err = 0;
};

/// Builds LadderData for a run of n from one (moments, table) pair,
/// caching the polynomials.
class LadderBuilder {
 public:
  LadderBuilder(const RecurrenceTable& rec, const MomentTable& mu) : rec_(rec), mu_(mu) {
    PrecisionScope scope(rec_.bits);
    polys_.reserve(static_cast<std::size_t>(rec_.n_max + 1));
    for (long k = 0; k <= rec_.n_max; ++k) polys_.push_back(polynomial(rec_, k).coeffs);
  }

  int m() const { return rec_.weight.m(); }
  /// Largest n for which the integral definitions are available.
  long n_max() const {
    const long by_moments = (mu_.max_index() - (2 * m() - 2)) / 2;
    return std::min(rec_.n_max, by_moments);
  }

  /// 2m <y^a P_n, P_k> / h_k.
  Real weighted(long a, long n, long k) const {
    Real ip = inner_product(shift_up(polys_[static_cast<std::size_t>(n)], a), polys_[static_cast<std::size_t>(k)], mu_);
    return ip * (2 * m()) / exp(rec_.lnh[static_cast<std::size_t>(k)]);
  }

  LadderData build(long n) const {
    if (n < 0 || n > n_max()) {
      throw UsageError("compute_ladder: n=" + std::to_string(n) + " outside [0, " + std::to_string(n_max()) + "]");
    }
    PrecisionScope scope(rec_.bits);
    const int mm = m();
    LadderData d;
    d.m = mm;
    d.n = n;
    auto eval = [&](std::vector<Real>& A, std::vector<Real>& B) {
      A.assign(static_cast<std::size_t>(2 * mm - 1), Real(0));
      B.assign(static_cast<std::size_t>(2 * mm - 2), Real(0));
      for (long k = 0; k <= 2 * mm - 2; k += 2) A[k] = weighted(2 * mm - 2 - k, n, n);
      A[0] -= 2 * rec_.weight.t();
      if (n >= 1) {
        for (long k = 1; k <= 2 * mm - 3; k += 2) B[k] = weighted(2 * mm - 2 - k, n, n - 1);
      }
    };
    eval(d.A, d.B);
    std::vector<Real> A_lo, B_lo;
    {
      PrecisionScope lo(rec_.bits - 64);
      eval(A_lo, B_lo);
    }
    auto spread = [](const std::vector<Real>& hi, const std::vector<Real>& lo) {
      std::vector<long double> e(hi.size());
      for (std::size_t i = 0; i < hi.size(); ++i) {
        PrecisionScope s(64);
        e[i] = abs(hi[i] - lo[i]).to_ld();
      }
      return e;
    };
    d.A_err = spread(d.A, A_lo);
    d.B_err = spread(d.B, B_lo);

    if (mm == 3) {
      d.R = d.A[0] + 2 * rec_.weight.t();
      d.R_err = d.A_err[0];
      d.r = d.B[1];
      d.r_err = d.B_err[1];
    }
    if ((mm == 2 && n + 1 <= rec_.n_max) || (mm == 3 && n + 2 <= rec_.n_max)) fill_closed(d);
    return d;
  }

  const RecurrenceTable& table() const { return rec_; }

 private:
  Real beta(long j) const { return j < 0 ? Real(0) : rec_.beta[static_cast<std::size_t>(j)]; }
  Real r_closed(long j) const { return 6 * beta(j) * (beta(j - 1) + beta(j) + beta(j + 1)); }

  void fill_closed(LadderData& d) const {
    const long n = d.n;
    const Real t = rec_.weight.t();
    if (d.m == 2) {
      d.A_closed = {4 * (beta(n) + beta(n + 1)) - 2 * t, Real(0), Real(4)};
      d.B_closed = {Real(0), 4 * beta(n)};
    } else {
      d.r_closed = r_closed(n);
      d.R_closed = r_closed(n) + r_closed(n + 1);
      d.A_closed = {d.R_closed - 2 * t, Real(0), 6 * (beta(n) + beta(n + 1)), Real(0), Real(6)};
      d.B_closed = {Real(0), d.r_closed, Real(0), 6 * beta(n)};
    }
  }

  const RecurrenceTable& rec_;
  const MomentTable& mu_;
  std::vector<std::vector<Real>> polys_;
};

inline LadderData compute_ladder(const RecurrenceTable& rec, const MomentTable& mu, long n) {
  return LadderBuilder(rec, mu).build(n);
}

namespace detail {

using ApproxPoly = std::vector<Approx>;

inline ApproxPoly poly_of(const std::vector<Real>& c, const std::vector<long double>& e) {
  ApproxPoly p;
  for (std::size_t i = 0; i < c.size(); ++i) p.emplace_back(c[i], e.empty() ? 0 : e[i]);
  return p;
}
inline ApproxPoly padd(ApproxPoly a, const ApproxPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), Approx(0L));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = a[i] + b[i];
  return a;
}
inline ApproxPoly pneg(ApproxPoly a) {
  for (auto& c : a) c = -c;
  return a;
}
inline ApproxPoly pmul(const ApproxPoly& a, const ApproxPoly& b) {
  ApproxPoly out(a.size() + b.size() - 1, Approx(0L));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].v.is_zero() && a[i].e == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j].v.is_zero() && b[j].e == 0) continue;
      out[i + j] = out[i + j] + a[i] * b[j];
    }
  }
  return out;
}
inline ApproxPoly pscale(const ApproxPoly& a, const Approx& s) {
  ApproxPoly out;
  for (const auto& c : a) out.push_back(c * s);
  return out;
}
inline ApproxPoly pshift(const ApproxPoly& a) {
  ApproxPoly out{Approx(0L)};
  out.insert(out.end(), a.begin(), a.end());
  return out;
}
/// Largest coefficient residual and the matching error bound.
inline std::pair<Real, long double> pworst(const ApproxPoly& a) {
  Real worst(0);
  long double err = 0;
  for (const auto& c : a) {
    worst = max(worst, abs(c.v));
    err = std::max(err, c.e);
  }
  return {worst, err};
}

inline ApproxPoly vprime(const Weight& w) {
  ApproxPoly out;
  for (const auto& c : w.potential_derivative()) out.emplace_back(c, Approx::unit() * std::fabs(c.to_ld()));
  return out;
}

}  // namespace detail

/// Integral definitions vs closed forms, coefficientwise; for m = 3 also
/// r_n, R_n against their beta expressions and R_n - r_n - r_{n+1}.
inline ResidualReport check_ladder_closed_forms(const RecurrenceTable& rec, const MomentTable& mu,
                                                std::optional<NRange> range = {}) {
  const int m = rec.weight.m();
  if (m != 2 && m != 3) throw UsageError("ladder closed forms are known for m=2 and m=3 only");
  LadderBuilder lb(rec, mu);
  const long top = std::min(lb.n_max() - (m == 3 ? 1 : 0), rec.n_max - (m == 3 ? 2 : 1));
  const NRange r = detail::resolve(range, {0, top}, "check_ladder_closed_forms");
  PrecisionScope scope(rec.bits);
  auto rep = detail::start_report("ladder_closed_forms_m" + std::to_string(m), rec.weight, r);
  for (long n = r.lo; n <= r.hi; ++n) {
    const auto d = lb.build(n);
    Real worst(0);
    long double err = 0;
    auto cmp = [&](const std::vector<Real>& a, const std::vector<long double>& ea, const std::vector<Real>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        worst = max(worst, abs(a[i] - b[i]));
        err = std::max(err, ea[i] + Approx::unit() * 64 * (1 + std::fabs(b[i].to_ld())));
      }
    };
    cmp(d.A, d.A_err, d.A_closed);
    cmp(d.B, d.B_err, d.B_closed);
    if (m == 3) {
      const auto next = lb.build(n + 1);
      worst = max(worst, abs(d.r - d.r_closed));
      worst = max(worst, abs(d.R - d.R_closed));
      worst = max(worst, abs(d.R - d.r - next.r));
      err = std::max(err, d.R_err + d.r_err + next.r_err + Approx::unit() * 64 * (1 + std::fabs(d.R.to_ld())));
    }
    detail::add_residual(rep, n, worst, err);
  }
  detail::finish(rep);
  return rep;
}

/// (S1) B_{n+1} + B_n - x A_n + v' and (S2') B_n^2 + v' B_n + sum_{j<n} A_j
/// - beta_n A_n A_{n-1}, both coefficientwise in x with A, B from their
/// integral definitions. The partial sum of A_j is carried incrementally.
inline std::vector<ResidualReport> check_S1_S2prime(const RecurrenceTable& rec, const MomentTable& mu,
                                                    std::optional<NRange> range = {}) {
  LadderBuilder lb(rec, mu);
  const long top = std::min(lb.n_max() - 1, rec.n_max);
  const NRange r = detail::resolve(range, {1, top}, "check_S1_S2prime");
  PrecisionScope scope(rec.bits);
  using namespace detail;
  auto s1 = start_report("S1", rec.weight, r);
  auto s2 = start_report("S2prime", rec.weight, r);
  const ApproxPoly vp = vprime(rec.weight);

  auto A_of = [&](const LadderData& d) { return poly_of(d.A, d.A_err); };
  auto B_of = [&](const LadderData& d) { return poly_of(d.B, d.B_err); };

  ApproxPoly sumA{Approx(0L)};
  LadderData prev = lb.build(0);
  for (long j = 0; j + 1 < r.lo; ++j) {
    sumA = padd(sumA, A_of(prev));
    prev = lb.build(j + 1);
  }
  // prev holds A_{n-1}; sumA holds sum_{j < n-1} A_j.
  for (long n = r.lo; n <= r.hi; ++n) {
    sumA = padd(sumA, A_of(prev));
    const LadderData cur = lb.build(n);
    const LadderData next = lb.build(n + 1);
    const ApproxPoly A = A_of(cur), B = B_of(cur);

    ApproxPoly e1 = padd(padd(padd(B_of(next), B), pneg(pshift(A))), vp);
    auto [w1, err1] = pworst(e1);
    add_residual(s1, n, w1, err1);

    ApproxPoly e2 = padd(padd(pmul(B, B), pmul(vp, B)), sumA);
    e2 = padd(e2, pneg(pscale(pmul(A, A_of(prev)), beta_at(rec, n))));
    auto [w2, err2] = pworst(e2);
    add_residual(s2, n, w2, err2);
    prev = cur;
  }
  finish(s1);
  finish(s2);
  return {s1, s2};
}

/// The four (S2') consequences for m = 3, with r_n, R_n taken from their
/// integral definitions:
///   s5: 6beta_n^2 + r_n - 6beta_n(beta_{n-1} + 2beta_n + beta_{n+1})
///   s6: 2beta_n r_n - 2t beta_n + n - beta_n[R_{n-1} + R_n - 4t + 6(beta_{n-1}+beta_n)(beta_n+beta_{n+1})]
///   s7: r_n^2 - 2t r_n + 6 sum_{j<n}(beta_j+beta_{j+1})
///       - 6beta_n[(beta_n+beta_{n+1})(R_{n-1}-2t) + (beta_{n-1}+beta_n)(R_n-2t)]
///   sum_R: sum_{j<n} R_j - 2nt - beta_n(R_n - 2t)(R_{n-1} - 2t)
inline std::vector<ResidualReport> check_m3_four_equalities(const RecurrenceTable& rec, const MomentTable& mu,
                                                            std::optional<NRange> range = {}) {
  detail::require_m(rec, 3, "check_m3_four_equalities");
  LadderBuilder lb(rec, mu);
  const long top = std::min(lb.n_max(), rec.n_max - 1);
  const NRange r = detail::resolve(range, {1, top}, "check_m3_four_equalities");
  PrecisionScope scope(rec.bits);
  using namespace detail;
  std::vector<ResidualReport> reps;
  for (const char* name : {"m3_s5", "m3_s6", "m3_s7", "m3_sum_R"}) reps.push_back(start_report(name, rec.weight, r));

  const Approx t = t_of(rec);
  std::vector<Approx> rr, RR;  // r_j, R_j for j = 0..r.hi
  for (long j = 0; j <= r.hi; ++j) {
    const auto d = lb.build(j);
    rr.emplace_back(d.r, d.r_err);
    RR.emplace_back(d.R, d.R_err);
  }
  Approx sum_beta(0L), sum_R(0L);
  for (long j = 0; j + 1 < r.lo; ++j) {
    sum_beta += beta_at(rec, j) + beta_at(rec, j + 1);
    sum_R += RR[j];
  }
  for (long n = r.lo; n <= r.hi; ++n) {
    sum_beta += beta_at(rec, n - 1) + beta_at(rec, n);
    sum_R += RR[n - 1];
    const Approx bm = beta_at(rec, n - 1), b = beta_at(rec, n), bp = beta_at(rec, n + 1);
    const Approx& rn = rr[n];
    const Approx& Rn = RR[n];
    const Approx& Rm = RR[n - 1];
    std::array<Approx, 4> res{
        6L * b * b + rn - 6L * b * (bm + 2L * b + bp),
        2L * b * rn - 2L * t * b + Approx(n) - b * (Rm + Rn - 4L * t + 6L * (bm + b) * (b + bp)),
        rn * rn - 2L * t * rn + 6L * sum_beta - 6L * b * ((b + bp) * (Rm - 2L * t) + (bm + b) * (Rn - 2L * t)),
        sum_R - 2L * Approx(n) * t - b * (Rn - 2L * t) * (Rm - 2L * t),
    };
    for (std::size_t k = 0; k < 4; ++k) add_residual(reps[k], n, res[k].v, res[k].e);
  }
  for (auto& rep : reps) finish(rep);
  return reps;
}

// ---------------------------------------------------------------------------
// t-derivative identities by central differences

struct FdOptions {
  /// Base step; default (target_rel_error)^{1/3} (|t| + 1).
  std::optional<double> h;
  /// Perturb beta_n of the table at t by a relative amount.
  std::optional<std::pair<long, double>> perturb;
};

/// Tables at t and t +- h, t +- h/2, t +- h/4.
struct FdStencil {
  Real h{0L};
  std::optional<RecurrenceTable> centre;
  // plus[k], minus[k] at offsets h / 2^k.
  std::vector<RecurrenceTable> plus, minus;
};

inline FdStencil build_stencil(const Weight& w, long n_max, const PrecisionContext& ctx, const FdOptions& opt) {
  FdStencil s;
  {
    PrecisionScope scope(kParameterBits);
    const double base = opt.h.value_or(std::cbrt(ctx.target_rel_error) * (std::fabs(w.t().to_double()) + 1.0));
    if (!(base > 0)) throw UsageError("finite-difference step must be positive");
    s.h = Real::parse(Real(base).str(17));
  }
  auto table_at = [&](const Real& t) { return validated_recurrence(Weight(w.m(), t), n_max, ctx).table; };
  s.centre.emplace(validated_recurrence(w, n_max, ctx).table);
  for (int k = 0; k < 3; ++k) {
    PrecisionScope scope(kParameterBits);
    const Real step = ldexp(s.h, -k);
    s.plus.push_back(table_at(w.t_exact() + step));
    s.minus.push_back(table_at(w.t_exact() - step));
  }
  if (opt.perturb) perturb_beta(*s.centre, opt.perturb->first, opt.perturb->second);
  return s;
}

namespace detail {

/// f(table, n) -> Approx; rhs(centre, n) -> Approx.
template <typename F, typename G>
ResidualReport run_fd(std::string name, const Weight& w, const std::vector<long>& n_list, const FdStencil& s, F&& f,
                      G&& rhs) {
  const auto& c = *s.centre;
  PrecisionScope scope(c.bits);
  NRange span{n_list.empty() ? 0 : *std::min_element(n_list.begin(), n_list.end()),
              n_list.empty() ? 0 : *std::max_element(n_list.begin(), n_list.end())};
  auto rep = start_report(std::move(name), w, span);
  for (long n : n_list) {
    std::array<Real, 3> D;
    std::array<long double, 3> De{};
    for (int k = 0; k < 3; ++k) {
      const Real hk = ldexp(s.h, -k);
      Approx fp = f(s.plus[k], n), fm = f(s.minus[k], n);
      D[k] = (fp.v - fm.v) / (2 * hk);
      De[k] = (fp.e + fm.e) / (2 * hk.to_ld()) + Approx::unit() * std::fabs(D[k].to_ld());
    }
    const Approx target = rhs(c, n);
    std::array<Real, 3> r;
    for (int k = 0; k < 3; ++k) r[k] = abs(D[k] - target.v);
    std::array<double, 2> ord{NAN, NAN};
    if (!(r[0].is_zero() && r[1].is_zero() && r[2].is_zero())) {
      for (int k = 0; k < 2; ++k) ord[k] = log2(r[k] / r[k + 1]).to_double();
      for (double o : ord) {
        if (!(std::fabs(o - 2.0) <= 0.3)) rep.order_pass = false;
      }
    }
    rep.orders.push_back(ord);
    // Richardson on the two finest steps; the change from the coarser
    // extrapolation estimates what is left of the truncation error.
    const Real R1 = (4 * D[1] - D[0]) / 3;
    const Real R2 = (4 * D[2] - D[1]) / 3;
    const long double trunc = abs(R2 - R1).to_ld();
    const long double prop = (4 * De[2] + De[1]) / 3 + target.e;
    add_residual(rep, n, R2 - target.v, prop + trunc);
  }
  finish(rep);
  return rep;
}

inline long fd_table_size(const std::vector<long>& n_list) {
  if (n_list.empty()) throw UsageError("derivative check needs at least one n");
  long top = 0;
  for (long n : n_list) {
    if (n < 0) throw UsageError("derivative check: negative n");
    top = std::max(top, n);
  }
  return top + 1;
}

}  // namespace detail

/// beta_n'(t) = beta_n (beta_{n+1} - beta_{n-1}).
inline ResidualReport check_volterra(const Weight& w, const std::vector<long>& n_list, const PrecisionContext& ctx,
                                     const FdOptions& opt = {}) {
  const auto s = build_stencil(w, detail::fd_table_size(n_list), ctx, opt);
  using detail::beta_at;
  return detail::run_fd(
      "volterra", w, n_list, s, [](const RecurrenceTable& rec, long n) { return beta_at(rec, n); },
      [](const RecurrenceTable& rec, long n) {
        return beta_at(rec, n) * (beta_at(rec, n + 1) - beta_at(rec, n - 1));
      });
}

/// d/dt ln h_n = beta_n + beta_{n+1}.
inline ResidualReport check_lnh_derivative(const Weight& w, const std::vector<long>& n_list,
                                           const PrecisionContext& ctx, const FdOptions& opt = {}) {
  const auto s = build_stencil(w, detail::fd_table_size(n_list), ctx, opt);
  using detail::beta_at;
  return detail::run_fd(
      "lnh_derivative", w, n_list, s,
      [](const RecurrenceTable& rec, long n) {
        return Approx(rec.lnh[static_cast<std::size_t>(n)], rec.lnh_err.empty() ? 0 : rec.lnh_err[n].to_ld());
      },
      [](const RecurrenceTable& rec, long n) { return beta_at(rec, n) + beta_at(rec, n + 1); });
}

/// d/dt p(n, t) = -beta_n beta_{n-1}.
inline ResidualReport check_dp_dt(const Weight& w, const std::vector<long>& n_list, const PrecisionContext& ctx,
                                  const FdOptions& opt = {}) {
  const auto s = build_stencil(w, detail::fd_table_size(n_list), ctx, opt);
  using detail::beta_at;
  return detail::run_fd(
      "dp_dt", w, n_list, s, [](const RecurrenceTable& rec, long n) { return detail::p_at(rec, n); },
      [](const RecurrenceTable& rec, long n) { return -(beta_at(rec, n) * beta_at(rec, n - 1)); });
}

// ---------------------------------------------------------------------------
// Forward iteration of discrete Painleve I

struct InstabilityReport {
  int m = 2;
  std::string t;
  long start_bits = 0;
  long n_max = 0;
  /// First n with |forward - exact| > 10% of exact; -1 if none up to n_max.
  long divergence_index = -1;
  std::vector<Real> relative_deviation;
};

/// Iterates beta_{n+1} = n / (4 beta_n) - beta_n - beta_{n-1} + t/2 from the
/// exact beta_0 = 0 and beta_1 rounded to start_bits, and compares with
/// the exact table.
inline InstabilityReport demo_forward_instability(const RecurrenceTable& exact, long start_bits,
                                                  std::optional<long> n_max = {}) {
  detail::require_m(exact, 2, "demo_forward_instability");
  if (start_bits < 16) throw UsageError("start precision must be at least 16 bits");
  InstabilityReport rep;
  rep.t = exact.weight.t_text();
  rep.start_bits = start_bits;
  rep.n_max = std::min(n_max.value_or(exact.n_max), exact.n_max);
  PrecisionScope scope(start_bits);
  Real prev(0);
  Real cur = exact.beta[1];
  cur.round_to(start_bits);
  const Real half_t = exact.weight.t() / 2;
  rep.relative_deviation.push_back(Real(0));
  for (long n = 1; n <= rep.n_max; ++n) {
    Real dev;
    {
      PrecisionScope s(64);
      dev = rel_diff(cur, exact.beta[n]);
      if (!dev.is_finite()) dev = Real(1e300);
    }
    rep.relative_deviation.push_back(dev);
    if (rep.divergence_index < 0 && (dev > Real(0.1) || cur.sign() <= 0)) {
      rep.divergence_index = n;
      break;
    }
    if (n == rep.n_max) break;
    Real next = Real(n) / (4 * cur) - cur - prev + half_t;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return rep;
}

// ---------------------------------------------------------------------------

/// Every table-only validator applicable to the table's m.
inline std::vector<ResidualReport> algebraic_checks(const RecurrenceTable& rec, const MomentTable& mu,
                                                    std::optional<long> n_top = {}) {
  std::vector<ResidualReport> out;
  const int m = rec.weight.m();
  auto cap = [&](long hi) { return NRange{1, n_top ? std::min(*n_top, hi) : hi}; };
  if (m == 2) {
    out.push_back(check_dpainleve1(rec, cap(rec.n_max - 1)));
    out.push_back(check_sum_rule_m2(rec, cap(rec.n_max - 1)));
    out.push_back(check_p_identity_m2(rec, cap(rec.n_max - 1)));
    out.push_back(check_p_difference_eq_m2(rec, cap(rec.n_max - 1)));
  } else if (m == 3) {
    out.push_back(check_dpainleve_hierarchy_m3(rec, cap(rec.n_max - 2)));
    out.push_back(check_p_identity_m3(rec, cap(rec.n_max - 2)));
    LadderBuilder lb(rec, mu);
    for (auto& r : check_m3_four_equalities(rec, mu, cap(std::min(lb.n_max(), rec.n_max - 1)))) out.push_back(r);
  }
  return out;
}

}  // namespace freud

#endif  // FREUD_IDENTITIES_HPP
