#ifndef FREUD_MOMENTS_HPP
#define FREUD_MOMENTS_HPP

// Moments mu_j(t) = \int x^j exp(-x^{2m} + t x^2) dx.
//
// Expanding exp(t x^2) termwise gives
//
//   mu_{2k}(t) = (1/m) sum_{i>=0} t^i / i! * Gamma((2k + 2i + 1) / (2m)),
//
// which is entire in t. The Gamma values depend on k + i only, so a single
// ladder G[j] = Gamma((2j+1)/(2m)) serves a whole table; it is filled from
// the m base values using Gamma(a+1) = a Gamma(a).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "freud/core.hpp"
#include "freud/real.hpp"

namespace freud {

/// G[j] = Gamma((2j+1)/(2m)) at a fixed precision, grown on demand.
class GammaLadder {
 public:
  GammaLadder(int m, long bits) : m_(m), bits_(bits) {}

  const Real& operator[](std::size_t j) {
    if (j >= values_.size()) extend(j);
    return values_[j];
  }
  long bits() const { return bits_; }

  /// Rebuilds the ladder if it is held at fewer than `bits` bits.
  void ensure_bits(long bits) {
    if (bits <= bits_) return;
    bits_ = bits;
    values_.clear();
  }

 private:
  void extend(std::size_t j) {
    PrecisionScope scope(bits_);
    values_.reserve(j + 1);
    while (values_.size() <= j) {
      const long q = static_cast<long>(values_.size());
      if (q < m_) {
        values_.push_back(gamma_at(Rational(2 * q + 1, 2 * m_)));
      } else {
        const long base = q - m_;
        values_.push_back(values_[base] * (2 * base + 1) / (2L * m_));
      }
    }
  }

  int m_;
  long bits_;
  std::vector<Real> values_;
};

/// Outcome of one Gamma-series summation.
struct MomentValue {
  Real value;
  Real rel_err;
  long terms = 0;
};

namespace detail {

inline constexpr long kMaxSeriesTerms = 1'000'000;

/// Sums the Gamma series for mu_{2k} with `guard` extra bits, returning the
/// result and the measured cancellation in bits.
inline MomentValue sum_moment_series(long k, int m, const Real& t_exact, GammaLadder& ladder,
                                     long bits, long guard, long& cancellation) {
  const long wp = bits + guard;
  ladder.ensure_bits(wp + 16);
  PrecisionScope scope(wp);
  Real t;
  mpfr_set(t.raw(), t_exact.raw(), MPFR_RNDN);
  Real sum(0);
  Real coef(1);  // t^i / i!
  Real max_term(0);
  const Real eps = pow2(-wp);

  if (t.is_zero()) {
    sum = ladder[static_cast<std::size_t>(k)];
    cancellation = 0;
    return {sum / m, eps, 1};
  }

  Real prev_ratio(1000);
  for (long i = 0; i < kMaxSeriesTerms; ++i) {
    Real term = coef * ladder[static_cast<std::size_t>(k + i)];
    sum += term;
    Real mag = abs(term);
    if (mag > max_term) max_term = mag;

    Real next_coef = coef * t / (i + 1);
    Real next_term = next_coef * ladder[static_cast<std::size_t>(k + i + 1)];
    Real ratio_now = abs(next_term) / mag;
    // Once the term ratio has dropped below 1/2 and keeps shrinking, the
    // remainder is dominated by a geometric series: tail <= 2 |next term|.
    if (i > 0 && ratio_now < Real(0.5) && ratio_now <= prev_ratio &&
        abs(next_term) < eps * abs(sum)) {
      cancellation = std::max(0L, max_term.exponent() - sum.exponent());
      Real tail = 2 * abs(next_term);
      Real rel = tail / abs(sum) + ldexp(eps, cancellation) * (i + 2);
      return {sum / m, rel, i + 1};
    }
    prev_ratio = ratio_now;
    coef = next_coef;
  }
  throw ConvergenceError("moment series for k=" + std::to_string(k) + " did not certify its tail within " +
                         std::to_string(kMaxSeriesTerms) + " terms");
}

}  // namespace detail

/// mu_{2k}(t) at the working precision, with a relative error estimate.
/// Cancellation (t < 0) is measured and the sum redone with enough guard bits.
inline MomentValue moment_with_error(long k, const Weight& w, GammaLadder& ladder) {
  if (k < 0) throw DomainError("moment: index must be nonnegative");
  const long bits = working_precision();
  long guard = 32;
  for (int attempt = 0; attempt < 8; ++attempt) {
    long cancellation = 0;
    MomentValue mv = detail::sum_moment_series(k, w.m(), w.t_exact(), ladder, bits, guard, cancellation);
    if (cancellation <= guard - 16) {
      mv.value.round_to(bits);
      mv.rel_err += pow2(-bits);
      mv.rel_err.round_to(64);
      return mv;
    }
    guard = cancellation + 64;
  }
  throw ConvergenceError("moment series for k=" + std::to_string(k) + ": cancellation not resolved");
}

/// mu_{2k}(t) (even index 2k) at the working precision.
inline Real moment(long k, const Weight& w, const PrecisionContext& ctx = {}) {
  ctx.validate();
  GammaLadder ladder(w.m(), working_precision() + 64);
  return moment_with_error(k, w, ladder).value;
}

/// mu_j(t) for any j; odd moments vanish identically.
inline Real moment_any(long j, const Weight& w, const PrecisionContext& ctx = {}) {
  if (j < 0) throw DomainError("moment: index must be nonnegative");
  if (j % 2 != 0) return Real(0);
  return moment(j / 2, w, ctx);
}

/// Even moments mu_0, mu_2, ..., mu_{2 max_order}. Immutable once built.
class MomentTable {
 public:
  MomentTable(Weight w, long max_order, std::vector<Real> values, std::vector<Real> err, long bits)
      : weight_(std::move(w)), max_order_(max_order), values_(std::move(values)), err_(std::move(err)), bits_(bits) {}

  const Weight& weight() const { return weight_; }
  long max_order() const { return max_order_; }
  /// Highest raw moment index j available.
  long max_index() const { return 2 * max_order_ + 1; }
  long bits() const { return bits_; }
  const std::vector<Real>& values() const { return values_; }
  const std::vector<Real>& err_bounds() const { return err_; }

  /// mu_{2k}.
  const Real& even(long k) const { return values_.at(static_cast<std::size_t>(k)); }

  /// mu_j for any j <= max_index(); odd j returns zero.
  const Real& operator[](long j) const {
    if (j < 0 || j > max_index()) {
      throw std::out_of_range("moment index " + std::to_string(j) + " beyond table order " +
                              std::to_string(2 * max_order_));
    }
    if (j % 2 != 0) return zero();
    return values_[static_cast<std::size_t>(j / 2)];
  }

  Real max_rel_err() const {
    Real e(0);
    for (const auto& x : err_) e = max(e, x);
    return e;
  }

 private:
  static const Real& zero() {
    static const Real z = [] { PrecisionScope s(64); return Real(0); }();
    return z;
  }

  Weight weight_;
  long max_order_;
  std::vector<Real> values_;
  std::vector<Real> err_;
  long bits_;
};

/// Table of mu_0..mu_{2 max_order} at the working precision.
inline MomentTable moment_table(const Weight& w, long max_order, const PrecisionContext& ctx = {}) {
  ctx.validate();
  if (max_order < 0) throw DomainError("moment_table: max_order must be nonnegative");
  const long bits = working_precision();
  GammaLadder ladder(w.m(), bits + 64);
  std::vector<Real> values;
  std::vector<Real> err;
  values.reserve(static_cast<std::size_t>(max_order + 1));
  err.reserve(static_cast<std::size_t>(max_order + 1));
  for (long k = 0; k <= max_order; ++k) {
    try {
      auto mv = moment_with_error(k, w, ladder);
      if (mv.value.sign() <= 0) {
        throw PrecisionExhausted("moment mu_" + std::to_string(2 * k) + " is not positive");
      }
      values.push_back(std::move(mv.value));
      err.push_back(std::move(mv.rel_err));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " (table index " + std::to_string(k) + ")");
    }
  }
  return MomentTable(w, max_order, std::move(values), std::move(err), bits);
}

// ---------------------------------------------------------------------------
// Quadrature oracle.
//
// Independent of the Gamma series: tanh-sinh quadrature of the integrand on
// [0, X] with X large enough that the discarded tail is provably small.
// Beyond a threshold X0 where g(x) = x^{2m}/2 - 2k ln x - t x^2 is
// nonnegative and nondecreasing, the integrand is <= exp(-x^{2m}/2), whose
// tail from X is <= exp(-X^{2m}/2) / (m X^{2m-1}).

namespace detail {

/// True if x^{2k} e^{t x^2} <= e^{x^{2m}/2} for every x >= X.
inline bool tail_dominated(long k, int m, const Real& t, const Real& X) {
  const Real x2 = X * X;
  const Real x2m = pow(x2, m);
  // u(X) = m X^{2m} - 2t X^2 - 2k >= 0 makes g nondecreasing, and
  // m^2 X^{2m-2} >= 2t keeps u nondecreasing beyond X.
  if (m * x2m - 2 * t * x2 - Real(2 * k) < Real(0)) return false;
  if (Real(static_cast<long>(m) * m) * pow(x2, m - 1) < 2 * t) return false;
  const Real g = x2m / 2 - Real(2 * k) * log(X) - t * x2;
  return g >= Real(0);
}

inline Real tail_bound(int m, const Real& X) {
  return exp(-pow(X, 2L * m) / 2) / (m * pow(X, 2L * m - 1));
}

/// Tanh-sinh on [0, X]; returns the integral, refining until two levels agree.
inline Real tanh_sinh(long k, int m, const Real& t, const Real& X, const Real& rel_tol, int max_level) {
  const Real half_pi = pi() / 2;
  const Real eps = pow2(-static_cast<long>(working_precision()));
  auto f = [&](const Real& x) {
    const Real x2 = x * x;
    return pow(x2, k) * exp(t * x2 - pow(x2, m));
  };
  // Contribution at abscissa u (both signs), weight included.
  auto node = [&](const Real& u) {
    const Real s = half_pi * sinh(u);
    const Real c = cosh(s);
    const Real dxdu = X * half_pi * cosh(u) / (2 * c * c);
    const Real e2 = exp(2 * s);
    const Real x_right = X * e2 / (1 + e2);      // u > 0 side
    const Real x_left = X / (1 + e2);            // mirrored node at -u
    return std::pair<Real, Real>{f(x_right) * dxdu, f(x_left) * dxdu};
  };

  Real h(1);
  Real sum = f(X / 2) * X * half_pi / 2;
  {
    for (long j = 1;; ++j) {
      auto [a, b] = node(h * j);
      sum += a + b;
      if (abs(a) + abs(b) < eps * abs(sum) && j > 3) break;
      if (j > 1000) break;
    }
  }
  Real estimate = sum * h;
  for (int level = 1; level <= max_level; ++level) {
    h /= 2;
    // Add the odd nodes of the refined grid.
    for (long j = 1;; j += 2) {
      auto [a, b] = node(h * j);
      sum += a + b;
      if (abs(a) + abs(b) < eps * abs(sum) && j > 7) break;
      if (j > (1L << 22)) break;
    }
    Real refined = sum * h;
    if (abs(refined - estimate) <= rel_tol * abs(refined)) return refined;
    estimate = refined;
  }
  throw ConvergenceError("tanh-sinh quadrature did not converge");
}

}  // namespace detail

/// mu_{2k}(t) by quadrature, independent of the Gamma-series path.
inline Real moment_quadrature_oracle(long k, const Weight& w, const PrecisionContext& ctx = {}) {
  ctx.validate();
  if (k < 0) throw DomainError("moment_quadrature_oracle: index must be nonnegative");
  const long bits = std::max<long>(working_precision(), ctx.target_bits() + 64);
  PrecisionScope scope(bits);
  const int m = w.m();
  const Real t = w.t();
  const Real tol(ctx.target_rel_error);

  Real X(1);
  for (int doubling = 0; doubling < 64; ++doubling, X *= 2) {
    if (!detail::tail_dominated(k, m, t, X)) continue;
    Real inner = detail::tanh_sinh(k, m, t, X, tol / 16, 14);
    // Integrand is even: the full-line moment is twice the half-line one.
    if (detail::tail_bound(m, X) <= tol * abs(inner) / 4) return 2 * inner;
  }
  throw ConvergenceError("moment_quadrature_oracle: could not bound the domain truncation");
}

}  // namespace freud

#endif  // FREUD_MOMENTS_HPP
