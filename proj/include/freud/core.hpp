#ifndef FREUD_CORE_HPP
#define FREUD_CORE_HPP

// Shared domain types: the Freud weight exp(-x^{2m} + t x^2), precision
// policy, and the handful of special constants the expansions need.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "freud/real.hpp"

namespace freud {

// Error hierarchy. The CLI maps these onto exit codes.
class FreudError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DomainError : public FreudError {
 public:
  using FreudError::FreudError;
};
class UsageError : public FreudError {
 public:
  using FreudError::FreudError;
};
/// A series or quadrature failed to certify its truncation.
class ConvergenceError : public FreudError {
 public:
  using FreudError::FreudError;
};
/// A quantity that is positive in exact arithmetic came out nonpositive.
class PrecisionExhausted : public FreudError {
 public:
  using FreudError::FreudError;
};

struct Rational {
  long num = 0;
  long den = 1;

  constexpr Rational() = default;
  constexpr Rational(long n) : num(n), den(1) {}
  constexpr Rational(long n, long d) : num(n), den(d) {
    if (d == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  Real value() const { return ratio(num, den); }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend constexpr Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend constexpr Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend constexpr Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend constexpr bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
  friend constexpr auto operator<=>(Rational a, Rational b) { return a.num * b.den <=> b.num * a.den; }
  std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
};

/// Precision at which the deformation parameter t is held. Decimal inputs
/// are rounded once here; every computation rounds down from it.
inline constexpr long kParameterBits = 4096;

/// The weight w(x;t) = exp(-x^{2m} + t x^2) on the real line.
class Weight {
 public:
  Weight(int m, std::string_view t_decimal) : m_(m), t_text_(t_decimal) {
    PrecisionScope scope(kParameterBits);
    t_ = Real::parse(t_decimal);
    validate();
  }
  Weight(int m, const Real& t) : m_(m) {
    PrecisionScope scope(kParameterBits);
    t_ = t;
    t_.round_to(kParameterBits);
    t_text_ = t_.is_zero() ? "0" : t_.str(40);
    validate();
  }
  Weight(int m, long t) : Weight(m, std::string_view(std::to_string(t))) {}

  int m() const { return m_; }
  /// t rounded to the current working precision.
  Real t() const { Real r; mpfr_set(r.raw(), t_.raw(), MPFR_RNDN); return r; }
  const Real& t_exact() const { return t_; }
  /// Textual form of t as supplied (or a 40-digit rendering if derived).
  const std::string& t_text() const { return t_text_; }

  /// v(x) = -ln w(x) = x^{2m} - t x^2.
  Real potential(const Real& x) const {
    const Real x2 = x * x;
    return pow(x2, m_) - t() * x2;
  }
  /// Coefficients of v'(x) = 2m x^{2m-1} - 2t x, indexed by power.
  std::vector<Real> potential_derivative() const {
    std::vector<Real> c(2 * m_, Real(0));
    c[2 * m_ - 1] = Real(2 * m_);
    c[1] -= 2 * t();
    return c;
  }

 private:
  void validate() const {
    if (m_ < 2) throw DomainError("Freud exponent m must be >= 2, got " + std::to_string(m_));
    if (!t_.is_finite()) throw DomainError("t must be finite");
  }

  int m_;
  Real t_;
  std::string t_text_;
};

struct PrecisionContext {
  long working_bits = 256;
  double target_rel_error = 1e-40;
  int max_escalations = 4;

  void validate() const {
    if (working_bits < 128) throw UsageError("working_bits must be >= 128");
    if (!(target_rel_error > 0.0 && target_rel_error < 1.0)) throw UsageError("target_rel_error must lie in (0,1)");
    if (std::log2(target_rel_error) < static_cast<double>(32 - working_bits)) {
      throw UsageError("target_rel_error leaves fewer than 32 guard bits at " + std::to_string(working_bits) + " bits");
    }
    if (max_escalations < 0) throw UsageError("max_escalations must be nonnegative");
  }
  /// Bits needed to represent target_rel_error, i.e. -log2(target).
  long target_bits() const { return static_cast<long>(std::ceil(-std::log2(target_rel_error))); }
};

/// Cancellation-loss slope (bits per n log2 n) for moment-space recurrence
/// computations. Measured loss is close to 1.9 n bits for m = 2 and grows
/// slowly with m and |t|; the slope covers the worst ratio seen for
/// 40 <= n <= 320, |t| <= 3, and overestimates at larger n.
inline double precision_slope(int m) {
  // Checked by tests/test_calibration.cpp.
  return 0.35 + 0.012 * (m - 2);
}

/// Working precision sufficient for Hankel/moment-space computations up to
/// order n_max. Monotone nondecreasing in n_max.
inline long precision_for(long n_max, int m, const PrecisionContext& ctx) {
  if (n_max < 1) throw UsageError("precision_for: n_max must be >= 1");
  const double n = static_cast<double>(n_max);
  const long loss = static_cast<long>(std::ceil(precision_slope(m) * n * std::log2(n + 2.0)));
  return std::max({256L, ctx.working_bits, 64 + ctx.target_bits() + loss});
}

namespace detail {

struct GammaKey {
  long num, den;
  mpfr_prec_t bits;
  auto operator<=>(const GammaKey&) const = default;
};

inline std::shared_mutex& gamma_mutex() {
  static std::shared_mutex m;
  return m;
}
inline std::map<GammaKey, Real>& gamma_cache() {
  static std::map<GammaKey, Real> c;
  return c;
}

}  // namespace detail

/// Gamma(q) at the working precision, memoized per (q, precision).
inline Real gamma_at(Rational q) {
  if (q.num <= 0) throw DomainError("gamma_at: argument must be positive, got " + q.str());
  const detail::GammaKey key{q.num, q.den, working_precision()};
  {
    std::shared_lock lock(detail::gamma_mutex());
    auto it = detail::gamma_cache().find(key);
    if (it != detail::gamma_cache().end()) return it->second;
  }
  Real g = tgamma(q.value());
  std::unique_lock lock(detail::gamma_mutex());
  detail::gamma_cache().emplace(key, g);
  return g;
}

/// Even-index Bernoulli numbers B_0, B_2, ..., B_{2*count-2}, exact.
inline std::vector<mpq_class> bernoulli_even(int count) {
  // Akiyama-Tanigawa.
  const int n_max = 2 * count;
  std::vector<mpq_class> a(n_max + 1);
  std::vector<mpq_class> out;
  for (int n = 0; n <= n_max; ++n) {
    a[n] = mpq_class(1, n + 1);
    for (int j = n; j >= 1; --j) {
      a[j - 1] = j * (a[j - 1] - a[j]);
      a[j - 1].canonicalize();
    }
    if (n % 2 == 0) out.push_back(a[0]);
  }
  out.resize(count);
  return out;
}

inline Real to_real(const mpq_class& q) {
  Real r;
  mpfr_set_q(r.raw(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

/// ln of the Glaisher-Kinkelin constant by Euler-Maclaurin summation of
/// sum_{k<=N} k ln k. The remainder is bounded by the first omitted term.
inline Real log_glaisher() {
  const long bits = working_precision();
  PrecisionScope scope(bits + 64);
  const int terms = static_cast<int>(std::max(30L, bits / 12));
  const auto bern = bernoulli_even(terms + 2);
  // Pick N so the first omitted correction falls below 2^{-bits-16}.
  const int j_last = terms + 1;
  const double log2_last = std::log2(std::abs(mpq_class(bern[j_last]).get_d())) -
                           std::log2(2.0 * j_last * (2.0 * j_last - 1) * (2.0 * j_last - 2));
  double log2_n = (log2_last + bits + 16) / (2.0 * j_last - 2);
  if (!std::isfinite(log2_n)) {
    // B_{2j} overflows double for long expansions; fall back to the
    // Stirling estimate |B_2j| ~ 2 (2j)! / (2 pi)^{2j}.
    const double jj = 2.0 * j_last;
    const double log2_b = 1.0 + (std::lgamma(jj + 1.0) - jj * std::log(2.0 * M_PI)) / std::log(2.0);
    log2_n = (log2_b - std::log2(jj * (jj - 1) * (jj - 2)) + bits + 16) / (jj - 2);
  }
  const long n = std::max(16L, static_cast<long>(std::ceil(std::exp2(std::max(log2_n, 4.0)))));

  Real sum(0);
  for (long k = 2; k <= n; ++k) sum += Real(k) * log(Real(k));
  const Real nr(n);
  const Real ln_n = log(nr);
  Real result = sum - (nr * nr / 2 + nr / 2 + ratio(1, 12)) * ln_n + nr * nr / 4;
  Real n_pow = Real(1);
  const Real inv_n2 = Real(1) / (nr * nr);
  for (int j = 2; j <= terms; ++j) {
    n_pow *= inv_n2;
    const long d = 2L * j * (2L * j - 1) * (2L * j - 2);
    result += to_real(bern[j]) * n_pow / d;
  }
  Real out;
  mpfr_set(out.raw(), result.raw(), MPFR_RNDN);
  out.round_to(bits);
  return out;
}

/// Fundamental constants at the current working precision.
struct Constants {
  /// zeta'(-1) = 1/12 - ln(Glaisher constant).
  static Real zeta_prime_minus_one() {
    static std::shared_mutex mtx;
    static std::map<mpfr_prec_t, Real> cache;
    const mpfr_prec_t bits = working_precision();
    {
      std::shared_lock lock(mtx);
      if (auto it = cache.find(bits); it != cache.end()) return it->second;
    }
    Real z = ratio(1, 12) - log_glaisher();
    std::unique_lock lock(mtx);
    cache.emplace(bits, z);
    return z;
  }
  static Real gamma(Rational q) { return gamma_at(q); }
};

/// A value with an error estimate from comparing two precisions.
struct Estimate {
  Real value;
  Real abs_err;
};

/// Evaluates f at the working precision p and at p + 64 bits. The
/// difference estimates the error of the p-bit result, which bounds the
/// error of the returned (more precise) value.
template <typename F>
Estimate two_precision(F&& f) {
  const long p = working_precision();
  Real lo = f();
  Real hi;
  {
    PrecisionScope scope(p + 64);
    hi = f();
  }
  Estimate e{hi, abs(hi - lo)};
  e.value.round_to(p);
  return e;
}

}  // namespace freud

#endif  // FREUD_CORE_HPP
