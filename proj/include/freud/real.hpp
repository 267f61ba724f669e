#ifndef FREUD_REAL_HPP
#define FREUD_REAL_HPP

// Value-semantic wrapper around an MPFR floating point number.
//
// Every freshly created Real (and every arithmetic result) takes the
// precision of the innermost PrecisionScope on the current thread.
// Assignment copies both value and precision.

#include <mpfr.h>

#include <cmath>
#include <compare>
#include <cstdlib>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace freud {

namespace detail {
inline thread_local mpfr_prec_t current_precision = 256;
}  // namespace detail

/// Working precision in bits for new values on this thread.
inline mpfr_prec_t working_precision() { return detail::current_precision; }

/// RAII override of the thread's working precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(long bits) : saved_(detail::current_precision) {
    if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX) {
      throw std::invalid_argument("precision out of range: " + std::to_string(bits));
    }
    detail::current_precision = static_cast<mpfr_prec_t>(bits);
  }
  ~PrecisionScope() { detail::current_precision = saved_; }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

class Real {
 public:
  Real() { mpfr_init2(v_, working_precision()); mpfr_set_zero(v_, 1); }
  Real(int x) : Real(static_cast<long>(x)) {}
  Real(long x) { mpfr_init2(v_, working_precision()); mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(unsigned long x) { mpfr_init2(v_, working_precision()); mpfr_set_ui(v_, x, MPFR_RNDN); }
  Real(long long x) : Real(static_cast<long>(x)) {}
  Real(unsigned x) : Real(static_cast<unsigned long>(x)) {}
  Real(double x) { mpfr_init2(v_, working_precision()); mpfr_set_d(v_, x, MPFR_RNDN); }

  /// Parses a decimal literal, correctly rounded to working precision.
  static Real parse(std::string_view text) {
    Real r;
    std::string s(text);
    char* end = nullptr;
    mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN);
    if (end == s.c_str() || *end != '\0') {
      throw std::invalid_argument("not a decimal number: '" + s + "'");
    }
    return r;
  }

  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  /// Rounds this value in place to `bits` of precision.
  void round_to(mpfr_prec_t bits) { mpfr_prec_round(v_, bits, MPFR_RNDN); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long double to_ld() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  /// Binary exponent e with 0.5 <= |x|/2^e < 1; very negative for zero.
  long exponent() const { return is_zero() ? -(1L << 40) : static_cast<long>(mpfr_get_exp(v_)); }

  /// Scientific decimal representation with `digits` significant digits.
  std::string str(int digits) const {
    if (is_zero()) return "0";
    if (!is_finite()) return mpfr_nan_p(v_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }
  /// Enough digits to round-trip this value's precision.
  std::string str() const {
    return str(static_cast<int>(mpfr_get_str_ndigits(10, precision())));
  }

  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(long k) { mpfr_mul_si(v_, v_, k, MPFR_RNDN); return *this; }
  Real& operator/=(long k) { mpfr_div_si(v_, v_, k, MPFR_RNDN); return *this; }

  friend Real operator-(const Real& a) { Real r; mpfr_neg(r.v_, a.v_, MPFR_RNDN); return r; }
  friend Real operator+(const Real& a, const Real& b) { Real r; mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator-(const Real& a, const Real& b) { Real r; mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator*(const Real& a, const Real& b) { Real r; mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator/(const Real& a, const Real& b) { Real r; mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator*(const Real& a, long k) { Real r; mpfr_mul_si(r.v_, a.v_, k, MPFR_RNDN); return r; }
  friend Real operator*(long k, const Real& a) { return a * k; }
  friend Real operator/(const Real& a, long k) { Real r; mpfr_div_si(r.v_, a.v_, k, MPFR_RNDN); return r; }
  friend Real operator*(const Real& a, int k) { return a * static_cast<long>(k); }
  friend Real operator*(int k, const Real& a) { return a * static_cast<long>(k); }
  friend Real operator/(const Real& a, int k) { return a / static_cast<long>(k); }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }

  friend std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.str(30); }

 private:
  mpfr_t v_;
};

// Elementary functions. Results carry the current working precision.
#define FREUD_UNARY(name, fn)                 \
  inline Real name(const Real& x) {           \
    Real r;                                   \
    fn(r.raw(), x.raw(), MPFR_RNDN);          \
    return r;                                 \
  }
FREUD_UNARY(abs, mpfr_abs)
FREUD_UNARY(sqrt, mpfr_sqrt)
FREUD_UNARY(cbrt, mpfr_cbrt)
FREUD_UNARY(exp, mpfr_exp)
FREUD_UNARY(log, mpfr_log)
FREUD_UNARY(log2, mpfr_log2)
FREUD_UNARY(sinh, mpfr_sinh)
FREUD_UNARY(cosh, mpfr_cosh)
FREUD_UNARY(tanh, mpfr_tanh)
FREUD_UNARY(tgamma, mpfr_gamma)
FREUD_UNARY(zeta, mpfr_zeta)
#undef FREUD_UNARY

inline Real lgamma(const Real& x) {
  Real r;
  int sgn = 0;
  mpfr_lgamma(r.raw(), &sgn, x.raw(), MPFR_RNDN);
  return r;
}
inline Real pow(const Real& x, const Real& y) { Real r; mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN); return r; }
inline Real pow(const Real& x, long k) { Real r; mpfr_pow_si(r.raw(), x.raw(), k, MPFR_RNDN); return r; }
inline Real ldexp(const Real& x, long e) { Real r; mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN); return r; }
inline Real max(const Real& a, const Real& b) { return a < b ? b : a; }
inline Real min(const Real& a, const Real& b) { return b < a ? b : a; }

inline Real pi() { Real r; mpfr_const_pi(r.raw(), MPFR_RNDN); return r; }
inline Real euler_gamma() { Real r; mpfr_const_euler(r.raw(), MPFR_RNDN); return r; }
inline Real ln2() { Real r; mpfr_const_log2(r.raw(), MPFR_RNDN); return r; }

/// p/q rounded once at working precision.
inline Real ratio(long p, long q) { Real r(p); r /= q; return r; }

/// 2^e as a Real.
inline Real pow2(long e) { return ldexp(Real(1), e); }

/// |a - b| / max(|a|, |b|), zero when both vanish.
inline Real rel_diff(const Real& a, const Real& b) {
  Real den = max(abs(a), abs(b));
  if (den.is_zero()) return Real(0);
  return abs(a - b) / den;
}

}  // namespace freud

#endif  // FREUD_REAL_HPP
