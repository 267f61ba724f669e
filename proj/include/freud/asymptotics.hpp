#ifndef FREUD_ASYMPTOTICS_HPP
#define FREUD_ASYMPTOTICS_HPP

// Large-n expansions of beta_n, p(n,t), ln D_n and ln h_n for m = 2, 3,
// the general-m leading behaviour of ln D_n(0), and comparison against
// exact tables with fitted residual decay orders.
//
// Coefficients are polynomials in t whose coefficients are rational
// multiples of products of a few fixed constants, evaluated at working
// precision on demand.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "freud/orthopoly.hpp"

namespace freud {

enum class Sym { sqrt3, cbrt60, cbrt450, ln2, ln3, ln12, ln60, ln2pi, zeta_prime, pi };
inline constexpr std::size_t kSymCount = 10;

inline const char* to_string(Sym s) {
  static const char* names[] = {"sqrt3", "cbrt60", "cbrt450", "ln2", "ln3", "ln12", "ln60", "ln2pi", "zeta'(-1)", "pi"};
  return names[static_cast<std::size_t>(s)];
}

inline Real sym_value(Sym s) {
  switch (s) {
    case Sym::sqrt3: return sqrt(Real(3));
    case Sym::cbrt60: return cbrt(Real(60));
    case Sym::cbrt450: return cbrt(Real(450));
    case Sym::ln2: return log(Real(2));
    case Sym::ln3: return log(Real(3));
    case Sym::ln12: return log(Real(12));
    case Sym::ln60: return log(Real(60));
    case Sym::ln2pi: return log(2 * pi());
    case Sym::zeta_prime: return Constants::zeta_prime_minus_one();
    case Sym::pi: return pi();
  }
  throw std::logic_error("unknown symbol");
}

/// c * t^t_pow * prod_s s^{sym_pow[s]}.
struct Monomial {
  Rational c{1};
  int t_pow = 0;
  std::array<int, kSymCount> sym_pow{};

  bool has_log() const {
    for (Sym s : {Sym::ln2, Sym::ln3, Sym::ln12, Sym::ln60, Sym::ln2pi, Sym::zeta_prime}) {
      if (sym_pow[static_cast<std::size_t>(s)] != 0) return true;
    }
    return false;
  }

  friend Monomial operator*(Monomial a, const Monomial& b) {
    a.c = a.c * b.c;
    a.t_pow += b.t_pow;
    for (std::size_t i = 0; i < kSymCount; ++i) a.sym_pow[i] += b.sym_pow[i];
    return a;
  }

  std::string str() const {
    std::ostringstream os;
    os << c.str();
    if (t_pow) os << "*t^" << t_pow;
    for (std::size_t i = 0; i < kSymCount; ++i) {
      if (sym_pow[i]) os << "*" << to_string(static_cast<Sym>(i)) << "^" << sym_pow[i];
    }
    return os.str();
  }
};

/// Sum of monomials, optionally plus a numerically evaluated part (used
/// only where a constant has no closed form in the symbol set).
struct Coefficient {
  std::vector<Monomial> terms;
  std::function<Real()> numeric;

  Coefficient() = default;
  Coefficient(Monomial m) : terms{m} {}

  friend Coefficient operator+(Coefficient a, const Coefficient& b) {
    a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
    if (b.numeric) {
      auto fa = a.numeric;
      auto fb = b.numeric;
      a.numeric = fa ? std::function<Real()>([fa, fb] { return fa() + fb(); }) : fb;
    }
    return a;
  }
  friend Coefficient operator-(Coefficient a) {
    for (auto& m : a.terms) m.c = m.c * Rational(-1);
    if (a.numeric) {
      auto f = a.numeric;
      a.numeric = [f] { return -f(); };
    }
    return a;
  }
  friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a + (-b); }
  friend Coefficient operator*(Coefficient a, const Monomial& m) {
    for (auto& x : a.terms) x = x * m;
    if (a.numeric) throw std::logic_error("cannot scale a numeric coefficient symbolically");
    return a;
  }
  friend Coefficient operator*(const Monomial& m, Coefficient a) { return a * m; }

  Real evaluate(const Real& t) const {
    Real acc(0);
    std::array<std::optional<Real>, kSymCount> cache;
    for (const auto& m : terms) {
      if (m.c.num == 0) continue;
      Real v = m.c.value();
      if (m.t_pow) v *= pow(t, static_cast<long>(m.t_pow));
      for (std::size_t i = 0; i < kSymCount; ++i) {
        if (!m.sym_pow[i]) continue;
        if (!cache[i]) cache[i] = sym_value(static_cast<Sym>(i));
        v *= pow(*cache[i], static_cast<long>(m.sym_pow[i]));
      }
      acc += v;
    }
    if (numeric) acc += numeric();
    return acc;
  }

  /// d/dt, for the t-derivative transcription check.
  Coefficient d_dt() const {
    if (numeric) throw std::logic_error("cannot differentiate a numeric coefficient");
    Coefficient out;
    for (auto m : terms) {
      if (m.t_pow == 0) continue;
      m.c = m.c * Rational(m.t_pow);
      m.t_pow -= 1;
      out.terms.push_back(m);
    }
    return out;
  }

  bool vanishes_at_zero_t() const {
    if (numeric) return false;
    for (const auto& m : terms) {
      if (m.t_pow == 0 && m.c.num != 0) return false;
    }
    return true;
  }

  std::string str() const {
    std::string s;
    for (const auto& m : terms) s += (s.empty() ? "" : " + ") + m.str();
    if (numeric) s += (s.empty() ? "" : " + ") + std::string("<numeric>");
    return s.empty() ? "0" : s;
  }
};

inline Coefficient operator+(const Monomial& a, const Monomial& b) { return Coefficient(a) + Coefficient(b); }
inline Coefficient operator-(const Monomial& a, const Monomial& b) { return Coefficient(a) - Coefficient(b); }

struct Term {
  Coefficient coeff;
  Rational power;     // exponent of n
  int log_power = 0;  // 0 or 1

  /// Value (without the coefficient) of n^power (ln n)^log_power.
  Real scale(const Real& n) const {
    Real v = power == Rational(0) ? Real(1) : pow(n, power.value());
    if (log_power) v *= log(n);
    return v;
  }
  std::string str() const {
    std::string s = "(" + coeff.str() + ")";
    if (!(power == Rational(0))) s += " n^(" + power.str() + ")";
    if (log_power) s += " ln(n)";
    return s;
  }
};

enum class Quantity { beta, p, lnD, lnh, lnD0 };

inline const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::beta: return "beta";
    case Quantity::p: return "p";
    case Quantity::lnD: return "lnD";
    case Quantity::lnh: return "lnh";
    case Quantity::lnD0: return "lnD0";
  }
  return "?";
}

inline Quantity parse_quantity(std::string_view s) {
  for (Quantity q : {Quantity::beta, Quantity::p, Quantity::lnD, Quantity::lnh, Quantity::lnD0}) {
    if (s == to_string(q)) return q;
  }
  throw UsageError("unknown quantity '" + std::string(s) + "' (beta, p, lnD, lnh, lnD0)");
}

class AsymptoticExpansion {
 public:
  AsymptoticExpansion(Quantity q, int m, Real t, std::vector<Term> terms, Rational remainder)
      : quantity_(q), m_(m), t_(std::move(t)), terms_(std::move(terms)), remainder_(remainder) {}

  Quantity quantity() const { return quantity_; }
  int m() const { return m_; }
  const Real& t() const { return t_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  /// Power of n in the O-term after the last printed term.
  Rational remainder_power() const { return remainder_; }

  /// Sum of the first k terms at n (k defaults to all).
  Real evaluate(const Real& n, std::optional<std::size_t> k = {}) const {
    const std::size_t upto = k.value_or(terms_.size());
    check_count(upto);
    Real acc(0);
    for (std::size_t i = 0; i < upto; ++i) acc += term_value(i, n);
    return acc;
  }
  Real evaluate(long n, std::optional<std::size_t> k = {}) const { return evaluate(Real(n), k); }

  Real term_value(std::size_t i, const Real& n) const {
    check_count(i + 1);
    return terms_[i].coeff.evaluate(t_) * terms_[i].scale(n);
  }

  /// Power of n of the first term beyond the k-term truncation whose
  /// coefficient does not vanish at this t; the remainder power if none.
  Rational next_power(std::size_t k) const {
    for (std::size_t i = k; i < terms_.size(); ++i) {
      if (!terms_[i].coeff.evaluate(t_).is_zero()) return terms_[i].power;
    }
    return remainder_;
  }

  /// Same expansion with each coefficient differentiated in t.
  AsymptoticExpansion d_dt() const {
    std::vector<Term> out;
    for (const auto& tm : terms_) out.push_back({tm.coeff.d_dt(), tm.power, tm.log_power});
    return {quantity_, m_, t_, std::move(out), remainder_};
  }

 private:
  void check_count(std::size_t k) const {
    if (k > terms_.size()) {
      throw std::out_of_range(std::string(to_string(quantity_)) + " expansion for m=" + std::to_string(m_) +
                              " has " + std::to_string(terms_.size()) + " printed terms; " + std::to_string(k) +
                              " requested");
    }
  }

  Quantity quantity_;
  int m_;
  Real t_;
  std::vector<Term> terms_;
  Rational remainder_;
};

namespace detail {

inline Monomial q(long num, long den = 1) {
  Monomial m;
  m.c = Rational(num, den);
  return m;
}
inline Monomial T(int k) {
  Monomial m;
  m.t_pow = k;
  return m;
}
inline Monomial S(Sym s, int k = 1) {
  Monomial m;
  m.sym_pow[static_cast<std::size_t>(s)] = k;
  return m;
}
inline Term term(Coefficient c, Rational power, int log_power = 0) { return {std::move(c), power, log_power}; }

inline const Monomial r3 = S(Sym::sqrt3, -1);    // 1/sqrt(3)
inline const Monomial r60 = S(Sym::cbrt60, -1);  // 60^{-1/3}
inline const Monomial r450 = S(Sym::cbrt450, -1);

inline std::vector<Term> beta_terms(int m) {
  if (m == 2) {
    return {
        term(q(1, 2) * r3, {1, 2}),
        term(q(1, 12) * T(1), 0),
        term(q(1, 48) * T(2) * r3, {-1, 2}),
        term(-(Coefficient(T(4)) - q(48)) * q(1, 2304) * r3, {-3, 2}),
        term(q(1, 288) * T(1), -2),
        term((Coefficient(T(6)) - q(144) * T(2)) * q(1, 55296) * r3, {-5, 2}),
        term(q(-1, 1728) * T(3), -3),
    };
  }
  return {
      term(r60, {1, 3}),
      term(q(1, 3) * T(1) * r450, {-1, 3}),
      term(-(q(4) * T(3) - q(135)) * q(1, 2430) * r60, {-5, 3}),
      term((q(2) * T(4) - q(45) * T(1)) * q(1, 3645) * r450, {-7, 3}),
      term(q(-2, 1215) * T(2), -3),
      term(-(q(16) * T(6) - q(3780) * T(3) + q(40095)) * q(1, 1476225) * r60, {-11, 3}),
      term((q(16) * T(7) - q(180) * T(4) - q(112995) * T(1)) * q(1, 3542940) * r450, {-13, 3}),
  };
}

inline std::vector<Term> p_terms(int m) {
  if (m == 2) {
    return {
        term(q(-1, 3) * r3, {3, 2}),
        term(q(-1, 12) * T(1), 1),
        term(-(Coefficient(T(2)) - q(6)) * q(1, 24) * r3, {1, 2}),
        term(-(Coefficient(T(3)) - q(9) * T(1)) * q(1, 216), 0),
        term(-(Coefficient(T(4)) - q(12) * T(2) - q(24)) * q(1, 1152) * r3, {-1, 2}),
        term(q(1, 288) * T(1), -1),
        term((Coefficient(T(6)) - q(18) * T(4) - q(72) * T(2) + q(864)) * q(1, 82944) * r3, {-3, 2}),
        term(-(Coefficient(T(3)) - q(6) * T(1)) * q(1, 3456), -2),
    };
  }
  return {
      term(q(-3, 4) * r60, {4, 3}),
      term(q(-1, 2) * T(1) * r450, {2, 3}),
      term(q(1, 2) * r60, {1, 3}),
      term(q(-1, 90) * T(2), 0),
      term(q(1, 6) * T(1) * r450, {-1, 3}),
      term(-(q(2) * T(3) - q(45)) * q(1, 810) * r60, {-2, 3}),
      term(q(1, 2430) * T(4) * r450, {-4, 3}),
      term(-(q(4) * T(3) - q(135)) * q(1, 4860) * r60, {-5, 3}),
  };
}

inline std::vector<Term> lnD_terms(int m) {
  const Coefficient zeta = S(Sym::zeta_prime);
  if (m == 2) {
    return {
        term(q(1, 4), 2, 1),
        term(-(Coefficient(q(3, 8)) + q(1, 4) * S(Sym::ln12)), 2),
        term(q(2, 3) * T(1) * r3, {3, 2}),
        term(Coefficient(q(1, 12) * T(2)) + S(Sym::ln2pi), 1),
        term(q(1, 36) * T(3) * r3, {1, 2}),
        term(q(-1, 12), 0, 1),
        term(Coefficient(q(1, 432) * T(4)) + zeta - q(1, 12) * S(Sym::ln2), 0),
        term((Coefficient(T(5)) - q(120) * T(1)) * q(1, 2880) * r3, {-1, 2}),
        term(q(-1, 288) * T(2), -1),
        term(-(Coefficient(T(7)) - q(168) * T(3)) * q(1, 290304) * r3, {-3, 2}),
        term((q(5) * T(4) - q(267)) * q(1, 34560), -2),
    };
  }
  return {
      term(q(1, 6), 2, 1),
      term(-(Coefficient(q(1, 4)) + q(1, 6) * S(Sym::ln60)), 2),
      term(q(3, 2) * T(1) * r60, {4, 3}),
      term(S(Sym::ln2pi), 1),
      term(q(1, 2) * T(2) * r450, {2, 3}),
      term(q(-1, 12), 0, 1),
      term(Coefficient(q(1, 135) * T(3)) + zeta - q(1, 12) * S(Sym::ln3), 0),
      term((Coefficient(T(4)) - q(90) * T(1)) * q(1, 810) * r60, {-2, 3}),
      term(q(-1, 6075) * T(5) * r450, {-4, 3}),
      term((q(16) * T(3) - q(315)) * q(1, 29160), -2),
  };
}

inline std::vector<Term> lnh_terms(int m) {
  if (m == 2) {
    return {
        term(q(1, 2), 1, 1),
        term(-(Coefficient(q(1)) + S(Sym::ln12)) * q(1, 2), 1),
        term(T(1) * S(Sym::sqrt3, -1), {1, 2}),
        term(q(1, 4), 0, 1),
        term(Coefficient(q(1, 12) * T(2)) - q(1, 4) * S(Sym::ln12) + S(Sym::ln2pi), 0),
        term((Coefficient(T(3)) + q(18) * T(1)) * q(1, 72) * r3, {-1, 2}),
        term(-(Coefficient(T(5)) + q(20) * T(3) + q(120) * T(1)) * q(1, 5760) * r3, {-3, 2}),
        term((Coefficient(T(2)) + q(6)) * q(1, 288), -2),
    };
  }
  return {
      term(q(1, 3), 1, 1),
      term(-(Coefficient(q(1)) + S(Sym::ln60)) * q(1, 3), 1),
      term(q(2) * T(1) * r60, {1, 3}),
      term(q(1, 6), 0, 1),
      term(Coefficient(S(Sym::ln2pi)) - q(1, 6) * S(Sym::ln60), 0),
      term(q(1, 3) * T(2) * r450, {-1, 3}),
      term(q(1, 3) * T(1) * r60, {-2, 3}),
      term(q(-1, 36), -1),
      term(q(-1, 18) * T(2) * r450, {-4, 3}),
      term(q(-1, 1215) * T(4) * r60, {-5, 3}),
  };
}

/// The m = 2, 3 expansions of ln D_n(0) with terms through n^{-4}.
inline std::vector<Term> lnD0_terms(int m) {
  const Coefficient zeta = S(Sym::zeta_prime);
  if (m == 2) {
    return {
        term(q(1, 4), 2, 1),
        term(-(Coefficient(q(3)) + q(2) * S(Sym::ln12)) * q(1, 8), 2),
        term(S(Sym::ln2pi), 1),
        term(q(-1, 12), 0, 1),
        term(zeta - q(1, 12) * S(Sym::ln2), 0),
        term(q(-89, 11520), -2),
        term(q(6619, 2322432), -4),
    };
  }
  return {
      term(q(1, 6), 2, 1),
      term(-(Coefficient(q(1, 4)) + q(1, 6) * S(Sym::ln60)), 2),
      term(S(Sym::ln2pi), 1),
      term(q(-1, 12), 0, 1),
      term(zeta - q(1, 12) * S(Sym::ln3), 0),
      term(q(-7, 648), -2),
      term(q(8521, 1837080), -4),
  };
}

inline void require_m23(int m, const char* what) {
  if (m != 2 && m != 3) throw UsageError(std::string(what) + ": expansions are available for m=2 and m=3 only");
}

inline AsymptoticExpansion truncated(Quantity qn, int m, const Real& t, std::vector<Term> all, Rational rem,
                                     std::optional<std::size_t> k) {
  const std::size_t n = k.value_or(all.size());
  if (n > all.size()) {
    throw std::out_of_range(std::string(to_string(qn)) + " expansion for m=" + std::to_string(m) + " has " +
                            std::to_string(all.size()) + " printed terms; " + std::to_string(n) + " requested");
  }
  // Truncating early moves the remainder to the first dropped term.
  const Rational r = n < all.size() ? all[n].power : rem;
  all.resize(n);
  return {qn, m, t, std::move(all), r};
}

}  // namespace detail

inline AsymptoticExpansion beta_expansion(int m, const Real& t, std::optional<std::size_t> terms = {}) {
  detail::require_m23(m, "beta_expansion");
  return detail::truncated(Quantity::beta, m, t, detail::beta_terms(m), m == 2 ? Rational(-7, 2) : Rational(-5),
                           terms);
}

inline AsymptoticExpansion p_expansion(int m, const Real& t, std::optional<std::size_t> terms = {}) {
  detail::require_m23(m, "p_expansion");
  return detail::truncated(Quantity::p, m, t, detail::p_terms(m), m == 2 ? Rational(-5, 2) : Rational(-2), terms);
}

inline AsymptoticExpansion lnD_expansion(int m, const Real& t, std::optional<std::size_t> terms = {}) {
  detail::require_m23(m, "lnD_expansion");
  return detail::truncated(Quantity::lnD, m, t, detail::lnD_terms(m), m == 2 ? Rational(-5, 2) : Rational(-8, 3),
                           terms);
}

inline AsymptoticExpansion lnh_expansion(int m, const Real& t, std::optional<std::size_t> terms = {}) {
  detail::require_m23(m, "lnh_expansion");
  return detail::truncated(Quantity::lnh, m, t, detail::lnh_terms(m), m == 2 ? Rational(-5, 2) : Rational(-2), terms);
}

/// ln(A/2) - 3/(4m) with A = (Gamma(m) Gamma(1/2) / Gamma(m + 1/2))^{1/(2m)}.
inline Real lemma_n2_coefficient(int m) {
  if (m < 1) throw DomainError("lemma: m must be a positive integer");
  const Real ratio_g = gamma_at(Rational(m)) * gamma_at(Rational(1, 2)) / gamma_at(Rational(2 * m + 1, 2));
  return log(ratio_g) / (2 * m) - log(Real(2)) - ratio(3, 4 * m);
}

/// c(m) = zeta'(-1) - ln(m)/12.
inline Real lemma_constant(int m) { return Constants::zeta_prime_minus_one() - log(Real(m)) / 12; }

/// Leading behaviour of ln D_n(0) for integer m >= 2:
///   n^2 ln n/(2m) + (ln(A/2) - 3/(4m)) n^2 + n ln(2 pi) - ln n/12 + c(m).
/// For m = 2, 3 with_higher_terms gives the expansion through n^{-4}.
inline AsymptoticExpansion lnD0_expansion(int m, bool with_higher_terms = false) {
  if (m < 2) throw DomainError("lnD0_expansion: m must be >= 2, got " + std::to_string(m));
  if (with_higher_terms) {
    detail::require_m23(m, "lnD0_expansion with higher terms");
    return {Quantity::lnD0, m, Real(0), detail::lnD0_terms(m), Rational(-6)};
  }
  using detail::q;
  using detail::term;
  Coefficient n2;
  n2.numeric = [m] { return lemma_n2_coefficient(m); };
  Coefficient c0;
  c0.numeric = [m] { return lemma_constant(m); };
  std::vector<Term> terms{
      term(q(1, 2 * m), 2, 1), term(n2, 2), term(detail::S(Sym::ln2pi), 1), term(q(-1, 12), 0, 1), term(c0, 0),
  };
  return {Quantity::lnD0, m, Real(0), std::move(terms), Rational(0)};
}

inline Real lnD0_expansion(int m, long n, bool with_higher_terms) {
  return lnD0_expansion(m, with_higher_terms).evaluate(n);
}

inline AsymptoticExpansion expansion(Quantity qn, int m, const Real& t, std::optional<std::size_t> terms = {}) {
  switch (qn) {
    case Quantity::beta: return beta_expansion(m, t, terms);
    case Quantity::p: return p_expansion(m, t, terms);
    case Quantity::lnD: return lnD_expansion(m, t, terms);
    case Quantity::lnh: return lnh_expansion(m, t, terms);
    case Quantity::lnD0: {
      if (!t.is_zero()) throw UsageError("lnD0 is the t = 0 expansion");
      auto e = lnD0_expansion(m, m == 2 || m == 3);
      if (terms) return detail::truncated(qn, m, t, e.terms(), e.remainder_power(), terms);
      return e;
    }
  }
  throw std::logic_error("unknown quantity");
}

struct LemmaConsistency {
  int m = 0;
  Real n2_difference{0L};
  Real n_difference{0L};
  Real log_difference{0L};
  Real constant_difference{0L};
  bool ok = false;
  explicit operator bool() const { return ok; }
};

/// Compares the general-m statement with the m = 2, 3 expansion of
/// ln D_n(0) coefficient by coefficient (n^2, n, ln n and constant).
inline LemmaConsistency lemma_consistency(int m, double tolerance = 1e-30) {
  detail::require_m23(m, "lemma_consistency");
  LemmaConsistency out;
  out.m = m;
  const auto prop = lnD0_expansion(m, true);
  const auto lem = lnD0_expansion(m, false);
  const Real t(0);
  auto coeff = [&](const AsymptoticExpansion& e, Rational power, int lp) {
    for (const auto& tm : e.terms()) {
      if (tm.power == power && tm.log_power == lp) return tm.coeff.evaluate(t);
    }
    throw std::logic_error("missing term");
  };
  out.n2_difference = abs(coeff(prop, 2, 0) - coeff(lem, 2, 0));
  out.n_difference = abs(coeff(prop, 1, 0) - coeff(lem, 1, 0));
  out.log_difference = abs(coeff(prop, 0, 1) - coeff(lem, 0, 1));
  out.constant_difference = abs(coeff(prop, 0, 0) - coeff(lem, 0, 0));
  const Real tol(tolerance);
  out.ok = out.n2_difference <= tol && out.n_difference <= tol && out.log_difference <= tol &&
           out.constant_difference <= tol && abs(coeff(prop, 2, 1) - coeff(lem, 2, 1)) <= tol;
  return out;
}

// ---------------------------------------------------------------------------
// Comparison against exact values

struct ExpansionReport {
  Quantity quantity = Quantity::beta;
  int m = 0;
  std::string t;
  std::vector<long> n_grid;
  std::vector<Real> exact;
  std::vector<std::size_t> truncations;
  std::vector<std::vector<Real>> truncated;  // [truncation][grid index]
  std::vector<std::vector<Real>> residuals;  // exact - truncated
  std::vector<double> fitted_orders;
  std::vector<double> r_squared;
  /// Power of the first omitted nonzero term, the expected order.
  std::vector<double> expected_orders;
  /// |residual| / |first omitted term| at each n (NaN if nothing omitted).
  std::vector<std::vector<double>> dominance;
  /// Smallest grid n from which |residual| is monotone nonincreasing.
  std::vector<long> monotone_from;
  std::size_t fit_points = 0;
};

struct LineFit {
  double slope = 0;
  double r_squared = 0;
};

/// Least-squares fit of log|r| against log n.
inline LineFit log_log_fit(const std::vector<long>& n, const std::vector<Real>& r) {
  const std::size_t k = n.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    PrecisionScope s(64);
    const double x = std::log(static_cast<double>(n[i]));
    const double y = r[i].is_zero() ? -1e4 : log(abs(r[i])).to_double();
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double kk = static_cast<double>(k);
  const double cov = sxy - sx * sy / kk, vx = sxx - sx * sx / kk, vy = syy - sy * sy / kk;
  LineFit f;
  f.slope = cov / vx;
  f.r_squared = vy > 0 ? cov * cov / (vx * vy) : 1.0;
  return f;
}

/// Residuals of each truncation on n_grid, with the decay order fitted
/// over the top half of the grid (at least 4 points).
inline ExpansionReport compare(const std::vector<long>& n_grid, const std::vector<Real>& exact,
                               const AsymptoticExpansion& e, const std::vector<std::size_t>& truncations) {
  if (n_grid.size() < 4) throw UsageError("n_grid needs at least 4 points for a decay fit");
  if (exact.size() != n_grid.size()) throw UsageError("exact values do not match n_grid");
  if (truncations.empty()) throw UsageError("no truncations requested");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw UsageError("n_grid must be strictly increasing");
  }
  if (n_grid.front() < 1) throw UsageError("n_grid must be positive");
  ExpansionReport rep;
  rep.quantity = e.quantity();
  rep.m = e.m();
  rep.t = e.t().is_zero() ? "0" : e.t().str(20);
  rep.n_grid = n_grid;
  rep.exact = exact;
  rep.truncations = truncations;
  const std::size_t N = n_grid.size();
  rep.fit_points = std::max<std::size_t>(4, (N + 1) / 2);
  const std::size_t first_fit = N - rep.fit_points;
  for (std::size_t k : truncations) {
    std::vector<Real> tv, rv;
    std::vector<double> dom;
    for (std::size_t i = 0; i < N; ++i) {
      const Real n(n_grid[i]);
      tv.push_back(e.evaluate(n, k));
      rv.push_back(exact[i] - tv.back());
      double d = NAN;
      for (std::size_t j = k; j < e.size(); ++j) {
        Real omitted = e.term_value(j, n);
        if (!omitted.is_zero()) {
          d = (abs(rv.back()) / abs(omitted)).to_double();
          break;
        }
      }
      dom.push_back(d);
    }
    std::vector<long> fn(n_grid.begin() + static_cast<long>(first_fit), n_grid.end());
    std::vector<Real> fr(rv.begin() + static_cast<long>(first_fit), rv.end());
    const LineFit fit = log_log_fit(fn, fr);
    long mono = n_grid.back();
    for (std::size_t i = N - 1; i > 0; --i) {
      if (abs(rv[i]) <= abs(rv[i - 1])) {
        mono = n_grid[i - 1];
      } else {
        break;
      }
    }
    rep.truncated.push_back(std::move(tv));
    rep.residuals.push_back(std::move(rv));
    rep.fitted_orders.push_back(fit.slope);
    rep.r_squared.push_back(fit.r_squared);
    rep.expected_orders.push_back(e.next_power(k).to_double());
    rep.dominance.push_back(std::move(dom));
    rep.monotone_from.push_back(mono);
  }
  return rep;
}

/// Exact values of the expanded quantity read from a recurrence table.
inline std::vector<Real> exact_values(const RecurrenceTable& rec, Quantity qn, const std::vector<long>& n_grid) {
  std::vector<Real> out;
  for (long n : n_grid) {
    const auto i = static_cast<std::size_t>(n);
    switch (qn) {
      case Quantity::beta: out.push_back(rec.beta.at(i)); break;
      case Quantity::p: out.push_back(rec.p.at(i)); break;
      case Quantity::lnD:
      case Quantity::lnD0: out.push_back(rec.lnD.at(i)); break;
      case Quantity::lnh: out.push_back(rec.lnh.at(i)); break;
    }
  }
  return out;
}

inline ExpansionReport compare(const RecurrenceTable& rec, const AsymptoticExpansion& e,
                               const std::vector<long>& n_grid, const std::vector<std::size_t>& truncations) {
  if (rec.weight.m() != e.m()) throw UsageError("table and expansion have different m");
  return compare(n_grid, exact_values(rec, e.quantity(), n_grid), e, truncations);
}

}  // namespace freud

#endif  // FREUD_ASYMPTOTICS_HPP
