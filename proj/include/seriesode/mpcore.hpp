#pragma once

// Arbitrary-precision real/complex numbers on top of MPFR, exact complex
// rationals on top of GMP, and the precision bookkeeping shared by the
// series engine and its diagnostics.

#include <gmpxx.h>
#include <mpfr.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace seriesode {

inline constexpr long kWordBits = 64;
inline constexpr double kLog10Of2 = 0.30102999566398119521;
inline constexpr double kLog2Of10 = 3.32192809488736234787;

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Precision
// ---------------------------------------------------------------------------

/// Intended precision in decimal digits and the actual mantissa width in bits.
/// The bit width is always a whole number of 64-bit words.
struct PrecisionSpec {
  long digits = 0;
  long bits = 0;

  friend bool operator==(const PrecisionSpec&, const PrecisionSpec&) = default;
};

/// Smallest multiple of 64 bits holding `digits` decimal digits.
inline PrecisionSpec digits_to_bits(long digits) {
  if (digits < 1) throw std::invalid_argument("precision must be at least one decimal digit");
  // ceil(P log2 10) evaluated in integer arithmetic on a 2^-60 scaled constant.
  // log2(10) * 2^60, rounded up.
  constexpr unsigned __int128 kScaled = static_cast<unsigned __int128>(3829922337353294528ULL);
  const unsigned __int128 prod = kScaled * static_cast<unsigned __int128>(digits);
  const unsigned __int128 one = static_cast<unsigned __int128>(1) << 60;
  const long needed = static_cast<long>((prod + one - 1) >> 60);
  const long words = (needed + kWordBits - 1) / kWordBits;
  return {digits, std::max<long>(1, words) * kWordBits};
}

/// Number of decimal digits guaranteed by a mantissa of `bits` bits.
inline long bits_to_digits(long bits) {
  return static_cast<long>(std::floor(static_cast<double>(bits) * kLog10Of2));
}

// ---------------------------------------------------------------------------
// Binary exponent with a zero sentinel
// ---------------------------------------------------------------------------

/// Binary exponent e with 2^(e-1) <= |x| < 2^e. Zero maps to a sentinel that
/// orders below every finite exponent.
class BinaryExponent {
 public:
  constexpr BinaryExponent() = default;
  static constexpr BinaryExponent zero() { return {}; }
  static constexpr BinaryExponent of(long e) {
    BinaryExponent b;
    b.nonzero_ = true;
    b.value_ = e;
    return b;
  }

  constexpr bool is_zero() const { return !nonzero_; }
  constexpr long value() const {
    if (!nonzero_) throw std::logic_error("exponent of zero has no finite value");
    return value_;
  }
  /// Value or a very negative stand-in, for arithmetic in log space.
  constexpr double as_double() const {
    return nonzero_ ? static_cast<double>(value_) : -std::numeric_limits<double>::infinity();
  }

  friend constexpr auto operator<=>(const BinaryExponent&, const BinaryExponent&) = default;

 private:
  bool nonzero_ = false;
  long value_ = 0;
};

// ---------------------------------------------------------------------------
// Real
// ---------------------------------------------------------------------------

/// RAII owner of an mpfr_t. Arithmetic results carry the larger operand
/// precision; all rounding is to nearest.
class Real {
 public:
  explicit Real(long bits = kWordBits) {
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
  }
  Real(long value, long bits) {
    mpfr_init2(v_, bits);
    mpfr_set_si(v_, value, MPFR_RNDN);
  }
  Real(int value, long bits) : Real(static_cast<long>(value), bits) {}
  Real(double value, long bits) {
    mpfr_init2(v_, bits);
    mpfr_set_d(v_, value, MPFR_RNDN);
  }
  Real(const mpq_class& q, long bits) {
    mpfr_init2(v_, bits);
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
  }
  Real(const Real& other, long bits) {
    mpfr_init2(v_, bits);
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  /// Decimal (or any MPFR-readable) text, correctly rounded.
  Real(std::string_view text, long bits) {
    mpfr_init2(v_, bits);
    std::string s(text);
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0) {
      mpfr_clear(v_);
      throw ParseError("not a decimal number: '" + s + "'");
    }
  }

  Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  Real(Real&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  Real& operator=(const Real& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  long prec() const { return static_cast<long>(mpfr_get_prec(v_)); }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_integer() const { return mpfr_integer_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

  /// Exact rational value of the binary float.
  mpq_class to_rational() const {
    mpq_class q;
    mpfr_get_q(q.get_mpq_t(), v_);
    return q;
  }

  BinaryExponent exponent() const {
    if (mpfr_zero_p(v_)) return BinaryExponent::zero();
    return BinaryExponent::of(static_cast<long>(mpfr_get_exp(v_)));
  }

  /// Scientific notation with `digits` significant digits, e.g. "1.25e-3".
  std::string to_string(long digits) const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    if (mpfr_zero_p(v_)) return "0";
    if (digits < 1) digits = 1;
    mpfr_exp_t exp10 = 0;
    char* raw = mpfr_get_str(nullptr, &exp10, 10, static_cast<size_t>(digits), v_, MPFR_RNDN);
    std::string mant(raw);
    mpfr_free_str(raw);
    std::string out;
    if (mant.front() == '-') {
      out.push_back('-');
      mant.erase(0, 1);
    }
    out.push_back(mant[0]);
    if (mant.size() > 1) {
      out.push_back('.');
      out.append(mant, 1, std::string::npos);
    }
    out += "e" + std::to_string(static_cast<long>(exp10) - 1);
    return out;
  }

  Real& operator+=(const Real& b) { return apply(b, mpfr_add); }
  Real& operator-=(const Real& b) { return apply(b, mpfr_sub); }
  Real& operator*=(const Real& b) { return apply(b, mpfr_mul); }
  Real& operator/=(const Real& b) { return apply(b, mpfr_div); }

  friend Real operator+(const Real& a, const Real& b) { return binary(a, b, mpfr_add); }
  friend Real operator-(const Real& a, const Real& b) { return binary(a, b, mpfr_sub); }
  friend Real operator*(const Real& a, const Real& b) { return binary(a, b, mpfr_mul); }
  friend Real operator/(const Real& a, const Real& b) { return binary(a, b, mpfr_div); }
  friend Real operator-(const Real& a) {
    Real r(a.prec());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator*(const Real& a, long k) {
    Real r(a.prec());
    mpfr_mul_si(r.v_, a.v_, k, MPFR_RNDN);
    return r;
  }
  friend Real operator*(long k, const Real& a) { return a * k; }
  friend Real operator/(const Real& a, long k) {
    Real r(a.prec());
    mpfr_div_si(r.v_, a.v_, k, MPFR_RNDN);
    return r;
  }
  friend Real operator+(const Real& a, long k) {
    Real r(a.prec());
    mpfr_add_si(r.v_, a.v_, k, MPFR_RNDN);
    return r;
  }
  friend Real operator-(const Real& a, long k) {
    Real r(a.prec());
    mpfr_sub_si(r.v_, a.v_, k, MPFR_RNDN);
    return r;
  }
  friend Real operator*(const Real& a, int k) { return a * static_cast<long>(k); }
  friend Real operator*(int k, const Real& a) { return a * static_cast<long>(k); }
  friend Real operator/(const Real& a, int k) { return a / static_cast<long>(k); }
  friend Real operator+(const Real& a, int k) { return a + static_cast<long>(k); }
  friend Real operator-(const Real& a, int k) { return a - static_cast<long>(k); }
  friend Real operator*(const Real& a, double k) { return a * Real(k, a.prec()); }
  friend Real operator*(double k, const Real& a) { return a * k; }
  friend Real operator+(const Real& a, double k) { return a + Real(k, a.prec()); }
  friend Real operator-(const Real& a, double k) { return a - Real(k, a.prec()); }
  friend Real operator-(double k, const Real& a) { return Real(k, a.prec()) - a; }
  friend Real operator/(const Real& a, double k) { return a / Real(k, a.prec()); }
  friend Real operator/(double k, const Real& a) { return Real(k, a.prec()) / a; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  friend bool operator==(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const Real& a, double b) {
    const int c = mpfr_cmp_d(a.v_, b);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }

 private:
  using BinaryFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
  Real& apply(const Real& b, BinaryFn fn) {
    fn(v_, v_, b.v_, MPFR_RNDN);
    return *this;
  }
  static Real binary(const Real& a, const Real& b, BinaryFn fn) {
    Real r(std::max(a.prec(), b.prec()));
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }

  mpfr_t v_;
};

namespace detail {
using UnaryFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);
inline Real unary(const Real& a, UnaryFn fn) {
  Real r(a.prec());
  fn(r.get(), a.get(), MPFR_RNDN);
  return r;
}
}  // namespace detail

inline Real abs(const Real& a) { return detail::unary(a, mpfr_abs); }
inline Real sqrt(const Real& a) { return detail::unary(a, mpfr_sqrt); }
inline Real exp(const Real& a) { return detail::unary(a, mpfr_exp); }
inline Real log(const Real& a) { return detail::unary(a, mpfr_log); }
inline Real sin(const Real& a) { return detail::unary(a, mpfr_sin); }
inline Real cos(const Real& a) { return detail::unary(a, mpfr_cos); }
inline Real pow(const Real& a, const Real& b) {
  Real r(std::max(a.prec(), b.prec()));
  mpfr_pow(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
inline Real pow(const Real& a, long k) {
  Real r(a.prec());
  mpfr_pow_si(r.get(), a.get(), k, MPFR_RNDN);
  return r;
}
inline Real atan2(const Real& y, const Real& x) {
  Real r(std::max(y.prec(), x.prec()));
  mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN);
  return r;
}
inline Real hypot(const Real& a, const Real& b) {
  Real r(std::max(a.prec(), b.prec()));
  mpfr_hypot(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
inline Real pi(long bits) {
  Real r(bits);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

/// log10|x| as a double; -inf for zero. Safe for exponents far outside double range.
inline double lg_abs(const Real& x) {
  if (x.is_zero()) return -std::numeric_limits<double>::infinity();
  long e = 0;
  const double d = mpfr_get_d_2exp(&e, x.get(), MPFR_RNDN);
  return std::log10(std::fabs(d)) + static_cast<double>(e) * kLog10Of2;
}

// ---------------------------------------------------------------------------
// Complex
// ---------------------------------------------------------------------------

/// Complex number with arbitrary-precision components.
struct Complex {
  Real re;
  Real im;

  explicit Complex(long bits = kWordBits) : re(bits), im(bits) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  explicit Complex(Real r) : re(std::move(r)), im(re.prec()) {}
  Complex(const Complex& other, long bits) : re(other.re, bits), im(other.im, bits) {}

  long prec() const { return std::max(re.prec(), im.prec()); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_real() const { return im.is_zero(); }

  /// Exponent of max(|re|, |im|).
  BinaryExponent exponent() const { return std::max(re.exponent(), im.exponent()); }

  Complex& operator+=(const Complex& b) {
    re += b.re;
    im += b.im;
    return *this;
  }
  Complex& operator-=(const Complex& b) {
    re -= b.re;
    im -= b.im;
    return *this;
  }

  friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
  friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
  friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }
  friend Complex operator*(const Real& b, const Complex& a) { return a * b; }
  friend Complex operator*(const Complex& a, long k) { return {a.re * k, a.im * k}; }
  friend Complex operator/(const Complex& a, const Complex& b) {
    // Smith's algorithm keeps intermediates in range.
    if (abs(b.re) >= abs(b.im)) {
      Real r = b.im / b.re;
      Real den = b.re + b.im * r;
      return {(a.re + a.im * r) / den, (a.im - a.re * r) / den};
    }
    Real r = b.re / b.im;
    Real den = b.re * r + b.im;
    return {(a.re * r + a.im) / den, (a.im * r - a.re) / den};
  }
  friend Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }
};

inline Real abs(const Complex& z) { return hypot(z.re, z.im); }
inline Real arg(const Complex& z) { return atan2(z.im, z.re); }
inline Complex conj(const Complex& z) { return {z.re, -z.im}; }

/// log10|z| as a double; -inf for zero.
inline double lg_abs(const Complex& z) {
  if (z.is_zero()) return -std::numeric_limits<double>::infinity();
  const double a = lg_abs(z.re);
  const double b = lg_abs(z.im);
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + 0.5 * std::log10(1.0 + std::pow(10.0, 2.0 * (lo - hi)));
}

inline Complex exp(const Complex& z) {
  Real mag = exp(z.re);
  return {mag * cos(z.im), mag * sin(z.im)};
}
/// Principal logarithm, arg in (-pi, pi].
inline Complex log(const Complex& z) { return {log(abs(z)), arg(z)}; }

inline Complex pow(const Complex& z, long k) {
  Complex result(Real(1L, z.prec()), Real(z.prec()));
  Complex base = z;
  unsigned long n = k < 0 ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
  while (n) {
    if (n & 1UL) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  if (k < 0) {
    Complex one(Real(1L, z.prec()), Real(z.prec()));
    return one / result;
  }
  return result;
}

/// z^w on the principal branch.
inline Complex pow(const Complex& z, const Complex& w) { return exp(w * log(z)); }

// ---------------------------------------------------------------------------
// Exact scalars
// ---------------------------------------------------------------------------

/// Complex number with exact rational components.
struct ComplexRational {
  mpq_class re;
  mpq_class im;

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }
  bool is_integer() const { return is_real() && re.get_den() == 1; }

  friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend ComplexRational operator+(const ComplexRational& a, const ComplexRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ComplexRational operator-(const ComplexRational& a, const ComplexRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ComplexRational operator-(const ComplexRational& a) { return {-a.re, -a.im}; }
  friend ComplexRational operator*(const ComplexRational& a, const ComplexRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
};

/// Parses an exact rational from "p/q", an integer, or a finite decimal with
/// optional exponent ("-1.25e-3"). Decimal literals are exact rationals.
inline mpq_class parse_rational(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '_') s.push_back(c);
  if (s.empty()) throw ParseError("empty number");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    mpq_class q;
    try {
      std::string num = s.substr(0, slash);
      if (!num.empty() && num[0] == '+') num.erase(0, 1);
      mpz_class p(num, 10);
      std::string den = s.substr(slash + 1);
      if (!den.empty() && den[0] == '+') den.erase(0, 1);
      mpz_class d(den, 10);
      if (d == 0) throw ParseError("zero denominator in '" + s + "'");
      q = mpq_class(p, d);
    } catch (const std::invalid_argument&) {
      throw ParseError("not a rational: '" + s + "'");
    }
    q.canonicalize();
    return q;
  }
  size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = (s[i++] == '-');
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw ParseError("not a number: '" + s + "'");
  long exp10 = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw ParseError("not a number: '" + s + "'");
    ++i;
    std::string e = s.substr(i);
    if (e.empty()) throw ParseError("missing exponent in '" + s + "'");
    size_t used = 0;
    try {
      exp10 = std::stol(e, &used);
    } catch (const std::exception&) {
      throw ParseError("bad exponent in '" + s + "'");
    }
    if (used != e.size()) throw ParseError("bad exponent in '" + s + "'");
  }
  mpz_class num(digits, 10);
  if (negative) num = -num;
  const long scale = exp10 - frac_digits;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  mpq_class q = scale >= 0 ? mpq_class(num * pow10) : mpq_class(num, pow10);
  q.canonicalize();
  return q;
}

inline std::string rational_to_string(mpq_class q) {
  q.canonicalize();
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Either an exact complex rational or an arbitrary-precision complex value.
/// Conversion to a Complex at a given precision is correctly rounded per
/// component for the rational alternative.
class ExactScalar {
 public:
  ExactScalar() : v_(ComplexRational{}) {}
  ExactScalar(ComplexRational q) : v_(std::move(q)) { canonicalize(); }
  ExactScalar(mpq_class re) : v_(ComplexRational{std::move(re), 0}) { canonicalize(); }
  ExactScalar(long p, long q = 1) : v_(ComplexRational{mpq_class(p, q), 0}) {
    if (q == 0) throw std::invalid_argument("zero denominator");
    std::get<ComplexRational>(v_).re.canonicalize();
  }
  explicit ExactScalar(Complex z) : v_(std::move(z)) {}

  /// Exact value of a double (binary fractions are rational).
  static ExactScalar from_double(double re, double im = 0.0) {
    return ExactScalar(ComplexRational{mpq_class(re), mpq_class(im)});
  }

  bool is_exact() const { return std::holds_alternative<ComplexRational>(v_); }
  const ComplexRational& rational() const { return std::get<ComplexRational>(v_); }
  const Complex& floating() const { return std::get<Complex>(v_); }

  bool is_zero() const {
    return is_exact() ? rational().is_zero() : floating().is_zero();
  }
  bool is_real() const { return is_exact() ? rational().is_real() : floating().is_real(); }
  /// Exactly an integer (real part integral, imaginary part zero).
  std::optional<long> as_integer() const {
    if (is_exact()) {
      if (!rational().is_integer()) return std::nullopt;
      const mpz_class& n = rational().re.get_num();
      if (!n.fits_slong_p()) return std::nullopt;
      return n.get_si();
    }
    const Complex& z = floating();
    if (!z.im.is_zero() || !z.re.is_integer()) return std::nullopt;
    if (mpfr_fits_slong_p(z.re.get(), MPFR_RNDN) == 0) return std::nullopt;
    return z.re.to_long();
  }

  Complex to_complex(long bits) const {
    if (is_exact()) return {Real(rational().re, bits), Real(rational().im, bits)};
    return Complex(floating(), bits);
  }
  Real real_part(long bits) const {
    return is_exact() ? Real(rational().re, bits) : Real(floating().re, bits);
  }
  double re_double() const {
    return is_exact() ? rational().re.get_d() : floating().re.to_double();
  }
  double im_double() const {
    return is_exact() ? rational().im.get_d() : floating().im.to_double();
  }

  /// "p/q" (or "a+bi" with rational parts) for exact values; decimal otherwise.
  std::string to_string(long digits = 40) const {
    if (is_exact()) {
      const auto& q = rational();
      if (q.is_real()) return rational_to_string(q.re);
      std::string im = rational_to_string(q.im);
      if (sgn(q.re) == 0) return im + "i";
      return rational_to_string(q.re) + (sgn(q.im) < 0 ? "" : "+") + im + "i";
    }
    const auto& z = floating();
    std::string re = z.re.to_string(digits);
    if (z.im.is_zero()) return re;
    std::string im = z.im.to_string(digits);
    return re + (im.front() == '-' ? "" : "+") + im + "i";
  }

  friend ExactScalar operator+(const ExactScalar& a, const ExactScalar& b) {
    if (a.is_exact() && b.is_exact()) return ExactScalar(a.rational() + b.rational());
    const long bits = std::max(a.bits_hint(), b.bits_hint());
    return ExactScalar(a.to_complex(bits) + b.to_complex(bits));
  }
  friend ExactScalar operator-(const ExactScalar& a, const ExactScalar& b) {
    if (a.is_exact() && b.is_exact()) return ExactScalar(a.rational() - b.rational());
    const long bits = std::max(a.bits_hint(), b.bits_hint());
    return ExactScalar(a.to_complex(bits) - b.to_complex(bits));
  }
  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    if (a.is_exact() && b.is_exact()) return ExactScalar(a.rational() * b.rational());
    const long bits = std::max(a.bits_hint(), b.bits_hint());
    return ExactScalar(a.to_complex(bits) * b.to_complex(bits));
  }
  friend ExactScalar operator-(const ExactScalar& a) {
    if (a.is_exact()) return ExactScalar(-a.rational());
    return ExactScalar(-a.floating());
  }

 private:
  void canonicalize() {
    auto& q = std::get<ComplexRational>(v_);
    q.re.canonicalize();
    q.im.canonicalize();
  }
  long bits_hint() const { return is_exact() ? kWordBits : floating().prec(); }

  std::variant<ComplexRational, Complex> v_;
};

/// Parses "p/q", decimals, and complex forms "a+bi", "bi", "-i", "1/2-3/4i".
/// Every literal is kept exact.
inline ExactScalar parse_scalar(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  if (s.empty()) throw ParseError("empty scalar");
  // Split at a '+'/'-' that is not leading and not part of an exponent.
  size_t split = std::string::npos;
  for (size_t i = 1; i < s.size(); ++i) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E' && s[i - 1] != '/') {
      split = i;
    }
  }
  auto imag_part = [](std::string part) -> mpq_class {
    part.pop_back();  // trailing 'i'
    if (part.empty() || part == "+") return 1;
    if (part == "-") return -1;
    return parse_rational(part);
  };
  const bool imag_last = s.back() == 'i' || s.back() == 'I';
  if (split == std::string::npos) {
    if (imag_last) return ExactScalar(ComplexRational{0, imag_part(s)});
    return ExactScalar(parse_rational(s));
  }
  if (!imag_last) throw ParseError("complex scalar must end with 'i': '" + s + "'");
  return ExactScalar(ComplexRational{parse_rational(s.substr(0, split)), imag_part(s.substr(split))});
}

/// Binary exponent of max(|re|, |im|).
inline BinaryExponent exponent_of(const Complex& z) { return z.exponent(); }
inline BinaryExponent exponent_of(const Real& x) { return x.exponent(); }

}  // namespace seriesode
