#pragma once

// Frobenius series solution of
//
//   -s^2 (psi'' + (1 - nu+ - nu-)/z psi' + nu+ nu-/z^2 psi) + (1/z) sum_n v_n z^n psi = 0
//
// around the regular singular point z = 0. The solution on branch nu is
// psi(z) = sum_m A_m(z), with A_0 = z^nu and
//
//   A_{m+1} = s^-2 / ((m+1+nu-nu+)(m+1+nu-nu-)) * sum_{n=0}^{N} v_n z^{n+1} A_{m-n}.
//
// z^nu uses the principal branch of the logarithm.

#include "seriesode/apriori.hpp"
#include "seriesode/mpcore.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seriesode {

// ---------------------------------------------------------------------------
// Data model
// ---------------------------------------------------------------------------

/// Parameters s, nu+, nu-, v_0..v_N.
struct EquationSpec {
  ExactScalar s{1};
  ExactScalar nu_plus{0};
  ExactScalar nu_minus{0};
  std::vector<ExactScalar> v;

  long degree() const { return static_cast<long>(v.size()) - 1; }
};

enum class Branch { plus, minus };

inline std::string_view to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

struct EvalRequest {
  EquationSpec eq;
  ExactScalar z;
  Branch branch = Branch::minus;
  PrecisionSpec prec = digits_to_bits(50);
  bool want_derivative = false;
  std::optional<long> max_terms;
};

/// Largest-term exponents, stopping index, and the error digit estimates
/// derived from them.
struct SeriesDiagnostics {
  BinaryExponent maxAExponent;
  long maxA_at = 0;
  BinaryExponent maxAdExponent;
  long maxAd_at = 0;
  long terms_summed = 0;
  double lgErrorF = 0.0;
  double lgErrorFd = 0.0;
};

struct SeriesResult {
  Complex psi;
  std::optional<Complex> dpsi;
  SeriesDiagnostics diag;
  PrecisionSpec prec;
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class Rejection { ZeroPoint, ZeroS, DegenerateIndicial, EmptyCoefficients };

inline std::string_view to_string(Rejection r) {
  switch (r) {
    case Rejection::ZeroPoint: return "ZeroPoint";
    case Rejection::ZeroS: return "ZeroS";
    case Rejection::DegenerateIndicial: return "DegenerateIndicial";
    case Rejection::EmptyCoefficients: return "EmptyCoefficients";
  }
  return "Unknown";
}

class SeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public SeriesError {
 public:
  explicit ValidationError(Rejection r) : SeriesError(std::string(to_string(r))), reason_(r) {}
  Rejection reason() const { return reason_; }

 private:
  Rejection reason_;
};

class NonConvergence : public SeriesError {
 public:
  explicit NonConvergence(long terms)
      : SeriesError("series did not meet the stopping criterion after " + std::to_string(terms) +
                    " terms"),
        terms_(terms) {}
  long terms() const { return terms_; }

 private:
  long terms_;
};

// ---------------------------------------------------------------------------
// Error-digit constants
// ---------------------------------------------------------------------------

/// Empirical guard digits added to the largest-term error estimate.
struct GuardDigits {
  double value = 4.30;
  double derivative = 3.02;
};

inline double lg_error_from_exponent(BinaryExponent max_exponent, long bits, double guard) {
  return (max_exponent.as_double() - static_cast<double>(bits)) * kLog10Of2 + guard;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

/// k such that nu+ - nu- == k exactly, if any.
inline std::optional<long> integer_gap(const EquationSpec& eq) {
  return (eq.nu_plus - eq.nu_minus).as_integer();
}

/// True when `branch` is the lower exponent of an integer-spaced pair.
inline bool is_lower_of_integer_pair(const EquationSpec& eq, Branch branch, long* gap) {
  const auto k = integer_gap(eq);
  if (!k) return false;
  *gap = std::labs(*k);
  if (*k >= 0) return branch == Branch::minus;
  return branch == Branch::plus;
}

}  // namespace detail

/// Typed rejection for inputs the series cannot handle, or nullopt.
inline std::optional<Rejection> validate(const EquationSpec& eq, const ExactScalar& z, Branch branch) {
  if (eq.v.empty()) return Rejection::EmptyCoefficients;
  if (z.is_zero()) return Rejection::ZeroPoint;
  if (eq.s.is_zero()) return Rejection::ZeroS;
  long gap = 0;
  if (detail::is_lower_of_integer_pair(eq, branch, &gap)) {
    // Ordinary point for z^{-nu-} psi: the only integer spacing we accept.
    const bool ordinary = gap == 1 && eq.v.front().is_zero();
    if (!ordinary) return Rejection::DegenerateIndicial;
  }
  return std::nullopt;
}

inline std::optional<Rejection> validate(const EvalRequest& req) {
  return validate(req.eq, req.z, req.branch);
}

// ---------------------------------------------------------------------------
// Stopping rule
// ---------------------------------------------------------------------------

enum class StopDecision { proceed, stop, exhausted };

/// Stops once K consecutive terms fall more than (P + guard) decimal digits
/// below the running largest term, with K = N + 3 and at least N + 2 terms
/// summed.
class StopCriterion {
 public:
  StopCriterion(long digits, long degree, long max_terms, long guard_digits = 10)
      : threshold_bits_(ceil_bits(digits + guard_digits)),
        needed_(degree + 3),
        min_index_(degree + 1),
        max_terms_(max_terms) {}

  StopDecision observe(long m, BinaryExponent e) {
    if (e > max_) {
      max_ = e;
      argmax_ = m;
    }
    const bool below = e.is_zero() || (!max_.is_zero() && e.value() < max_.value() - threshold_bits_);
    run_ = below ? run_ + 1 : 0;
    if (run_ >= needed_ && m >= min_index_) return StopDecision::stop;
    if (m >= max_terms_) return StopDecision::exhausted;
    return StopDecision::proceed;
  }

  BinaryExponent running_max() const { return max_; }
  long argmax() const { return argmax_; }
  long threshold_bits() const { return threshold_bits_; }
  long consecutive_needed() const { return needed_; }

 private:
  static long ceil_bits(long digits) {
    return static_cast<long>(std::ceil(static_cast<double>(digits) * kLog2Of10));
  }

  long threshold_bits_;
  long needed_;
  long min_index_;
  long max_terms_;
  BinaryExponent max_;
  long argmax_ = 0;
  long run_ = 0;
};

// ---------------------------------------------------------------------------
// Kernel arithmetic
// ---------------------------------------------------------------------------

namespace detail {

/// In-place operations on Real with no allocation in the hot loop.
class RealArith {
 public:
  using Scalar = Real;
  explicit RealArith(long bits) : tmp_(bits) {}

  static Scalar make(long bits) { return Real(bits); }
  static void set_zero(Real& x) { mpfr_set_zero(x.get(), 1); }
  static bool is_zero(const Real& x) { return x.is_zero(); }
  static BinaryExponent exponent(const Real& x) { return x.exponent(); }
  static void add(Real& acc, const Real& x) { mpfr_add(acc.get(), acc.get(), x.get(), MPFR_RNDN); }

  void add_mul(Real& acc, const Real& a, const Real& b) {
    mpfr_mul(tmp_.get(), a.get(), b.get(), MPFR_RNDN);
    mpfr_add(acc.get(), acc.get(), tmp_.get(), MPFR_RNDN);
  }
  void mul(Real& out, const Real& a, const Real& b) { mpfr_mul(out.get(), a.get(), b.get(), MPFR_RNDN); }
  void div(Real& out, const Real& a, const Real& b) { mpfr_div(out.get(), a.get(), b.get(), MPFR_RNDN); }
  /// out = (x + k) * k
  static void shifted_product(Real& out, const Real& x, long k) {
    mpfr_add_si(out.get(), x.get(), k, MPFR_RNDN);
    mpfr_mul_si(out.get(), out.get(), k, MPFR_RNDN);
  }
  /// out = base + k * step
  void affine(Real& out, const Real& base, const Real& step, long k) {
    mpfr_mul_si(out.get(), step.get(), k, MPFR_RNDN);
    mpfr_add(out.get(), out.get(), base.get(), MPFR_RNDN);
  }
  /// acc += k * x
  void add_scaled(Real& acc, const Real& x, long k) {
    mpfr_mul_si(tmp_.get(), x.get(), k, MPFR_RNDN);
    mpfr_add(acc.get(), acc.get(), tmp_.get(), MPFR_RNDN);
  }
  /// Rounds x into out at out's precision.
  static void assign(Real& out, const Real& x) { mpfr_set(out.get(), x.get(), MPFR_RNDN); }
  static Complex to_complex(const Real& x) { return Complex(x); }

 private:
  Real tmp_;
};

class ComplexArith {
 public:
  using Scalar = Complex;
  explicit ComplexArith(long bits) : t1_(bits), t2_(bits), t3_(bits), t4_(bits) {}

  static Scalar make(long bits) { return Complex(bits); }
  static void set_zero(Complex& x) {
    mpfr_set_zero(x.re.get(), 1);
    mpfr_set_zero(x.im.get(), 1);
  }
  static bool is_zero(const Complex& x) { return x.is_zero(); }
  static BinaryExponent exponent(const Complex& x) { return x.exponent(); }
  static void add(Complex& acc, const Complex& x) {
    mpfr_add(acc.re.get(), acc.re.get(), x.re.get(), MPFR_RNDN);
    mpfr_add(acc.im.get(), acc.im.get(), x.im.get(), MPFR_RNDN);
  }

  void add_mul(Complex& acc, const Complex& a, const Complex& b) {
    product(a, b);
    mpfr_add(acc.re.get(), acc.re.get(), t1_.get(), MPFR_RNDN);
    mpfr_add(acc.im.get(), acc.im.get(), t2_.get(), MPFR_RNDN);
  }
  void mul(Complex& out, const Complex& a, const Complex& b) {
    product(a, b);
    mpfr_swap(out.re.get(), t1_.get());
    mpfr_swap(out.im.get(), t2_.get());
  }
  void div(Complex& out, const Complex& a, const Complex& b) {
    // a * conj(b) / |b|^2
    mpfr_sqr(t3_.get(), b.re.get(), MPFR_RNDN);
    mpfr_sqr(t4_.get(), b.im.get(), MPFR_RNDN);
    mpfr_add(t3_.get(), t3_.get(), t4_.get(), MPFR_RNDN);
    mpfr_mul(t1_.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_mul(t4_.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_add(t1_.get(), t1_.get(), t4_.get(), MPFR_RNDN);
    mpfr_mul(t2_.get(), a.im.get(), b.re.get(), MPFR_RNDN);
    mpfr_mul(t4_.get(), a.re.get(), b.im.get(), MPFR_RNDN);
    mpfr_sub(t2_.get(), t2_.get(), t4_.get(), MPFR_RNDN);
    mpfr_div(out.re.get(), t1_.get(), t3_.get(), MPFR_RNDN);
    mpfr_div(out.im.get(), t2_.get(), t3_.get(), MPFR_RNDN);
  }
  static void shifted_product(Complex& out, const Complex& x, long k) {
    mpfr_add_si(out.re.get(), x.re.get(), k, MPFR_RNDN);
    mpfr_mul_si(out.re.get(), out.re.get(), k, MPFR_RNDN);
    mpfr_mul_si(out.im.get(), x.im.get(), k, MPFR_RNDN);
  }
  void affine(Complex& out, const Complex& base, const Complex& step, long k) {
    mpfr_mul_si(out.re.get(), step.re.get(), k, MPFR_RNDN);
    mpfr_add(out.re.get(), out.re.get(), base.re.get(), MPFR_RNDN);
    mpfr_mul_si(out.im.get(), step.im.get(), k, MPFR_RNDN);
    mpfr_add(out.im.get(), out.im.get(), base.im.get(), MPFR_RNDN);
  }
  void add_scaled(Complex& acc, const Complex& x, long k) {
    mpfr_mul_si(t1_.get(), x.re.get(), k, MPFR_RNDN);
    mpfr_add(acc.re.get(), acc.re.get(), t1_.get(), MPFR_RNDN);
    mpfr_mul_si(t1_.get(), x.im.get(), k, MPFR_RNDN);
    mpfr_add(acc.im.get(), acc.im.get(), t1_.get(), MPFR_RNDN);
  }
  static void assign(Complex& out, const Complex& x) {
    mpfr_set(out.re.get(), x.re.get(), MPFR_RNDN);
    mpfr_set(out.im.get(), x.im.get(), MPFR_RNDN);
  }
  static Complex to_complex(const Complex& x) { return x; }

 private:
  // (t1, t2) = a * b
  void product(const Complex& a, const Complex& b) {
    mpfr_mul(t1_.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_mul(t3_.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_sub(t1_.get(), t1_.get(), t3_.get(), MPFR_RNDN);
    mpfr_mul(t2_.get(), a.re.get(), b.im.get(), MPFR_RNDN);
    mpfr_mul(t3_.get(), a.im.get(), b.re.get(), MPFR_RNDN);
    mpfr_add(t2_.get(), t2_.get(), t3_.get(), MPFR_RNDN);
  }

  Real t1_, t2_, t3_, t4_;
};

/// Inputs to the recursion, already converted to the working scalar type.
template <class Scalar>
struct KernelInput {
  std::vector<Scalar> V;           // v_n z^{n+1} / s^2
  std::vector<bool> V_zero;        // exact zeros are skipped
  Scalar gap;                      // nu - (other exponent)
  Scalar first;                    // A_0 = z^nu
  bool ordinary_point = false;     // A_1 = 0 convention
  std::optional<Scalar> nu_over_z; // derivative weights (nu + m)/z = nu/z + m/z
  std::optional<Scalar> inv_z;
};

struct KernelOutput {
  Complex psi;
  std::optional<Complex> dpsi;
  SeriesDiagnostics diag;
};

template <class Arith>
KernelOutput run_kernel(const KernelInput<typename Arith::Scalar>& in, long bits, long digits,
                        long max_terms) {
  using Scalar = typename Arith::Scalar;
  Arith ar(bits);
  const long degree = static_cast<long>(in.V.size()) - 1;
  const long window = degree + 1;
  const bool deriv = in.inv_z.has_value();

  // ring[(m mod window)] holds A_m; earlier slots start as A_{-n} = 0.
  std::vector<Scalar> ring;
  ring.reserve(static_cast<size_t>(window));
  for (long i = 0; i < window; ++i) ring.push_back(Arith::make(bits));
  ring[0] = in.first;

  Scalar psi = in.first;
  Scalar moment = Arith::make(bits);  // sum of m A_m
  Scalar acc = Arith::make(bits);
  Scalar denom = Arith::make(bits);

  // psi' = (nu psi + sum m A_m) / z. The exponents of the individual terms
  // (nu + m) A_m / z are tracked in a short precision.
  constexpr long kTrackBits = 64;
  Arith low(kTrackBits);
  Scalar low_a = Arith::make(kTrackBits);
  Scalar low_w = Arith::make(kTrackBits);
  Scalar low_nu = Arith::make(kTrackBits);
  Scalar low_inv = Arith::make(kTrackBits);
  if (deriv) {
    Arith::assign(low_nu, *in.nu_over_z);
    Arith::assign(low_inv, *in.inv_z);
  }

  StopCriterion stop(digits, degree, max_terms);
  BinaryExponent max_d;
  long max_d_at = 0;
  auto track_derivative = [&](long m, const Scalar& a) {
    if (m > 0) ar.add_scaled(moment, a, m);
    Arith::assign(low_a, a);
    low.affine(low_w, low_nu, low_inv, m);
    low.mul(low_a, low_a, low_w);
    const BinaryExponent e = Arith::exponent(low_a);
    if (e > max_d) {
      max_d = e;
      max_d_at = m;
    }
  };
  if (deriv) track_derivative(0, in.first);

  StopDecision decision = stop.observe(0, Arith::exponent(in.first));
  long m = 0;
  while (decision == StopDecision::proceed) {
    Arith::set_zero(acc);
    const long upto = std::min(degree, m);
    for (long n = 0; n <= upto; ++n) {
      if (in.V_zero[static_cast<size_t>(n)]) continue;
      ar.add_mul(acc, in.V[static_cast<size_t>(n)], ring[static_cast<size_t>((m - n) % window)]);
    }
    Scalar& next = ring[static_cast<size_t>((m + 1) % window)];
    if (m == 0 && in.ordinary_point) {
      Arith::set_zero(next);
    } else {
      Arith::shifted_product(denom, in.gap, m + 1);
      if (Arith::is_zero(denom)) throw SeriesError("vanishing recursion denominator");
      ar.div(next, acc, denom);
    }
    Arith::add(psi, next);
    ++m;
    if (deriv) track_derivative(m, next);
    decision = stop.observe(m, Arith::exponent(next));
  }
  if (decision == StopDecision::exhausted) throw NonConvergence(m);

  KernelOutput out{Arith::to_complex(psi), std::nullopt, {}};
  if (deriv) {
    Scalar dpsi = Arith::make(bits);
    ar.mul(dpsi, psi, *in.nu_over_z);
    ar.add_mul(dpsi, moment, *in.inv_z);
    out.dpsi = Arith::to_complex(dpsi);
  }
  out.diag.maxAExponent = stop.running_max();
  out.diag.maxA_at = stop.argmax();
  out.diag.maxAdExponent = max_d;
  out.diag.maxAd_at = max_d_at;
  out.diag.terms_summed = m;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

inline constexpr long kFallbackMaxTerms = 10'000'000;

/// The closed-form predictor family matching an equation, when there is one:
/// s = 1, nu- = 0, nu+ = 1/2, v = [v0, +-c^2/2, 1/4].
inline std::optional<AprioriModel> matching_family(const EquationSpec& eq) {
  if (eq.v.size() != 3) return std::nullopt;
  auto real_is = [](const ExactScalar& x, long p, long q) {
    return x.is_exact() && x.rational() == ComplexRational{mpq_class(p, q), 0};
  };
  if (!real_is(eq.s, 1, 1) || !real_is(eq.nu_minus, 0, 1) || !real_is(eq.nu_plus, 1, 2) ||
      !real_is(eq.v[2], 1, 4) || !eq.v[1].is_real())
    return std::nullopt;
  const double v1 = eq.v[1].re_double();
  const double c = std::sqrt(2.0 * std::fabs(v1));
  return v1 >= 0.0 ? AprioriModel::anharmonic(c) : AprioriModel::doublewell(c);
}

/// The equation whose expansion the closed-form family describes at
/// eps = 0: potential (y^2 + c^2)^2 (anharmonic) or (y^2 - c^2)^2 (doublewell).
inline EquationSpec family_equation(Family family, const mpq_class& c) {
  const mpq_class c2 = c * c;
  EquationSpec eq;
  eq.nu_plus = ExactScalar(1, 2);
  const mpq_class half = c2 / 2;
  eq.v = {ExactScalar(mpq_class(c2 * c2 / 4)), ExactScalar(family == Family::anharmonic ? half : mpq_class(-half)),
          ExactScalar(1, 4)};
  return eq;
}

/// Twice the predicted term count for closed-form families, else a fixed cap.
inline long default_max_terms(const EquationSpec& eq, const ExactScalar& z, long digits) {
  const auto model = matching_family(eq);
  if (!model) return kFallbackMaxTerms;
  const double x = std::hypot(z.re_double(), z.im_double());
  if (!(x > 0.0) || !std::isfinite(x)) return kFallbackMaxTerms;
  try {
    const PeakEstimate peak = predict_peak(*model, x);
    // The engine stops relative to the largest term, predictions are absolute.
    const double effective = static_cast<double>(digits) + 10.0 - peak.lg_max_term;
    const long predicted = predict_terms(*model, x, 0.0, effective);
    return std::max<long>(2 * predicted, 4096);
  } catch (const std::exception&) {
    return kFallbackMaxTerms;
  }
}

namespace detail {

inline bool all_real(const EquationSpec& eq) {
  if (!eq.s.is_real() || !eq.nu_plus.is_real() || !eq.nu_minus.is_real()) return false;
  return std::all_of(eq.v.begin(), eq.v.end(), [](const ExactScalar& x) { return x.is_real(); });
}

inline int real_sign(const ExactScalar& x) {
  if (x.is_exact()) return sgn(x.rational().re);
  return x.floating().re.sign();
}

template <class Scalar>
Scalar convert(const ExactScalar& x, long bits);
template <>
inline Real convert<Real>(const ExactScalar& x, long bits) {
  return x.real_part(bits);
}
template <>
inline Complex convert<Complex>(const ExactScalar& x, long bits) {
  return x.to_complex(bits);
}

inline Real power(const Real& z, const ExactScalar& nu, long bits) {
  if (auto k = nu.as_integer()) return pow(z, *k);
  return pow(z, nu.real_part(bits));
}
inline Complex power(const Complex& z, const ExactScalar& nu, long bits) {
  if (auto k = nu.as_integer()) return pow(z, *k);
  return pow(z, nu.to_complex(bits));
}

/// Digits the stopping rule aims for: those actually carried by the working
/// precision, so truncation stays below roundoff when bits were rounded up.
inline long stop_digits(PrecisionSpec prec) { return std::max(prec.digits, bits_to_digits(prec.bits)); }

template <class Arith>
KernelOutput evaluate_with(const EvalRequest& req, long max_terms) {
  using Scalar = typename Arith::Scalar;
  const long bits = req.prec.bits;
  // Intermediate powers and constants get one extra word.
  const long wide = bits + kWordBits;
  const EquationSpec& eq = req.eq;
  const ExactScalar& nu = req.branch == Branch::plus ? eq.nu_plus : eq.nu_minus;
  const ExactScalar& other = req.branch == Branch::plus ? eq.nu_minus : eq.nu_plus;

  KernelInput<Scalar> in;
  const Scalar z = convert<Scalar>(req.z, wide);
  const ExactScalar s2 = eq.s * eq.s;
  const bool unit_s2 = s2.is_exact() && s2.rational() == ComplexRational{1, 0};
  const Scalar s2w = convert<Scalar>(s2, wide);
  Scalar zpow = z;
  for (const ExactScalar& vn : eq.v) {
    Scalar vz = convert<Scalar>(vn, wide) * zpow;
    if (!unit_s2) vz = vz / s2w;
    in.V.push_back(Scalar(vz, bits));
    in.V_zero.push_back(vn.is_zero());
    zpow = zpow * z;
  }
  const ExactScalar gap = nu - other;
  in.gap = convert<Scalar>(gap, bits);
  in.first = Scalar(power(z, nu, wide), bits);
  in.ordinary_point = gap.as_integer() == -1L && eq.v.front().is_zero();
  if (req.want_derivative) {
    const Scalar one = convert<Scalar>(ExactScalar(1), wide);
    const Scalar inv = one / z;
    in.inv_z = Scalar(inv, bits);
    in.nu_over_z = Scalar(convert<Scalar>(nu, wide) * inv, bits);
  }
  return run_kernel<Arith>(in, bits, stop_digits(req.prec), max_terms);
}

}  // namespace detail

/// True when every quantity in the recursion is real for this request.
inline bool uses_real_arithmetic(const EvalRequest& req) {
  if (!detail::all_real(req.eq) || !req.z.is_real()) return false;
  const ExactScalar& nu = req.branch == Branch::plus ? req.eq.nu_plus : req.eq.nu_minus;
  return detail::real_sign(req.z) > 0 || nu.as_integer().has_value();
}

/// Sums the series for psi (and psi' on request) with the largest-term
/// diagnostics. Throws ValidationError or NonConvergence.
inline SeriesResult evaluate(const EvalRequest& req, const GuardDigits& guard = {}) {
  if (auto r = validate(req)) throw ValidationError(*r);
  const long cap = req.max_terms ? *req.max_terms : default_max_terms(req.eq, req.z, detail::stop_digits(req.prec));
  detail::KernelOutput out = uses_real_arithmetic(req)
                                 ? detail::evaluate_with<detail::RealArith>(req, cap)
                                 : detail::evaluate_with<detail::ComplexArith>(req, cap);
  out.diag.lgErrorF = lg_error_from_exponent(out.diag.maxAExponent, req.prec.bits, guard.value);
  out.diag.lgErrorFd = req.want_derivative
                           ? lg_error_from_exponent(out.diag.maxAdExponent, req.prec.bits, guard.derivative)
                           : -std::numeric_limits<double>::infinity();
  return SeriesResult{std::move(out.psi), std::move(out.dpsi), out.diag, req.prec};
}

/// Convenience overload.
inline SeriesResult evaluate(const EquationSpec& eq, const ExactScalar& z, Branch branch,
                             PrecisionSpec prec, bool want_derivative = false) {
  EvalRequest req{eq, z, branch, prec, want_derivative, std::nullopt};
  return evaluate(req);
}

}  // namespace seriesode
