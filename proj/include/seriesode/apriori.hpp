#pragma once

// A-priori estimates of series coefficients, largest term, and term counts
// from the WKB controlling factor S(u) and its Legendre transform.
//
// Two closed-form families are supported, written for x = y^2 = e^u:
//   anharmonic(c):  -Psi'' + (y^2 + c^2)^2 Psi = 0
//   doublewell(c):  -Psi'' + (y^2 - c^2)^2 Psi = 0
// The maximization of log|psi(e^(u + i phi))| over phi is already done
// analytically for both. Predictor arithmetic runs at a fixed 128-bit
// mantissa; results are order-of-magnitude tools and never feed back into
// series values.

#include "seriesode/mpcore.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace seriesode {

inline constexpr long kPredictorBits = 128;

class AprioriDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Family { anharmonic, doublewell };

inline std::string to_string(Family f) {
  return f == Family::anharmonic ? "anharmonic" : "doublewell";
}

/// Closed-form S(u) and derivatives for one potential family.
class AprioriModel {
 public:
  static AprioriModel anharmonic(double c) { return AprioriModel(Family::anharmonic, c); }
  static AprioriModel doublewell(double c) { return AprioriModel(Family::doublewell, c); }

  Family family() const { return family_; }
  double c() const { return c_; }

  /// log(c^2/3): the doublewell switches branch there. -inf when there is no
  /// left branch.
  double breakpoint() const {
    if (family_ == Family::anharmonic || c_ == 0.0) return -INFINITY;
    return std::log(c_ * c_ / 3.0);
  }

  Real S(const Real& u) const { return derivative(u, 0); }
  Real dS(const Real& u) const { return derivative(u, 1); }
  Real d2S(const Real& u) const { return derivative(u, 2); }
  Real d3S(const Real& u) const { return derivative(u, 3); }

  /// k-th u-derivative of S, k = 0..3.
  Real derivative(const Real& u, int k) const {
    const Real E = exp(u);
    const Real c2 = c2_();
    const Real rootE = sqrt(E);
    const Real E32 = E * rootE;
    if (family_ == Family::anharmonic) {
      // S = E^{3/2}/3 + c^2 E^{1/2}
      static constexpr double kA[4] = {1.0 / 3.0, 0.5, 0.75, 9.0 / 8.0};
      static constexpr double kB[4] = {1.0, 0.5, 0.25, 0.125};
      return E32 * kA[k] + c2 * rootE * kB[k];
    }
    if (!on_left(u)) {
      // S = (E + c^2)^{3/2} / 3
      const Real R = sqrt(E + c2);
      switch (k) {
        case 0: return R * R * R / 3L;
        case 1: return E * R / 2L;
        case 2: return E * R / 2L + E * E / R / 4L;
        default: return E * R / 2L + E * E / R * 0.75 - E * E * E / (R * R * R) / 8L;
      }
    }
    // S = c^2 E^{1/2} - E^{3/2}/3
    static constexpr double kA[4] = {-1.0 / 3.0, -0.5, -0.75, -9.0 / 8.0};
    static constexpr double kB[4] = {1.0, 0.5, 0.25, 0.125};
    return E32 * kA[k] + c2 * rootE * kB[k];
  }

  /// log of the WKB prefactor magnitude |y^2 +- c^2|^{-1/2} at the
  /// maximizing phase, and its u-derivative.
  Real log_prefactor(const Real& u) const { return prefactor(u, 0); }
  Real dlog_prefactor(const Real& u) const { return prefactor(u, 1); }

  /// Only every third coefficient is nonzero when c = 0.
  int sparsity() const { return c_ == 0.0 ? 3 : 1; }

  bool on_left(const Real& u) const {
    return family_ == Family::doublewell && c_ != 0.0 && u.to_double() < breakpoint();
  }

 private:
  AprioriModel(Family f, double c) : family_(f), c_(c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be a nonnegative real");
  }

  Real c2_() const { return Real(c_, kPredictorBits) * Real(c_, kPredictorBits); }

  Real prefactor(const Real& u, int k) const {
    const Real E = exp(u);
    const Real c2 = c2_();
    if (family_ == Family::anharmonic) {
      // -1/2 log(E + c^2)
      return k == 0 ? log(E + c2) * -0.5 : E / (E + c2) * -0.5;
    }
    if (on_left(u)) {
      // -1/2 log(c^2 - E)
      return k == 0 ? log(c2 - E) * -0.5 : E / (c2 - E) * 0.5;
    }
    // -1/2 log(e^{u/2} (E + c^2)^{1/2}) = -u/4 - log(E + c^2)/4
    if (k == 0) return u * -0.25 - log(E + c2) * 0.25;
    return Real(-0.25, kPredictorBits) - E / (E + c2) * 0.25;
  }

  Family family_;
  double c_;
};

/// Point on the Legendre-dual curve: m_bar = S'(u), ln|a_{m_bar}| = S - (nu + m_bar) u.
struct LegendrePoint {
  double m_bar = 0.0;
  double ln_a = 0.0;
};

inline LegendrePoint legendre_at(const AprioriModel& model, double u, double nu) {
  const Real uu(u, kPredictorBits);
  const Real m = model.dS(uu);
  const Real ln_a = model.S(uu) - (m + nu) * uu;
  return {m.to_double(), ln_a.to_double()};
}

namespace detail {

/// Smallest-to-largest bracket search plus bisection for f(u) = target with f
/// increasing. Relative tolerance 2^-40 on u.
template <class F>
Real invert_increasing(F&& f, double target, double lower_limit) {
  const Real t(target, kPredictorBits);
  double lo = std::max(-8.0, lower_limit);
  double hi = lo + 16.0;
  int guard = 0;
  while (f(Real(lo, kPredictorBits)) > t) {
    if (lo <= lower_limit || ++guard > 200)
      throw AprioriDomainError("coefficient index below the range of S'(u)");
    const double step = std::max(1.0, std::fabs(lo));
    lo = std::max(lower_limit, lo - step);
  }
  guard = 0;
  while (f(Real(hi, kPredictorBits)) < t) {
    if (++guard > 200) throw AprioriDomainError("no upper bracket for S'(u)");
    hi += std::max(1.0, std::fabs(hi));
  }
  Real a(lo, kPredictorBits);
  Real b(hi, kPredictorBits);
  const double tol = std::ldexp(1.0, -40);
  for (int it = 0; it < 400; ++it) {
    Real mid = (a + b) / 2L;
    if (f(mid) < t) a = mid; else b = mid;
    const double width = (b - a).to_double();
    if (width <= tol * std::max(1.0, std::fabs(mid.to_double()))) break;
  }
  return (a + b) / 2L;
}

}  // namespace detail

/// ln|a_m| from the inverse Legendre transform of S.
inline double coeff_estimate(const AprioriModel& model, double m, double nu) {
  if (!(m > 0.0)) throw AprioriDomainError("coefficient index must be positive");
  const Real u = detail::invert_increasing([&](const Real& x) { return model.dS(x); }, m, -1e4);
  return (model.S(u) - (u * (m + nu))).to_double();
}

/// ln a_m^(e): Legendre inverse of S_eff = S + log WKB prefactor
/// - 1/2 log(2 pi S'') + log(sparsity). For c = 0 this is
/// (2/3)(m + 5/4)(1 - ln(2m + 5/2)) - 1/2 ln(pi/6) at nu = 0.
inline double improved_coeff_estimate(const AprioriModel& model, double m, double nu) {
  if (!(m > 0.0)) throw AprioriDomainError("coefficient index must be positive");
  const double lower = std::isfinite(model.breakpoint()) ? model.breakpoint() + 1e-9 : -1e4;
  auto dS_eff = [&](const Real& u) {
    return model.dS(u) + model.dlog_prefactor(u) - model.d3S(u) / model.d2S(u) / 2L;
  };
  const Real u = detail::invert_increasing(dS_eff, m, lower);
  const Real two_pi = pi(kPredictorBits) * 2L;
  const Real s_eff = model.S(u) + model.log_prefactor(u) - log(two_pi * model.d2S(u)) / 2L +
                     log(Real(static_cast<long>(model.sparsity()), kPredictorBits));
  return (s_eff - u * (m + nu)).to_double();
}

/// Position and size of the largest term at x = y^2 > 0.
struct PeakEstimate {
  double m_peak = 0.0;
  double lg_max_term = 0.0;
};

inline PeakEstimate predict_peak(const AprioriModel& model, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("x must be positive");
  const Real xx(x, kPredictorBits);
  const Real c2 = Real(model.c(), kPredictorBits) * Real(model.c(), kPredictorBits);
  const Real rx = sqrt(xx);
  const Real ln10 = log(Real(10L, kPredictorBits));
  if (model.family() == Family::anharmonic) {
    const Real ln_max = (xx * rx + c2 * rx * 3L) / 3L;
    const Real m = (xx * rx + c2 * rx) / 2L;
    return {m.to_double(), (ln_max / ln10).to_double()};
  }
  const Real R = sqrt(xx + c2);
  const Real ln_max = R * R * R / 3L;
  const Real m = xx * R / 2L;
  return {m.to_double(), (ln_max / ln10).to_double()};
}

struct TermEstimate {
  double m_bar = 0.0;
  double lg_a = 0.0;
  long predicted_terms = 0;
  double lg_max_term = 0.0;
};

/// Smallest integer M >= m_peak with ln|a_M| + (nu + M) ln x <= -P ln 10.
/// `digits` may be any real; small values return the peak index.
inline long predict_terms(const AprioriModel& model, double x, double nu, double digits,
                          bool improved = false) {
  if (!(x > 0.0)) throw std::invalid_argument("x must be positive");
  const double ln_x = std::log(x);
  const double threshold = -digits * std::log(10.0);
  auto f = [&](double m) {
    const double ln_a = improved ? improved_coeff_estimate(model, m, nu) : coeff_estimate(model, m, nu);
    return ln_a + (nu + m) * ln_x;
  };
  long lo = std::max<long>(1, static_cast<long>(std::ceil(predict_peak(model, x).m_peak)));
  if (f(static_cast<double>(lo)) <= threshold) return lo;
  long hi = lo;
  do {
    lo = hi;
    hi *= 2;
    if (hi > (1L << 50)) throw AprioriDomainError("term count overflow");
  } while (f(static_cast<double>(hi)) > threshold);
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (f(static_cast<double>(mid)) <= threshold) hi = mid; else lo = mid;
  }
  return hi;
}

/// Full estimate bundle for a point x and precision P.
inline TermEstimate estimate_terms(const AprioriModel& model, double x, double nu, double digits) {
  const PeakEstimate peak = predict_peak(model, x);
  const LegendrePoint lp = legendre_at(model, std::log(x), nu);
  TermEstimate t;
  t.m_bar = lp.m_bar;
  t.lg_a = lp.ln_a / std::log(10.0);
  t.predicted_terms = predict_terms(model, x, nu, digits);
  t.lg_max_term = peak.lg_max_term;
  return t;
}

/// Terms per sum when e^{y^3/3} is evaluated as k consecutive expansions of
/// length y/k: the larger root of
///   (2/3) M (1 - ln 2M) + 2 M ln(y/k) = -P ln 10.
inline long predict_split_cost(double y, double digits, long k) {
  if (!(y > 0.0)) throw std::invalid_argument("y must be positive");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  const Real yk = Real(y, kPredictorBits) / k;
  const Real target = log(Real(10L, kPredictorBits)) * Real(digits, kPredictorBits) * -1L;
  const Real two_ln_yk = log(yk) * 2L;
  auto g = [&](const Real& M) {
    return M * (Real(1L, kPredictorBits) - log(M * 2L)) * 2L / 3L + M * two_ln_yk - target;
  };
  // g rises to a maximum then decreases without bound; bracket the descending root.
  Real lo(0.5, kPredictorBits);
  Real hi(1.0, kPredictorBits);
  while (g(hi) > 0.0) {
    lo = hi;
    hi = hi * 2L;
    if (hi.to_double() > 1e18) throw AprioriDomainError("split cost did not bracket");
  }
  for (int it = 0; it < 200 && (hi - lo).to_double() > 1e-6; ++it) {
    Real mid = (lo + hi) / 2L;
    if (g(mid) > 0.0) lo = mid; else hi = mid;
  }
  return static_cast<long>(std::ceil(lo.to_double()));
}

}  // namespace seriesode
