#pragma once

// Error model: largest-term digit estimates, the low-precision bootstrap,
// Wronskian self-validation, and precision planning from a cheap probe.

#include "seriesode/frobenius.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

namespace seriesode {

enum class ErrorSource { largest_term, bootstrap };
enum class Quantity { value, derivative };

struct ErrorEstimate {
  double lg_error = 0.0;  // log10 of the estimated absolute error
  ErrorSource source = ErrorSource::largest_term;
};

/// (A - M) log10 2 + G for psi, with G' for psi'.
inline ErrorEstimate estimate_error(const SeriesDiagnostics& diag, PrecisionSpec prec,
                                    Quantity q = Quantity::value, const GuardDigits& guard = {}) {
  if (q == Quantity::value)
    return {lg_error_from_exponent(diag.maxAExponent, prec.bits, guard.value), ErrorSource::largest_term};
  return {lg_error_from_exponent(diag.maxAdExponent, prec.bits, guard.derivative), ErrorSource::largest_term};
}

/// Projects a real error measured at `bits_low` to `bits`:
/// lg eps = lg eps_low - (M - M_low) log10 2 + 2.
inline double bootstrap_error(double lg_eps_low, long bits_low, long bits) {
  if (bits < bits_low) throw std::invalid_argument("bootstrap target precision below the probe precision");
  return lg_eps_low - static_cast<double>(bits - bits_low) * kLog10Of2 + 2.0;
}

struct WronskiReport {
  Complex w_exact;
  Complex w_numeric;
  double lg_delta_e = 0.0;                // log10 of the estimated error
  std::optional<double> lg_delta_r;       // log10 |w_exact - w_numeric|
  SeriesResult plus;
  SeriesResult minus;
};

/// (nu- - nu+) z^{nu+ + nu- - 1} on the principal branch.
inline Complex exact_wronskian(const EquationSpec& eq, const ExactScalar& z, long bits) {
  const ExactScalar expo = eq.nu_plus + eq.nu_minus - ExactScalar(1);
  const Complex zz = z.to_complex(bits);
  Complex zp = [&] {
    if (auto k = expo.as_integer()) return pow(zz, *k);
    return pow(zz, expo.to_complex(bits));
  }();
  return (eq.nu_minus - eq.nu_plus).to_complex(bits) * zp;
}

namespace detail {

/// max{|psi+| d(psi-'), |psi-| d(psi+'), |psi-'| d(psi+), |psi+'| d(psi-)} in log10.
inline double wronskian_error(const SeriesResult& plus, const SeriesResult& minus) {
  return std::max({lg_abs(plus.psi) + minus.diag.lgErrorFd, lg_abs(minus.psi) + plus.diag.lgErrorFd,
                   lg_abs(*minus.dpsi) + plus.diag.lgErrorF, lg_abs(*plus.dpsi) + minus.diag.lgErrorF});
}

}  // namespace detail

/// Evaluates both branches with derivatives and compares
/// psi+ psi-' - psi- psi+' against the exact determinant.
inline WronskiReport wronskian(const EquationSpec& eq, const ExactScalar& z, PrecisionSpec prec) {
  SeriesResult plus = evaluate(eq, z, Branch::plus, prec, true);
  SeriesResult minus = evaluate(eq, z, Branch::minus, prec, true);
  Complex w_num = plus.psi * *minus.dpsi - minus.psi * *plus.dpsi;
  Complex w_exact = Complex(exact_wronskian(eq, z, prec.bits + kWordBits), prec.bits);
  const double lg_e = detail::wronskian_error(plus, minus);
  const double lg_r = lg_abs(w_exact - w_num);
  return WronskiReport{std::move(w_exact), std::move(w_num), lg_e, lg_r, std::move(plus), std::move(minus)};
}

struct PrecisionPlan {
  PrecisionSpec prec;
  double loss_digits = 0.0;    // predicted lg error of W at zero digits of precision
  long probe_digits = 0;       // precision of the last probe
  int probes = 0;
};

struct PlanOptions {
  long probe_digits = 20;
  long guard_digits = 10;
  int max_probes = 6;
};

/// Smallest precision whose predicted Wronskian error is at most
/// 10^-target_digits. A low-precision probe supplies magnitudes, largest-term
/// exponents and the real error of W; the probe is repeated at higher
/// precision while it has not resolved a single digit of some basis value.
inline PrecisionPlan plan_precision_detailed(const EquationSpec& eq, const ExactScalar& z, long target_digits,
                                             const PlanOptions& opt = {}) {
  if (target_digits < 1) throw std::invalid_argument("target digits must be positive");
  PrecisionPlan plan;
  long probe = opt.probe_digits;
  for (int attempt = 0; attempt < opt.max_probes; ++attempt) {
    const PrecisionSpec pp = digits_to_bits(probe);
    const WronskiReport w = wronskian(eq, z, pp);
    plan.probes = attempt + 1;
    plan.probe_digits = probe;
    const double scale = static_cast<double>(pp.bits) * kLog10Of2;
    struct Item {
      double mag;
      double err;
    };
    const std::array<Item, 4> items{{{lg_abs(w.plus.psi), w.plus.diag.lgErrorF},
                                     {lg_abs(*w.plus.dpsi), w.plus.diag.lgErrorFd},
                                     {lg_abs(w.minus.psi), w.minus.diag.lgErrorF},
                                     {lg_abs(*w.minus.dpsi), w.minus.diag.lgErrorFd}}};
    double worst_resolution = INFINITY;
    for (const Item& it : items) worst_resolution = std::min(worst_resolution, it.mag - it.err);
    auto bound = [](const Item& it) { return std::max(it.mag, it.err); };
    // Error coefficients at zero digits: lg err(M) = coef - M log10 2.
    const double est = std::max({bound(items[0]) + items[3].err, bound(items[2]) + items[1].err,
                                 bound(items[3]) + items[0].err, bound(items[1]) + items[2].err}) +
                       scale;
    double loss = est;
    if (w.lg_delta_r && std::isfinite(*w.lg_delta_r)) loss = std::max(loss, *w.lg_delta_r + 2.0 + scale);
    plan.loss_digits = loss;
    const long digits = target_digits + std::max(0L, static_cast<long>(std::ceil(loss))) + opt.guard_digits;
    plan.prec = digits_to_bits(digits);
    if (worst_resolution >= 1.0 || attempt + 1 == opt.max_probes) break;
    // Not a single digit resolved somewhere: magnitudes are unreliable.
    const long next = probe + static_cast<long>(std::ceil(std::max(0.0, -worst_resolution))) + 20;
    probe = std::max(next, 2 * probe);
    if (probe >= digits) break;
  }
  return plan;
}

inline PrecisionSpec plan_precision(const EquationSpec& eq, const ExactScalar& z, long target_digits) {
  return plan_precision_detailed(eq, z, target_digits).prec;
}

}  // namespace seriesode
