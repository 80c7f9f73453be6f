#pragma once

// Analytic continuation for equations without a singular point in the finite
// plane (nu- = 0, nu+ = 1, v_0 = 0). Such an equation reads
// -s^2 psi'' + q(z) psi = 0 with q(z) = sum_{n>=1} v_n z^{n-1}, and shifting
// the expansion point to zeta0 only rewrites the coefficients of q.

#include "seriesode/frobenius.hpp"

#include <stdexcept>
#include <vector>

namespace seriesode {

inline bool is_ordinary_point_equation(const EquationSpec& eq) {
  auto exact_is = [](const ExactScalar& x, long value) {
    const auto k = x.as_integer();
    return k && *k == value;
  };
  return !eq.v.empty() && exact_is(eq.nu_minus, 0) && exact_is(eq.nu_plus, 1) && eq.v.front().is_zero();
}

/// Same equation expanded around zeta0: w = z - zeta0. The returned
/// coefficients satisfy (1/w) sum_n v~_n w^n = q(zeta0 + w), so v~_0 = 0 and
/// v~_{k+1} is the k-th Taylor coefficient of q at zeta0.
inline EquationSpec recenter(const EquationSpec& eq, const ExactScalar& zeta0) {
  if (!is_ordinary_point_equation(eq))
    throw std::invalid_argument("recentering needs nu- = 0, nu+ = 1 and v_0 = 0");
  const size_t qn = eq.v.size() - 1;  // number of q coefficients
  // Horner-style Taylor shift: repeated synthetic division by (z - zeta0).
  std::vector<ExactScalar> work(eq.v.begin() + 1, eq.v.end());
  if (!zeta0.is_zero()) {
    for (size_t k = 0; k < qn; ++k) {
      for (size_t j = qn - 1; j > k; --j) work[j - 1] = work[j - 1] + zeta0 * work[j];
    }
  }
  EquationSpec out = eq;
  out.v.assign(1, ExactScalar(0));
  out.v.insert(out.v.end(), work.begin(), work.end());
  return out;
}

struct ContinuationResult {
  Complex psi;
  Complex dpsi;
  double lg_error_psi = -INFINITY;
  double lg_error_dpsi = -INFINITY;
  long steps = 0;
};

namespace detail {

inline double lg_sum(std::initializer_list<double> terms) {
  double hi = -INFINITY;
  for (double t : terms) hi = std::max(hi, t);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double t : terms) s += std::pow(10.0, t - hi);
  return hi + std::log10(s);
}

}  // namespace detail

/// Carries (psi, psi') from path.front() along the straight segments of
/// `path`. Each step evaluates the canonical basis of the recentered
/// equation: the minus branch (value 1, slope 0) and the plus branch
/// (value 0, slope 1).
inline ContinuationResult continue_solution(const EquationSpec& eq, const std::vector<ExactScalar>& path,
                                            const Complex& psi0, const Complex& dpsi0, PrecisionSpec prec,
                                            double lg_error_psi0 = -INFINITY,
                                            double lg_error_dpsi0 = -INFINITY) {
  if (!is_ordinary_point_equation(eq))
    throw std::invalid_argument("continuation needs an equation without finite singular points");
  ContinuationResult r{Complex(psi0, prec.bits), Complex(dpsi0, prec.bits), lg_error_psi0, lg_error_dpsi0, 0};
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    const ExactScalar step = path[k + 1] - path[k];
    if (step.is_zero()) continue;
    const EquationSpec local = recenter(eq, path[k]);
    const SeriesResult u = evaluate(local, step, Branch::minus, prec, true);
    const SeriesResult p = evaluate(local, step, Branch::plus, prec, true);
    const double a = lg_abs(r.psi), b = lg_abs(r.dpsi);
    const double ea = r.lg_error_psi, eb = r.lg_error_dpsi;
    r.lg_error_psi = detail::lg_sum({a + u.diag.lgErrorF, ea + lg_abs(u.psi), b + p.diag.lgErrorF,
                                     eb + lg_abs(p.psi)});
    r.lg_error_dpsi = detail::lg_sum({a + u.diag.lgErrorFd, ea + lg_abs(*u.dpsi), b + p.diag.lgErrorFd,
                                      eb + lg_abs(*p.dpsi)});
    Complex psi = r.psi * u.psi + r.dpsi * p.psi;
    Complex dpsi = r.psi * *u.dpsi + r.dpsi * *p.dpsi;
    r.psi = std::move(psi);
    r.dpsi = std::move(dpsi);
    ++r.steps;
  }
  return r;
}

}  // namespace seriesode
