#pragma once

// Eigenvalues of the quartic oscillator  [-d^2/dy^2 + y^4] psi = eps psi
// and the double well  [-s^2 d^2/dy^2 + (1 - y^2)^2] psi = eps psi
// by shooting on the series solution with a Dirichlet condition psi(y_b) = 0
// at a large radius y_b. With z = y^2 both become nu- = 0, nu+ = 1/2,
// v_2 = 1/4; even states are the nu = 0 branch and odd states nu = 1/2.

#include "seriesode/accuracy.hpp"
#include "seriesode/apriori.hpp"
#include "seriesode/frobenius.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace seriesode {

enum class Potential { quartic, doublewell };
enum class Parity { even, odd };

inline std::string to_string(Potential p) { return p == Potential::quartic ? "quartic" : "doublewell"; }
inline std::string to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

struct EigenProblem {
  Potential potential = Potential::quartic;
  ExactScalar s{1};  // doublewell only; the quartic fixes s = 1
  Parity parity = Parity::even;
  long level = 0;    // index among states of this parity
  std::optional<mpq_class> y_boundary;
  long target_digits = 20;
  std::optional<std::pair<mpq_class, mpq_class>> bracket;
  long extra_digits = 0;  // added on top of the planned working precision
};

class NoSignChange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BoundaryTooSmall : public std::runtime_error {
 public:
  BoundaryTooSmall(const std::string& what, double lg_shift)
      : std::runtime_error(what), lg_shift_(lg_shift) {}
  double lg_shift() const { return lg_shift_; }

 private:
  double lg_shift_;
};

/// Equation in z = y^2 and the parity branch.
inline std::pair<EquationSpec, Branch> to_equation(const EigenProblem& problem, const ExactScalar& epsilon) {
  EquationSpec eq;
  eq.nu_minus = ExactScalar(0);
  eq.nu_plus = ExactScalar(1, 2);
  if (problem.potential == Potential::quartic) {
    eq.s = ExactScalar(1);
    eq.v = {ExactScalar(-1, 4) * epsilon, ExactScalar(0), ExactScalar(1, 4)};
  } else {
    eq.s = problem.s;
    eq.v = {(ExactScalar(1) - epsilon) * ExactScalar(1, 4), ExactScalar(-1, 2), ExactScalar(1, 4)};
  }
  return {eq, problem.parity == Parity::even ? Branch::minus : Branch::plus};
}

struct Shot {
  Real psi;
  double lg_error = 0.0;
  SeriesDiagnostics diag;

  /// Sign of psi, or 0 when the estimated error covers it.
  int resolved_sign() const {
    if (psi.is_zero() || lg_abs(psi) <= lg_error) return 0;
    return psi.sign();
  }
};

/// psi(y_b) for the given eigenvalue parameter; real for real epsilon.
inline Shot shoot(const EigenProblem& problem, const mpq_class& epsilon, const mpq_class& y_boundary,
                  PrecisionSpec prec) {
  auto [eq, branch] = to_equation(problem, ExactScalar(epsilon));
  SeriesResult r = evaluate(eq, ExactScalar(y_boundary * y_boundary), branch, prec);
  return Shot{std::move(r.psi.re), r.diag.lgErrorF, r.diag};
}

namespace detail {

inline double potential_value(Potential p, double y) {
  if (p == Potential::quartic) return y * y * y * y;
  const double t = 1.0 - y * y;
  return t * t;
}

/// Semiclassical estimate of the eigenvalue of the n-th state (both parities).
inline double wkb_level(const EigenProblem& problem) {
  const double n = static_cast<double>(2 * problem.level + (problem.parity == Parity::odd ? 1 : 0));
  if (problem.potential == Potential::quartic) {
    // (n + 1/2) pi = 2 int_0^{eps^{1/4}} sqrt(eps - y^4) dy = eps^{3/4} * 2 * 0.874019...
    return std::pow((n + 0.5) * M_PI / 1.748038, 4.0 / 3.0);
  }
  const double s = std::fabs(problem.s.re_double());
  return std::max(0.0, 2.0 * s * (std::floor(n / 2.0) + 0.5) * 2.0);
}

}  // namespace detail

/// Smallest integer radius beyond the classical turning point at which the
/// WKB decay exp(-2 int sqrt(V - eps)/s dy) drops below 10^-(digits + 10).
inline mpq_class default_boundary(const EigenProblem& problem, double epsilon_hint) {
  const double s = problem.potential == Potential::quartic ? 1.0 : std::fabs(problem.s.re_double());
  const double need = 0.5 * (static_cast<double>(problem.target_digits) + 10.0) * std::log(10.0);
  double y = 0.0;
  const double h = 1e-3;
  while (detail::potential_value(problem.potential, y) < epsilon_hint || y < 1.0) y += h;
  double acc = 0.0;
  while (acc < need) {
    const double g = detail::potential_value(problem.potential, y) - epsilon_hint;
    acc += std::sqrt(std::max(0.0, g)) / s * h;
    y += h;
  }
  return mpq_class(static_cast<long>(std::ceil(y)));
}

/// Low-precision scan upward from eps = 0 for the level-th sign change of
/// psi(y_b) on the problem's parity branch.
inline std::pair<mpq_class, mpq_class> find_bracket(const EigenProblem& problem, const mpq_class& y_boundary) {
  const double s = problem.potential == Potential::quartic ? 1.0 : std::fabs(problem.s.re_double());
  mpq_class step(static_cast<long>(std::lround(std::max(1.0, 64.0 * std::min(1.0, s)))), 256);
  step.canonicalize();
  const double yb = y_boundary.get_d();
  const double lg_max = predict_peak(AprioriModel::anharmonic(0.0), yb * yb).lg_max_term;
  const PrecisionSpec prec = digits_to_bits(30 + static_cast<long>(std::ceil(std::max(0.0, lg_max / 4.0))));
  mpq_class eps = 0;
  int prev = shoot(problem, eps, y_boundary, prec).psi.sign();
  long crossings = 0;
  const double limit = 4.0 * detail::wkb_level(problem) + 50.0;
  while (eps.get_d() < limit) {
    mpq_class next = eps + step;
    const int sign = shoot(problem, next, y_boundary, prec).psi.sign();
    if (sign != 0 && prev != 0 && sign != prev) {
      if (crossings == problem.level) return {eps, next};
      ++crossings;
    }
    if (sign != 0) prev = sign;
    eps = next;
  }
  throw NoSignChange("no sign change found for the requested level");
}

/// Working precision for resolving epsilon to the target: target digits plus
/// the digits lost between the largest term and d psi / d eps, measured by a
/// probe at both bracket ends.
inline PrecisionSpec plan_shoot_precision(const EigenProblem& problem, const mpq_class& y_boundary,
                                          const std::pair<mpq_class, mpq_class>& bracket) {
  const double yb = y_boundary.get_d();
  const double lg_peak = predict_peak(AprioriModel::anharmonic(0.0), yb * yb).lg_max_term;
  const PrecisionSpec probe = digits_to_bits(30 + static_cast<long>(std::ceil(std::max(0.0, lg_peak))));
  const Shot lo = shoot(problem, bracket.first, y_boundary, probe);
  const Shot hi = shoot(problem, bracket.second, y_boundary, probe);
  const double lg_width = std::log10(mpq_class(bracket.second - bracket.first).get_d());
  const double lg_slope = lg_abs(hi.psi - lo.psi) - lg_width;
  const double lg_largest = std::max(lo.diag.maxAExponent.as_double(), hi.diag.maxAExponent.as_double()) * kLog10Of2;
  const double loss = std::max(0.0, lg_largest - lg_slope);
  const double lg_eps = std::max(0.0, std::log10(std::fabs(bracket.second.get_d())));
  const long digits = problem.target_digits + static_cast<long>(std::ceil(loss + lg_eps)) + 15 + problem.extra_digits;
  return digits_to_bits(digits);
}

struct BracketStep {
  mpq_class lo, hi;
  int sign_lo = 0, sign_hi = 0;
};

struct EigenResult {
  mpq_class epsilon;
  long digits_certified = 0;
  mpq_class y_boundary;
  PrecisionSpec prec;
  std::pair<mpq_class, mpq_class> bracket;
  long iterations = 0;
  double lg_boundary_shift = -INFINITY;
  double seconds = 0.0;
  std::vector<BracketStep> trace;

  std::string epsilon_string(long digits) const {
    return Real(epsilon, digits_to_bits(digits + 5).bits).to_string(digits);
  }
};

struct RefineOptions {
  bool keep_trace = false;
};

/// Bisection on exact rational midpoints until the bracket is narrower than
/// 10^(-target/2), then Illinois-safeguarded secant steps until successive
/// iterates agree to the target digits.
inline EigenResult refine_eigenvalue(const EigenProblem& problem, const mpq_class& y_boundary,
                                     std::pair<mpq_class, mpq_class> bracket, PrecisionSpec prec,
                                     const RefineOptions& opt = {}) {
  EigenResult res;
  res.y_boundary = y_boundary;
  res.prec = prec;
  res.bracket = bracket;
  mpq_class a = bracket.first, b = bracket.second;
  if (!(a < b)) throw NoSignChange("bracket must satisfy lo < hi");
  Shot fa = shoot(problem, a, y_boundary, prec);
  Shot fb = shoot(problem, b, y_boundary, prec);
  if (fa.psi.sign() == 0 || fb.psi.sign() == 0 || fa.psi.sign() == fb.psi.sign())
    throw NoSignChange("psi(y_b) has the same sign at both bracket ends");

  const long bits = prec.bits;
  auto tenth_power = [](long k) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k));
    return p;
  };
  const mpq_class scale = std::max(mpq_class(1), mpq_class(abs(b)));
  const mpq_class switch_width = scale / mpq_class(tenth_power(std::max(1L, problem.target_digits / 2)));
  const mpq_class final_tol = scale / mpq_class(tenth_power(problem.target_digits + 2));
  auto record = [&] {
    if (opt.keep_trace) res.trace.push_back({a, b, fa.psi.sign(), fb.psi.sign()});
  };
  record();

  while (b - a > switch_width) {
    mpq_class mid = (a + b) / 2;
    mid.canonicalize();
    Shot fm = shoot(problem, mid, y_boundary, prec);
    ++res.iterations;
    if (fm.psi.sign() == 0) {
      a = b = mid;
      break;
    }
    if (fm.psi.sign() == fa.psi.sign()) {
      a = mid;
      fa = std::move(fm);
    } else {
      b = mid;
      fb = std::move(fm);
    }
    record();
  }

  // Illinois iteration on the remaining bracket.
  Real wa = fa.psi, wb = fb.psi;
  mpq_class last = b;
  int side = 0;
  mpq_class estimate = (a + b) / 2;
  for (int it = 0; it < 200 && a != b; ++it) {
    const Real ra(a, bits), rb(b, bits);
    Real c = rb - wb * (rb - ra) / (wb - wa);
    mpq_class cq = c.to_rational();
    if (!(cq > a && cq < b)) {
      cq = (a + b) / 2;
      cq.canonicalize();
    }
    Shot fc = shoot(problem, cq, y_boundary, prec);
    ++res.iterations;
    estimate = cq;
    const mpq_class step = mpq_class(abs(cq - last));
    last = cq;
    if (fc.resolved_sign() == 0) break;  // at the resolution limit
    if (fc.psi.sign() == fb.psi.sign()) {
      b = cq;
      fb = fc;
      wb = fc.psi;
      if (side == +1) wa = wa / 2L;
      side = +1;
    } else {
      a = cq;
      fa = fc;
      wa = fc.psi;
      if (side == -1) wb = wb / 2L;
      side = -1;
    }
    record();
    if (step <= final_tol || b - a <= final_tol) break;
  }
  res.epsilon = a == b ? a : estimate;
  return res;
}

/// Full solve: bracket, plan, refine, then repeat at y_b + 1 and reject the
/// result if the boundary moved epsilon by more than 10^-target.
inline EigenResult solve_eigenvalue(const EigenProblem& problem, const RefineOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const mpq_class yb = problem.y_boundary ? *problem.y_boundary
                                          : default_boundary(problem, detail::wkb_level(problem) * 1.5 + 1.0);
  const std::pair<mpq_class, mpq_class> bracket = problem.bracket ? *problem.bracket : find_bracket(problem, yb);
  const PrecisionSpec prec = plan_shoot_precision(problem, yb, bracket);
  EigenResult res = refine_eigenvalue(problem, yb, bracket, prec, opt);

  const mpq_class yb2 = yb + 1;
  const PrecisionSpec prec2 = plan_shoot_precision(problem, yb2, bracket);
  const EigenResult check = refine_eigenvalue(problem, yb2, bracket, prec2);
  const mpq_class shift = mpq_class(abs(res.epsilon - check.epsilon));
  const double scale = std::max(1.0, std::fabs(res.epsilon.get_d()));
  res.lg_boundary_shift = shift == 0 ? -INFINITY : lg_abs(Real(shift, 256)) - std::log10(scale);
  if (res.lg_boundary_shift > -static_cast<double>(problem.target_digits))
    throw BoundaryTooSmall("eigenvalue moved by 10^" + std::to_string(res.lg_boundary_shift) +
                               " when the boundary grew by one",
                           res.lg_boundary_shift);
  res.digits_certified = problem.target_digits;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace seriesode
