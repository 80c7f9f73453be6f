// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit
// status is nonzero when any selected criterion fails.
//
//   acceptance            run all
//   acceptance --only 3   run one

#include "seriesode/seriesode.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace seriesode;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

EquationSpec cosh_equation() {
  EquationSpec eq;
  eq.nu_plus = ExactScalar(1);
  eq.v = {ExactScalar(0), ExactScalar(1)};
  return eq;
}

const char* kQuarticGround = "1.06036209048418289964704601669266354551520872852897";

// Ground-state quartic equation in x = y^2.
EquationSpec quartic_equation() {
  EquationSpec eq;
  eq.nu_plus = ExactScalar(1, 2);
  eq.v = {ExactScalar(mpq_class(-parse_rational(kQuarticGround) / 4)), ExactScalar(0), ExactScalar(1, 4)};
  return eq;
}

// Shared decimal digits of two complex values relative to the second.
double shared(const Complex& a, const Complex& b) { return lg_abs(b) - lg_abs(a - b); }

Outcome criterion1() {
  const auto t0 = Clock::now();
  double worst_margin = INFINITY;
  for (const char* z : {"1", "10"}) {
    for (long p : {100L, 1000L}) {
      const PrecisionSpec prec = digits_to_bits(p);
      for (Branch b : {Branch::minus, Branch::plus}) {
        const SeriesResult r = evaluate(cosh_equation(), parse_scalar(z), b, prec);
        const std::string got = r.psi.re.to_string(p + 5);
        const std::string want = oracle::cosh_sinh_decimal(z, prec.bits + 64, p + 20, b == Branch::minus ? 1 : -1);
        worst_margin = std::min(worst_margin, oracle::shared_digits(got, want, prec.bits + 128) - (p - 10));
      }
    }
  }
  const double secs = since(t0);
  return {worst_margin >= 0.0 && secs < 5.0,
          "min(shared - (P-10)) = " + fixed(worst_margin, 2) + " digits, " + fixed(secs, 2) + " s"};
}

Outcome criterion2() {
  bool exact_ok = true;
  std::string worst;
  for (const char* z : {"1", "10"}) {
    const WronskiReport w = wronskian(cosh_equation(), parse_scalar(z), digits_to_bits(100));
    const bool minus_one = w.w_exact.re == -1.0 && w.w_exact.im.is_zero();
    exact_ok = exact_ok && minus_one && w.lg_delta_r && *w.lg_delta_r <= w.lg_delta_e;
    worst += std::string(" z=") + z + ": lg|W+1|=" + fixed(w.lg_delta_r.value_or(-INFINITY), 1) +
             " <= lg delta_e=" + fixed(w.lg_delta_e, 1);
  }
  SweepConfig cfg;
  cfg.sample_count = 1000;
  const auto recs = run_wronskian_fixed(cfg, 100);
  long valid = 0, within = 0;
  for (const WronskiRecord& r : recs) {
    if (!r.ok) continue;
    ++valid;
    within += !(r.lg_delta_r > r.lg_delta_e);
  }
  const double frac = static_cast<double>(within) / static_cast<double>(std::max(1L, valid));
  return {exact_ok && frac >= 0.99 && valid > 0,
          "cosh/sinh" + worst + "; sweep " + std::to_string(within) + "/" + std::to_string(valid) + " = " +
              fixed(100 * frac, 2) + "% within delta_e (need 99%)"};
}

Outcome criterion3() {
  SweepConfig cfg;
  cfg.sample_count = 2000;
  cfg.precisions = {20, 200, 500};
  const ErrorSummary s = summarize(run_error_sweep(cfg));
  const bool pass = s.pearson >= 0.99 && s.delta_within >= 0.99 && s.iqr_delta_diff < s.iqr_delta;
  return {pass, "pearson=" + fixed(s.pearson, 4) + " (>=0.99), Delta in [-10,6]: " + fixed(100 * s.delta_within, 2) +
                    "% (>=99%), IQR(Delta-Delta~)=" + fixed(s.iqr_delta_diff, 3) + " < IQR(Delta)=" +
                    fixed(s.iqr_delta, 3) + ", failures=" + std::to_string(s.failures) +
                    ", KS(200,500)=" + fixed(s.ks_distance, 3)};
}

Outcome criterion4() {
  SweepConfig cfg;
  cfg.sample_count = 500;
  const auto recs = run_wronskian_sweep(cfg, 300);
  long valid = 0, met = 0;
  double worst = -INFINITY;
  for (const WronskiRecord& r : recs) {
    if (!r.ok) continue;
    ++valid;
    met += r.lg_delta_r <= -300.0;
    if (std::isfinite(r.lg_delta_r)) worst = std::max(worst, r.lg_delta_r);
  }
  const double frac = static_cast<double>(met) / static_cast<double>(std::max(1L, valid));
  return {frac >= 0.99 && valid > 0, std::to_string(met) + "/" + std::to_string(valid) + " = " + fixed(100 * frac, 2) +
                                         "% with real error <= 1e-300 (need 99%), worst lg error " + fixed(worst, 1)};
}

Outcome criterion5() {
  const double y = std::sqrt(178.0);
  const long m1 = predict_split_cost(y, 1e5, 1), m2 = predict_split_cost(y, 1e5, 2);
  const double r1 = static_cast<double>(m1) / 1e5, r2 = static_cast<double>(m2) / 67500.0;
  bool pass = std::fabs(r1 - 1) <= 0.1 && std::fabs(r2 - 1) <= 0.1;
  std::string detail = "M1=" + std::to_string(m1) + " (ratio " + fixed(r1, 4) + "), M2=" + std::to_string(m2) +
                       " (ratio " + fixed(r2, 4) + ")";
  const auto t0 = Clock::now();
  const AprioriModel model = AprioriModel::anharmonic(0.0);
  for (long p : {200L, 1000L, 5000L}) {
    const long predicted = predict_terms(model, 10.0, 0.0, static_cast<double>(p));
    const long actual = evaluate(quartic_equation(), ExactScalar(10), Branch::minus, digits_to_bits(p)).diag.terms_summed;
    const double ratio = static_cast<double>(predicted) / static_cast<double>(actual);
    pass = pass && std::fabs(ratio - 1) <= 0.1;
    detail += "; P=" + std::to_string(p) + " predicted " + std::to_string(predicted) + " actual " +
              std::to_string(actual);
  }
  const double secs = since(t0);
  pass = pass && secs < 120.0;
  return {pass, detail + ", engine " + fixed(secs, 2) + " s"};
}

// Indices on the upper concave hull of (m, y_m) for m in [a, b]: the envelope
// of a coefficient sequence that may oscillate in sign.
std::vector<long> upper_hull(const std::vector<double>& y, long a, long b) {
  std::vector<long> h;
  for (long m = a; m <= b; ++m) {
    if (!std::isfinite(y[static_cast<size_t>(m)])) continue;
    while (h.size() >= 2) {
      const long i = h[h.size() - 2], j = h.back();
      const double yi = y[static_cast<size_t>(i)], yj = y[static_cast<size_t>(j)], ym = y[static_cast<size_t>(m)];
      if ((yj - yi) * static_cast<double>(m - i) <= (ym - yi) * static_cast<double>(j - i)) h.pop_back();
      else break;
    }
    h.push_back(m);
  }
  return h;
}

Outcome criterion6() {
  // c = 0: nonzero coefficients are every third one.
  const std::vector<double> lc0 = oracle::even_taylor_log_coeffs({0, 0, 1}, 1001, 512);
  std::vector<double> ratios;
  for (long m = 102; m <= 1000; m += 3) ratios.push_back(lc0[static_cast<size_t>(m)] - oracle::quartic_log_coeff(m));
  const double sd = stats::stdev(ratios);
  bool pass = sd <= 0.5;
  std::string detail = "c=0 stdev " + fixed(sd, 4) + " (<=0.5)";
  struct Case {
    const char* name;
    AprioriModel model;
    std::vector<long> p;  // psi'' = V psi, V = sum p_j y^{2j}
  };
  for (const Case& c : {Case{"(y^2+1)^2", AprioriModel::anharmonic(1.0), {1, 2, 1}},
                        Case{"(y^2-25)^2", AprioriModel::doublewell(5.0), {625, -50, 1}}}) {
    const std::vector<double> lc = oracle::even_taylor_log_coeffs(c.p, 1101, 1024);
    double lo = INFINITY, hi = -INFINITY;
    long points = 0;
    for (long m : upper_hull(lc, 50, 1050)) {
      if (m < 100 || m > 1000) continue;
      const double d = lc[static_cast<size_t>(m)] - improved_coeff_estimate(c.model, static_cast<double>(m), 0.0);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      ++points;
    }
    pass = pass && points > 0 && lo >= -2.0 && hi <= 2.0;
    detail += std::string("; ") + c.name + " envelope - estimate in [" + fixed(lo, 3) + ", " + fixed(hi, 3) +
              "] over " + std::to_string(points) + " points (need [-2,2])";
  }
  return {pass, detail};
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  std::vector<EigenResult> runs;
  for (long yb : {10L, 12L}) {
    for (long extra : {0L, 38L}) {
      EigenProblem p;
      p.target_digits = 50;
      p.y_boundary = mpq_class(yb);
      p.extra_digits = extra;
      runs.push_back(solve_eigenvalue(p));
    }
  }
  double min_shared = INFINITY;
  for (size_t i = 0; i < runs.size(); ++i)
    for (size_t j = i + 1; j < runs.size(); ++j) {
      const mpq_class d = abs(runs[i].epsilon - runs[j].epsilon);
      const double s = d == 0 ? INFINITY : -lg_abs(Real(mpq_class(d / runs[j].epsilon), 512));
      min_shared = std::min(min_shared, s);
    }
  const std::string value = runs[0].epsilon_string(50);
  const bool prefix = value.rfind("1.0603620904841828996", 0) == 0;
  const auto V = [](double y) { return y * y * y * y; };
  const double rk = oracle::eigenvalue_rk4(V, true, 1.0, 1.1);
  const bool rk_ok = std::fabs(rk - runs[0].epsilon.get_d()) < 1e-7;
  const double secs = since(t0);
  return {min_shared >= 50.0 && prefix && rk_ok && secs < 300.0,
          "eps0=" + value + ", min shared digits " + fixed(min_shared, 1) + " (>=50) over y_b {10,12} x 2 precisions, "
              "RK4 " + fixed(rk, 9) + ", " + fixed(secs, 1) + " s"};
}

Outcome criterion8() {
  std::vector<double> p, terms;
  const ExactScalar x(10);
  for (long d : {1000L, 2000L, 4000L, 8000L}) {
    p.push_back(static_cast<double>(d));
    terms.push_back(static_cast<double>(evaluate(quartic_equation(), x, Branch::minus, digits_to_bits(d)).diag.terms_summed));
  }
  const stats::LinearFit f = stats::linear_fit(p, terms);
  const auto t0 = Clock::now();
  evaluate(quartic_equation(), x, Branch::minus, digits_to_bits(200));
  const double secs = since(t0);
  std::string list;
  for (double t : terms) list += (list.empty() ? "" : ",") + std::to_string(static_cast<long>(t));
  return {f.max_relative_residual < 0.1 && secs < 1.0,
          "terms {" + list + "} slope " + fixed(f.slope, 4) + " residual " + fixed(100 * f.max_relative_residual, 2) +
              "% (<10%), P=200 in " + fixed(1e3 * secs, 2) + " ms (<1 s)"};
}

Outcome criterion9() {
  const PrecisionSpec prec = digits_to_bits(100);
  bool pass = true;
  std::string detail;
  struct Case {
    const char* name;
    EquationSpec eq;
    std::vector<ExactScalar> path;
  };
  EquationSpec yq;  // -psi'' + (y^4 - 1) psi = 0 in y directly
  yq.nu_plus = ExactScalar(1);
  yq.v = {ExactScalar(0), ExactScalar(-1), ExactScalar(0), ExactScalar(0), ExactScalar(0), ExactScalar(1)};
  for (const Case& c : {Case{"cosh 0->1/2->1", cosh_equation(), {ExactScalar(0), ExactScalar(1, 2), ExactScalar(1)}},
                        Case{"quartic 0->5->10", yq, {ExactScalar(0), ExactScalar(5), ExactScalar(10)}}}) {
    for (Branch b : {Branch::minus, Branch::plus}) {
      const SeriesResult direct = evaluate(c.eq, c.path.back(), b, prec, true);
      const bool minus = b == Branch::minus;
      const Complex one(Real(1L, prec.bits)), zero(Real(0L, prec.bits));
      const ContinuationResult r = continue_solution(c.eq, c.path, minus ? one : zero, minus ? zero : one, prec);
      const double digits = std::min(shared(r.psi, direct.psi), shared(r.dpsi, *direct.dpsi));
      const double lg_diff = lg_abs(r.psi - direct.psi);
      const double lg_bound = detail::lg_sum({direct.diag.lgErrorF, r.lg_error_psi});
      const bool ok = digits >= 88.0 && lg_diff <= lg_bound;
      pass = pass && ok;
      detail += std::string(detail.empty() ? "" : "; ") + c.name + (minus ? " even" : " odd") + " shared " +
                fixed(digits, 1) + " (>=88), lg|diff| " + fixed(lg_diff, 1) + " <= " + fixed(lg_bound, 1);
    }
  }
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
      {1, {"oracle correctness", criterion1}},   {2, {"wronskian identity", criterion2}},
      {3, {"error model", criterion3}},          {4, {"precision planning", criterion4}},
      {5, {"a-priori term count", criterion5}},  {6, {"coefficient estimates", criterion6}},
      {7, {"eigensolver", criterion7}},          {8, {"linear scaling", criterion8}},
      {9, {"analytic continuation", criterion9}}};
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--only N]\n";
      return 2;
    }
  }
  if (only != 0 && !criteria.count(only)) {
    std::cerr << "no criterion " << only << '\n';
    return 2;
  }
  bool all = true;
  for (const auto& [n, c] : criteria) {
    if (only != 0 && n != only) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << n << " (" << c.first << "): " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << "  [" << fixed(since(t0), 1) << " s]" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
