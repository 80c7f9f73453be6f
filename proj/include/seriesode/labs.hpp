#pragma once

// Random-parameter experiments: real vs estimated evaluation errors,
// Wronskian checks at fixed and planned precision, and term-count scaling.

#include "seriesode/accuracy.hpp"
#include "seriesode/frobenius.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace seriesode {

struct SweepConfig {
  long sample_count = 2000;
  std::uint64_t seed = 20240611;
  std::vector<long> precisions{20, 200, 500};
  int max_degree = 4;        // N drawn from 1..max_degree
  double nu_range = 10.0;    // Re/Im of nu+- uniform in [-nu_range, nu_range]
  double v_range = 5.0;
  double z_range = 20.0;
  unsigned workers = 0;      // 0: hardware concurrency
};

struct Sample {
  long index = 0;
  EquationSpec eq;
  ExactScalar z;
  Branch branch = Branch::minus;
  long redraws = 0;
};

namespace detail {

/// Independent stream per (seed, index), so any worker reproduces it.
inline std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline ExactScalar draw_complex(std::mt19937_64& rng, double range) {
  std::uniform_real_distribution<double> u(-range, range);
  const double re = u(rng);
  const double im = u(rng);
  return ExactScalar::from_double(re, im);
}

inline ExactScalar draw_s(std::mt19937_64& rng) {
  static const long num[4] = {-3, -1, 1, 3};
  std::uniform_int_distribution<int> pick(0, 3);
  const long re = num[pick(rng)];
  const long im = num[pick(rng)];
  return ExactScalar(ComplexRational{mpq_class(re, 3), mpq_class(im, 3)});
}

}  // namespace detail

/// Draws sample `index`, redrawing (and counting) parameter sets that the
/// engine would reject.
inline Sample draw_sample(const SweepConfig& cfg, long index) {
  std::mt19937_64 rng = detail::sample_engine(cfg.seed, static_cast<std::uint64_t>(index));
  Sample out;
  out.index = index;
  for (;;) {
    std::uniform_int_distribution<int> degree(1, cfg.max_degree);
    const int n = degree(rng);
    EquationSpec eq;
    eq.s = detail::draw_s(rng);
    eq.nu_plus = detail::draw_complex(rng, cfg.nu_range);
    eq.nu_minus = detail::draw_complex(rng, cfg.nu_range);
    for (int k = 0; k <= n; ++k) eq.v.push_back(detail::draw_complex(rng, cfg.v_range));
    ExactScalar z = detail::draw_complex(rng, cfg.z_range);
    const Branch branch = std::bernoulli_distribution(0.5)(rng) ? Branch::plus : Branch::minus;
    if (!validate(eq, z, Branch::plus) && !validate(eq, z, Branch::minus)) {
      out.eq = std::move(eq);
      out.z = std::move(z);
      out.branch = branch;
      return out;
    }
    ++out.redraws;
  }
}

/// Runs fn(i) for i in [0, count) on a pool; results are stored by index so
/// the output does not depend on the number of workers.
template <class Record>
std::vector<Record> run_indexed(long count, unsigned workers, const std::function<Record(long)>& fn) {
  std::vector<Record> out(static_cast<size_t>(count));
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<long>(workers, std::max(1L, count)));
  std::atomic<long> next{0};
  auto work = [&] {
    for (long i = next++; i < count; i = next++) out[static_cast<size_t>(i)] = fn(i);
  };
  if (workers == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return out;
}

// ---------------------------------------------------------------------------
// Error sweep
// ---------------------------------------------------------------------------

struct ErrorPoint {
  long digits = 0;
  long bits = 0;
  bool ok = false;
  std::string failure;
  long max_exponent = 0;   // A-bar
  long terms = 0;
  double lg_e = NAN;       // estimated error
  double lg_r = NAN;       // measured against the reference
  double delta = NAN;      // lg_r - lg_e
};

struct ErrorRecord {
  long index = 0;
  long redraws = 0;
  int degree = 0;
  Branch branch = Branch::minus;
  long reference_digits = 0;
  bool reference_ok = false;
  std::string failure;
  std::vector<ErrorPoint> points;  // one per configured precision
};

/// The reference precision: the largest configured precision plus 76 digits.
inline long reference_digits(const SweepConfig& cfg) {
  if (cfg.precisions.empty()) throw std::invalid_argument("empty precision list");
  return *std::max_element(cfg.precisions.begin(), cfg.precisions.end()) + 76;
}

inline ErrorRecord error_sample(const SweepConfig& cfg, long index) {
  const Sample s = draw_sample(cfg, index);
  ErrorRecord rec;
  rec.index = index;
  rec.redraws = s.redraws;
  rec.degree = static_cast<int>(s.eq.degree());
  rec.branch = s.branch;
  rec.reference_digits = reference_digits(cfg);
  const PrecisionSpec ref_prec = digits_to_bits(rec.reference_digits);
  Complex reference(ref_prec.bits);
  try {
    reference = evaluate(s.eq, s.z, s.branch, ref_prec).psi;
    rec.reference_ok = true;
  } catch (const std::exception& e) {
    rec.failure = e.what();
  }
  for (long p : cfg.precisions) {
    ErrorPoint pt;
    pt.digits = p;
    pt.bits = digits_to_bits(p).bits;
    if (rec.reference_ok) {
      try {
        const SeriesResult r = evaluate(s.eq, s.z, s.branch, digits_to_bits(p));
        pt.max_exponent = r.diag.maxAExponent.value();
        pt.terms = r.diag.terms_summed;
        pt.lg_e = r.diag.lgErrorF;
        pt.lg_r = lg_abs(Complex(r.psi, ref_prec.bits) - reference);
        pt.delta = pt.lg_r - pt.lg_e;
        pt.ok = std::isfinite(pt.delta);
        if (!pt.ok) pt.failure = "exact agreement";
      } catch (const std::exception& e) {
        pt.failure = e.what();
      }
    } else {
      pt.failure = "reference failed";
    }
    rec.points.push_back(std::move(pt));
  }
  return rec;
}

inline std::vector<ErrorRecord> run_error_sweep(const SweepConfig& cfg) {
  reference_digits(cfg);  // rejects an empty precision list
  return run_indexed<ErrorRecord>(cfg.sample_count, cfg.workers,
                                  [&](long i) { return error_sample(cfg, i); });
}

// ---------------------------------------------------------------------------
// Wronskian sweeps
// ---------------------------------------------------------------------------

struct WronskiRecord {
  long index = 0;
  long redraws = 0;
  int degree = 0;
  bool ok = false;
  std::string failure;
  long digits = 0;          // precision used
  long target_digits = 0;   // 0 for fixed-precision runs
  double lg_delta_e = NAN;
  double lg_delta_r = NAN;
  double loss_digits = NAN;
};

inline WronskiRecord wronskian_sample(const SweepConfig& cfg, long index, long digits, long target) {
  const Sample s = draw_sample(cfg, index);
  WronskiRecord rec;
  rec.index = index;
  rec.redraws = s.redraws;
  rec.degree = static_cast<int>(s.eq.degree());
  rec.target_digits = target;
  try {
    PrecisionSpec prec;
    if (target > 0) {
      const PrecisionPlan plan = plan_precision_detailed(s.eq, s.z, target);
      prec = plan.prec;
      rec.loss_digits = plan.loss_digits;
    } else {
      prec = digits_to_bits(digits);
    }
    rec.digits = prec.digits;
    const WronskiReport w = wronskian(s.eq, s.z, prec);
    rec.lg_delta_e = w.lg_delta_e;
    rec.lg_delta_r = w.lg_delta_r.value_or(NAN);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.failure = e.what();
  }
  return rec;
}

/// Fixed precision: compares the estimated and real Wronskian errors.
inline std::vector<WronskiRecord> run_wronskian_fixed(const SweepConfig& cfg, long digits) {
  return run_indexed<WronskiRecord>(cfg.sample_count, cfg.workers,
                                    [&](long i) { return wronskian_sample(cfg, i, digits, 0); });
}

/// Planned precision aiming at an absolute error of 10^-target_digits.
inline std::vector<WronskiRecord> run_wronskian_sweep(const SweepConfig& cfg, long target_digits) {
  return run_indexed<WronskiRecord>(cfg.sample_count, cfg.workers,
                                    [&](long i) { return wronskian_sample(cfg, i, 0, target_digits); });
}

// ---------------------------------------------------------------------------
// Scaling bench
// ---------------------------------------------------------------------------

struct BenchRow {
  long digits = 0;
  long bits = 0;
  long terms = 0;
  double seconds = 0.0;
};

inline std::vector<BenchRow> run_scaling_bench(const EquationSpec& eq, const ExactScalar& z, Branch branch,
                                               const std::vector<long>& precisions) {
  std::vector<BenchRow> rows;
  for (long p : precisions) {
    const PrecisionSpec prec = digits_to_bits(p);
    const auto t0 = std::chrono::steady_clock::now();
    const SeriesResult r = evaluate(eq, z, branch, prec);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back({p, prec.bits, r.diag.terms_summed, dt});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

namespace stats {

inline double quantile(std::vector<double> x, double q) {
  if (x.empty()) return NAN;
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

inline double iqr(const std::vector<double>& x) { return quantile(x, 0.75) - quantile(x, 0.25); }

inline double mean(const std::vector<double>& x) {
  return x.empty() ? NAN : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double stdev(const std::vector<double>& x) {
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return x.size() < 2 ? NAN : std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

inline double fraction_within(const std::vector<double>& x, double lo, double hi) {
  if (x.empty()) return NAN;
  const auto n = std::count_if(x.begin(), x.end(), [&](double v) { return v >= lo && v <= hi; });
  return static_cast<double>(n) / static_cast<double>(x.size());
}

/// Least-squares line y = a + b x; returns {a, b, max relative residual}.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double max_relative_residual = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (size_t i = 0; i < x.size(); ++i)
    f.max_relative_residual =
        std::max(f.max_relative_residual, std::fabs(y[i] - (f.intercept + f.slope * x[i])) / std::fabs(y[i]));
  return f;
}

}  // namespace stats

// ---------------------------------------------------------------------------
// Summaries and CSV
// ---------------------------------------------------------------------------

struct ErrorSummary {
  long samples = 0;
  long redraws = 0;
  long failures = 0;        // points without a finite delta
  long points = 0;
  double pearson = NAN;     // lgErrorF vs lg eps_r over all points
  double delta_within = NAN;  // fraction of deltas in [-10, 6]
  double iqr_delta = NAN;     // over precisions above the lowest
  double iqr_delta_diff = NAN;
  double ks_distance = NAN;   // deltas of the two highest precisions
  std::vector<double> delta_quantiles;  // 0, .01, .25, .5, .75, .99, 1
};

inline ErrorSummary summarize(const std::vector<ErrorRecord>& recs) {
  ErrorSummary s;
  s.samples = static_cast<long>(recs.size());
  std::vector<double> est, real, deltas, upper, diff;
  std::vector<std::vector<double>> per_p;
  for (const ErrorRecord& r : recs) {
    s.redraws += r.redraws;
    if (per_p.size() < r.points.size()) per_p.resize(r.points.size());
    for (size_t k = 0; k < r.points.size(); ++k) {
      const ErrorPoint& p = r.points[k];
      ++s.points;
      if (!p.ok) {
        ++s.failures;
        continue;
      }
      est.push_back(p.lg_e);
      real.push_back(p.lg_r);
      deltas.push_back(p.delta);
      per_p[k].push_back(p.delta);
      if (k > 0) {
        upper.push_back(p.delta);
        if (r.points[0].ok) diff.push_back(p.delta - r.points[0].delta);
      }
    }
  }
  s.pearson = stats::pearson(est, real);
  // Failed points count against the range criterion.
  s.delta_within = static_cast<double>(deltas.size()) * stats::fraction_within(deltas, -10.0, 6.0) /
                   static_cast<double>(std::max(1L, s.points));
  s.iqr_delta = stats::iqr(upper);
  s.iqr_delta_diff = stats::iqr(diff);
  if (per_p.size() >= 2) s.ks_distance = stats::ks_distance(per_p[per_p.size() - 2], per_p.back());
  for (double q : {0.0, 0.01, 0.25, 0.5, 0.75, 0.99, 1.0}) s.delta_quantiles.push_back(stats::quantile(deltas, q));
  return s;
}

namespace detail {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

}  // namespace detail

inline void write_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<ErrorRecord>& recs) {
  os << "seed,case_id,degree,branch,P,M,A_bar,terms,lg_e,lg_r,delta,status\n";
  for (const ErrorRecord& r : recs)
    for (const ErrorPoint& p : r.points)
      os << cfg.seed << ',' << r.index << ',' << r.degree << ',' << to_string(r.branch) << ',' << p.digits << ','
         << p.bits << ',' << p.max_exponent << ',' << p.terms << ',' << detail::fmt(p.lg_e) << ','
         << detail::fmt(p.lg_r) << ',' << detail::fmt(p.delta) << ',' << (p.ok ? "ok" : "failed") << '\n';
}

inline void write_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<WronskiRecord>& recs) {
  os << "seed,case_id,degree,P,target,loss,lg_delta_e,lg_delta_r,status\n";
  for (const WronskiRecord& r : recs)
    os << cfg.seed << ',' << r.index << ',' << r.degree << ',' << r.digits << ',' << r.target_digits << ','
       << detail::fmt(r.loss_digits) << ',' << detail::fmt(r.lg_delta_e) << ',' << detail::fmt(r.lg_delta_r)
       << ',' << (r.ok ? "ok" : "failed") << '\n';
}

}  // namespace seriesode
