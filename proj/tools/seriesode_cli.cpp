// seriesode: evaluate series solutions, check Wronskians, predict term
// counts, solve for eigenvalues, and run the random sweeps.
//
// Exit codes: 0 success, 1 other failure, 2 rejected input (reason on
// stderr), 3 no convergence, 4 I/O, configuration or parse error.

#include "seriesode/seriesode.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <iostream>
#include <sstream>

using namespace seriesode;

namespace {

enum Exit { kOk = 0, kFailure = 1, kRejected = 2, kNoConvergence = 3, kIo = 4 };

struct Options {
  std::string eq_file;
  std::string z = "1";
  std::string branch = "minus";
  long prec = 50;
  bool deriv = false;
  long max_terms = 0;
  std::uint64_t seed = SweepConfig{}.seed;
  long samples = 0;
  std::string out;
  long digits = 0;
  std::string yb;
  std::string family = "anharmonic";
  std::string c = "0";
  long split = 0;
  std::string y;
  std::string nu = "0";
  bool run = false;
  bool csv = false;
  std::string csv_file;
  std::string kind = "error";
  std::string precs;
  unsigned workers = 0;
  std::string potential = "quartic";
  std::string s = "1";
  std::string parity = "even";
  long level = 0;
  std::string bracket;
  long extra_digits = 0;
  bool trace = false;
};

Branch parse_branch(const std::string& b) {
  if (b == "plus") return Branch::plus;
  if (b == "minus") return Branch::minus;
  throw ParseError("branch must be 'plus' or 'minus'");
}

std::vector<long> parse_list(const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stol(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("bad integer list '" + text + "'");
    }
  }
  if (out.empty()) throw ParseError("empty integer list");
  return out;
}

Json list_json(const std::vector<long>& v) {
  Json a = Json::array();
  for (long x : v) a.push_back(x);
  return a;
}

Json precision_json(PrecisionSpec p) { return Json{{"digits", p.digits}, {"bits", p.bits}}; }

double positive_real(const std::string& text, const char* what) {
  const double v = parse_rational(text).get_d();
  if (!(v > 0.0)) throw ParseError(std::string(what) + " must be positive");
  return v;
}

Family parse_family(const std::string& f) {
  if (f == "anharmonic") return Family::anharmonic;
  if (f == "doublewell") return Family::doublewell;
  throw ParseError("family must be 'anharmonic' or 'doublewell'");
}

// ---------------------------------------------------------------------------

std::string cmd_eval(const Options& o) {
  if (o.eq_file.empty()) throw ParseError("eval needs --eq");
  const EquationSpec eq = load_equation(o.eq_file);
  EvalRequest req{eq, parse_scalar(o.z), parse_branch(o.branch), digits_to_bits(o.prec), o.deriv, std::nullopt};
  if (o.max_terms > 0) req.max_terms = o.max_terms;
  Json config{{"equation", equation_to_json(eq)},
              {"z", scalar_to_json(req.z)},
              {"branch", std::string(to_string(req.branch))},
              {"precision", precision_json(req.prec)},
              {"derivative", o.deriv}};
  if (req.max_terms) config["max_terms"] = *req.max_terms;
  const SeriesResult r = evaluate(req);
  return Json{{"command", "eval"}, {"config", config}, {"result", result_to_json(r)}}.dump(2);
}

std::string cmd_wronskian(const Options& o) {
  if (o.eq_file.empty()) throw ParseError("wronskian needs --eq");
  const EquationSpec eq = load_equation(o.eq_file);
  const ExactScalar z = parse_scalar(o.z);
  Json config{{"equation", equation_to_json(eq)}, {"z", scalar_to_json(z)}};
  PrecisionSpec prec;
  Json plan_json = nullptr;
  if (o.digits > 0) {
    const PrecisionPlan plan = plan_precision_detailed(eq, z, o.digits);
    prec = plan.prec;
    config["target_digits"] = o.digits;
    plan_json = Json{{"precision", precision_json(plan.prec)},
                     {"loss_digits", plan.loss_digits},
                     {"probe_digits", plan.probe_digits},
                     {"probes", plan.probes}};
  } else {
    prec = digits_to_bits(o.prec);
    config["precision"] = precision_json(prec);
  }
  const WronskiReport w = wronskian(eq, z, prec);
  const long shown = bits_to_digits(prec.bits);
  Json out{{"command", "wronskian"}, {"config", config}};
  if (!plan_json.is_null()) out["plan"] = plan_json;
  out["w_exact"] = complex_to_json(w.w_exact, shown);
  out["w_numeric"] = complex_to_json(w.w_numeric, shown);
  out["lg_delta_e"] = finite_or_null(w.lg_delta_e);
  out["lg_delta_r"] = finite_or_null(w.lg_delta_r.value_or(NAN));
  out["within_estimate"] = !w.lg_delta_r || *w.lg_delta_r <= w.lg_delta_e;
  out["plus"] = diagnostics_to_json(w.plus.diag);
  out["minus"] = diagnostics_to_json(w.minus.diag);
  return out.dump(2);
}

std::string cmd_apriori(const Options& o) {
  const Family family = parse_family(o.family);
  const mpq_class c = parse_rational(o.c);
  const AprioriModel model =
      family == Family::anharmonic ? AprioriModel::anharmonic(c.get_d()) : AprioriModel::doublewell(c.get_d());
  if (o.y.empty()) throw ParseError("apriori needs --y");
  const double y = positive_real(o.y, "y");
  const double x = y * y;
  const mpq_class nu_q = parse_rational(o.nu);
  if (nu_q != 0 && nu_q != mpq_class(1, 2)) throw ParseError("nu must be 0 or 1/2");
  const double nu = nu_q.get_d();
  const PeakEstimate peak = predict_peak(model, x);
  const long predicted = predict_terms(model, x, nu, static_cast<double>(o.prec));
  std::optional<long> improved;
  try {
    improved = predict_terms(model, x, nu, static_cast<double>(o.prec), true);
  } catch (const AprioriDomainError&) {
  }
  std::optional<long> actual;
  if (o.run) {
    EquationSpec eq = family_equation(family, c);
    const SeriesResult r = evaluate(eq, ExactScalar::from_double(x), nu == 0.0 ? Branch::minus : Branch::plus,
                                    digits_to_bits(o.prec));
    actual = r.diag.terms_summed;
  }
  std::vector<std::pair<long, long>> split;
  for (long k = 1; k <= o.split; ++k) split.emplace_back(k, predict_split_cost(y, static_cast<double>(o.prec), k));

  if (o.csv) {
    std::ostringstream os;
    os << "P,x,m_peak,lg_max_term,M_pred,M_actual\n";
    os << o.prec << ',' << x << ',' << peak.m_peak << ',' << peak.lg_max_term << ',' << predicted << ','
       << (actual ? std::to_string(*actual) : "") << '\n';
    std::string text = os.str();
    text.pop_back();
    return text;
  }
  Json config{{"family", to_string(family)}, {"c", o.c}, {"y", y}, {"x", x}, {"prec", o.prec}, {"nu", o.nu}};
  if (o.split > 0) config["split"] = o.split;
  Json out{{"command", "apriori"},
           {"config", config},
           {"m_peak", peak.m_peak},
           {"lg_max_term", peak.lg_max_term},
           {"predicted_terms", predicted},
           {"improved_predicted_terms", improved ? Json(*improved) : Json(nullptr)}};
  if (actual) out["actual_terms"] = *actual;
  if (!split.empty()) {
    Json a = Json::array();
    for (auto [k, m] : split) a.push_back(Json{{"k", k}, {"terms_per_sum", m}});
    out["split"] = a;
  }
  return out.dump(2);
}

std::string cmd_eigen(const Options& o) {
  EigenProblem p;
  if (o.potential == "quartic") {
    p.potential = Potential::quartic;
  } else if (o.potential == "doublewell") {
    p.potential = Potential::doublewell;
    p.s = parse_scalar(o.s);
    if (!p.s.is_real() || p.s.is_zero()) throw ParseError("s must be real and nonzero");
  } else {
    throw ParseError("potential must be 'quartic' or 'doublewell'");
  }
  if (o.parity != "even" && o.parity != "odd") throw ParseError("parity must be 'even' or 'odd'");
  p.parity = o.parity == "even" ? Parity::even : Parity::odd;
  if (o.level < 0) throw ParseError("level must be non-negative");
  p.level = o.level;
  p.target_digits = o.digits > 0 ? o.digits : 20;
  p.extra_digits = o.extra_digits;
  if (!o.yb.empty()) p.y_boundary = parse_rational(o.yb);
  if (!o.bracket.empty()) {
    const auto comma = o.bracket.find(',');
    if (comma == std::string::npos) throw ParseError("bracket must be 'lo,hi'");
    p.bracket = std::make_pair(parse_rational(o.bracket.substr(0, comma)), parse_rational(o.bracket.substr(comma + 1)));
  }
  const EigenResult r = solve_eigenvalue(p, RefineOptions{o.trace});
  Json config{{"potential", to_string(p.potential)},
              {"parity", to_string(p.parity)},
              {"level", p.level},
              {"digits", p.target_digits}};
  if (p.potential == Potential::doublewell) config["s"] = scalar_to_json(p.s);
  if (p.y_boundary) config["yb"] = rational_to_string(*p.y_boundary);
  if (p.bracket) config["bracket"] = Json::array({rational_to_string(p.bracket->first), rational_to_string(p.bracket->second)});
  if (p.extra_digits) config["extra_digits"] = p.extra_digits;
  Json out{{"command", "eigen"},
           {"config", config},
           {"epsilon", r.epsilon_string(p.target_digits)},
           {"digits_certified", r.digits_certified},
           {"yb", rational_to_string(r.y_boundary)},
           {"precision", precision_json(r.prec)},
           {"bracket", Json::array({rational_to_string(r.bracket.first), rational_to_string(r.bracket.second)})},
           {"iterations", r.iterations},
           {"lg_boundary_shift", finite_or_null(r.lg_boundary_shift)},
           {"seconds", r.seconds}};
  if (o.trace) {
    Json t = Json::array();
    for (const BracketStep& s : r.trace)
      t.push_back(Json{{"lo", Real(s.lo, 128).to_string(25)}, {"hi", Real(s.hi, 128).to_string(25)},
                       {"sign_lo", s.sign_lo}, {"sign_hi", s.sign_hi}});
    out["trace"] = t;
  }
  return out.dump(2);
}

Json quantiles_json(std::vector<double> x) {
  return Json{{"min", stats::quantile(x, 0.0)},  {"q01", stats::quantile(x, 0.01)},
              {"q25", stats::quantile(x, 0.25)}, {"median", stats::quantile(x, 0.5)},
              {"q75", stats::quantile(x, 0.75)}, {"q99", stats::quantile(x, 0.99)},
              {"max", stats::quantile(x, 1.0)}};
}

std::string cmd_sweep(const Options& o) {
  SweepConfig cfg;
  cfg.seed = o.seed;
  if (o.samples > 0) cfg.sample_count = o.samples;
  cfg.workers = o.workers;
  if (!o.precs.empty()) cfg.precisions = parse_list(o.precs);
  Json config{{"kind", o.kind},
              {"samples", cfg.sample_count},
              {"seed", cfg.seed},
              {"degree", Json::array({1, cfg.max_degree})},
              {"s_parts", Json::array({"-1", "-1/3", "1/3", "1"})},
              {"nu_range", cfg.nu_range},
              {"v_range", cfg.v_range},
              {"z_range", cfg.z_range}};
  Json out{{"command", "sweep"}};
  std::ostringstream csv;
  if (o.kind == "error") {
    config["precisions"] = list_json(cfg.precisions);
    config["reference_digits"] = reference_digits(cfg);
    const auto recs = run_error_sweep(cfg);
    const ErrorSummary s = summarize(recs);
    write_csv(csv, cfg, recs);
    std::vector<double> deltas;
    for (const ErrorRecord& r : recs)
      for (const ErrorPoint& p : r.points)
        if (p.ok) deltas.push_back(p.delta);
    out["config"] = config;
    out["summary"] = Json{{"points", s.points},
                          {"failures", s.failures},
                          {"redraws", s.redraws},
                          {"pearson", s.pearson},
                          {"delta_within_-10_6", s.delta_within},
                          {"iqr_delta", s.iqr_delta},
                          {"iqr_delta_minus_low", s.iqr_delta_diff},
                          {"ks_top_two", s.ks_distance},
                          {"delta_quantiles", quantiles_json(deltas)}};
    out["checks"] = Json{{"pearson_ge_0.99", s.pearson >= 0.99},
                         {"delta_range_ge_0.99", s.delta_within >= 0.99},
                         {"iqr_narrower", s.iqr_delta_diff < s.iqr_delta}};
  } else if (o.kind == "wronskian" || o.kind == "plan") {
    const bool plan = o.kind == "plan";
    if (plan && o.digits <= 0) throw ParseError("plan sweep needs --digits");
    if (plan) config["target_digits"] = o.digits; else config["precision"] = precision_json(digits_to_bits(o.prec));
    const auto recs = plan ? run_wronskian_sweep(cfg, o.digits) : run_wronskian_fixed(cfg, o.prec);
    write_csv(csv, cfg, recs);
    long ok = 0, hits = 0, band = 0, redraws = 0;
    std::vector<double> diff, used;
    for (const WronskiRecord& r : recs) {
      redraws += r.redraws;
      if (!r.ok) continue;
      ++ok;
      const double d = r.lg_delta_r - r.lg_delta_e;
      diff.push_back(d);
      used.push_back(static_cast<double>(r.digits));
      if (plan ? r.lg_delta_r <= -static_cast<double>(o.digits) : r.lg_delta_r <= r.lg_delta_e) ++hits;
      if (d >= -6.0 && d <= 2.0) ++band;
    }
    const double n = static_cast<double>(recs.size());
    out["config"] = config;
    out["summary"] = Json{{"valid", ok},
                          {"redraws", redraws},
                          {plan ? "fraction_meeting_target" : "fraction_within_estimate", hits / n},
                          {"fraction_r_minus_e_in_-6_2", band / n},
                          {"r_minus_e_quantiles", quantiles_json(diff)},
                          {"digits_used_quantiles", quantiles_json(used)}};
    out["checks"] = Json{{plan ? "target_met_ge_0.99" : "within_estimate_ge_0.99", hits / n >= 0.99}};
  } else {
    throw ParseError("sweep kind must be 'error', 'wronskian' or 'plan'");
  }
  if (!o.csv_file.empty()) {
    write_file(o.csv_file, csv.str());
    out["csv"] = o.csv_file;
  }
  return out.dump(2);
}

std::string cmd_bench(const Options& o) {
  EquationSpec eq;
  Json eq_json;
  if (o.eq_file.empty()) {
    // Quartic oscillator at its ground-state eigenvalue.
    const EigenProblem p;
    eq = to_equation(p, ExactScalar(parse_rational("1.0603620904841828996470460166926635455152"))).first;
  } else {
    eq = load_equation(o.eq_file);
  }
  const ExactScalar z = parse_scalar(o.eq_file.empty() && o.z == "1" ? "10" : o.z);
  const Branch branch = parse_branch(o.branch);
  const std::vector<long> precs = parse_list(o.precs.empty() ? "1000,2000,4000,8000" : o.precs);
  const auto rows = run_scaling_bench(eq, z, branch, precs);
  std::vector<double> xs, ys;
  Json table = Json::array();
  std::ostringstream csv;
  csv << "P,M,terms,seconds\n";
  for (const BenchRow& r : rows) {
    xs.push_back(static_cast<double>(r.digits));
    ys.push_back(static_cast<double>(r.terms));
    table.push_back(Json{{"P", r.digits}, {"M", r.bits}, {"terms", r.terms}, {"seconds", r.seconds}});
    csv << r.digits << ',' << r.bits << ',' << r.terms << ',' << r.seconds << '\n';
  }
  Json out{{"command", "bench"},
           {"config", Json{{"equation", equation_to_json(eq)},
                           {"z", scalar_to_json(z)},
                           {"branch", std::string(to_string(branch))},
                           {"precisions", list_json(precs)}}},
           {"rows", table}};
  if (rows.size() >= 2) {
    const stats::LinearFit f = stats::linear_fit(xs, ys);
    out["fit"] = Json{{"intercept", f.intercept}, {"slope", f.slope}, {"max_relative_residual", f.max_relative_residual}};
  }
  if (!o.csv_file.empty()) {
    write_file(o.csv_file, csv.str());
    out["csv"] = o.csv_file;
  }
  return out.dump(2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frobenius series solutions in arbitrary precision"};
  app.require_subcommand(1);
  Options o;

  auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "write the output to FILE instead of stdout"); };

  CLI::App* eval = app.add_subcommand("eval", "evaluate psi (and psi') at z");
  eval->add_option("--eq", o.eq_file, "equation JSON file")->required();
  eval->add_option("--z", o.z, "evaluation point, e.g. 27/2+43/7i");
  eval->add_option("--branch", o.branch, "plus or minus");
  eval->add_option("--prec", o.prec, "decimal digits");
  eval->add_flag("--deriv", o.deriv, "also compute psi'");
  eval->add_option("--max-terms", o.max_terms, "cap on summed terms");
  add_out(eval);

  CLI::App* wr = app.add_subcommand("wronskian", "compare the numerical and exact Wronskian");
  wr->add_option("--eq", o.eq_file, "equation JSON file")->required();
  wr->add_option("--z", o.z, "evaluation point");
  wr->add_option("--prec", o.prec, "decimal digits");
  wr->add_option("--digits", o.digits, "plan the precision for an absolute error of 10^-digits");
  add_out(wr);

  CLI::App* ap = app.add_subcommand("apriori", "predict term counts for the closed-form families");
  ap->add_option("--family", o.family, "anharmonic or doublewell");
  ap->add_option("--c", o.c, "family parameter c");
  ap->add_option("--y", o.y, "evaluation radius y (x = y^2)")->required();
  ap->add_option("--prec", o.prec, "decimal digits P");
  ap->add_option("--nu", o.nu, "0 or 1/2");
  ap->add_option("--split", o.split, "also cost k = 1..split consecutive expansions");
  ap->add_flag("--run", o.run, "evaluate the series and report the actual term count");
  ap->add_flag("--csv", o.csv, "emit a CSV row instead of JSON");
  add_out(ap);

  CLI::App* eig = app.add_subcommand("eigen", "solve for an eigenvalue by shooting");
  eig->add_option("--potential", o.potential, "quartic or doublewell");
  eig->add_option("--s", o.s, "doublewell s");
  eig->add_option("--parity", o.parity, "even or odd");
  eig->add_option("--level", o.level, "index among states of this parity");
  eig->add_option("--digits", o.digits, "target digits");
  eig->add_option("--yb", o.yb, "boundary radius");
  eig->add_option("--bracket", o.bracket, "lo,hi");
  eig->add_option("--extra-digits", o.extra_digits, "digits added to the planned precision");
  eig->add_flag("--trace", o.trace, "include the bracket history");
  add_out(eig);

  CLI::App* sw = app.add_subcommand("sweep", "random-parameter error experiments");
  sw->add_option("--kind", o.kind, "error, wronskian or plan");
  sw->add_option("--samples", o.samples, "number of samples");
  sw->add_option("--seed", o.seed, "64-bit seed");
  sw->add_option("--precs", o.precs, "comma-separated digits for the error sweep");
  sw->add_option("--prec", o.prec, "digits for the fixed Wronskian sweep");
  sw->add_option("--digits", o.digits, "target digits for the plan sweep");
  sw->add_option("--csv", o.csv_file, "per-sample CSV file");
  sw->add_option("--workers", o.workers, "worker threads (0: all cores)");
  add_out(sw);

  CLI::App* bench = app.add_subcommand("bench", "term count and time against precision");
  bench->add_option("--eq", o.eq_file, "equation JSON file (default: quartic ground state)");
  bench->add_option("--z", o.z, "evaluation point (default 10 for the quartic)");
  bench->add_option("--branch", o.branch, "plus or minus");
  bench->add_option("--precs", o.precs, "comma-separated digits");
  bench->add_option("--csv", o.csv_file, "CSV file");
  add_out(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kIo;
  }

  try {
    std::string text;
    if (*eval) text = cmd_eval(o);
    else if (*wr) text = cmd_wronskian(o);
    else if (*ap) text = cmd_apriori(o);
    else if (*eig) text = cmd_eigen(o);
    else if (*sw) text = cmd_sweep(o);
    else text = cmd_bench(o);
    text += '\n';
    if (o.out.empty()) std::cout << text;
    else write_file(o.out, text);
    return kOk;
  } catch (const ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kRejected;
  } catch (const NonConvergence& e) {
    std::cerr << "NonConvergence: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kIo;
  } catch (const Json::exception& e) {
    std::cerr << "JSON error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
