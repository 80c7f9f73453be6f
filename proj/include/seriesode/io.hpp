#pragma once

// JSON forms of equations, scalars and results.
//
// Equation file: {"s": S, "nu_plus": S, "nu_minus": S, "v": [S, ...]} where a
// scalar S is a string ("27/2", "-1/3", "1.5+2i") or {"re": "...", "im": "..."}
// with decimal or rational strings. Numbers are accepted through their JSON
// text. Every literal is read exactly.

#include "seriesode/frobenius.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace seriesode {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline ExactScalar scalar_from_json(const Json& j) {
  if (j.is_string()) return parse_scalar(j.get<std::string>());
  if (j.is_number()) return parse_scalar(j.dump());
  if (j.is_object()) {
    auto part = [&](const char* key) -> mpq_class {
      if (!j.contains(key)) return 0;
      const Json& p = j.at(key);
      if (p.is_string()) return parse_rational(p.get<std::string>());
      if (p.is_number()) return parse_rational(p.dump());
      throw ParseError(std::string("scalar component '") + key + "' must be a string or number");
    };
    for (const auto& item : j.items())
      if (item.key() != "re" && item.key() != "im") throw ParseError("unknown scalar key '" + item.key() + "'");
    return ExactScalar(ComplexRational{part("re"), part("im")});
  }
  throw ParseError("scalar must be a string, number or {re, im} object");
}

/// Exact values as rational strings, floating ones at their own precision.
inline Json scalar_to_json(const ExactScalar& x) {
  if (x.is_exact()) {
    const ComplexRational& q = x.rational();
    if (q.is_real()) return rational_to_string(q.re);
    return Json{{"re", rational_to_string(q.re)}, {"im", rational_to_string(q.im)}};
  }
  const Complex& z = x.floating();
  const long digits = bits_to_digits(z.prec());
  return Json{{"re", z.re.to_string(digits)}, {"im", z.im.to_string(digits)}};
}

inline EquationSpec equation_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("equation must be a JSON object");
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    if (k != "s" && k != "nu_plus" && k != "nu_minus" && k != "v") throw ParseError("unknown equation key '" + k + "'");
  }
  EquationSpec eq;
  if (j.contains("s")) eq.s = scalar_from_json(j.at("s"));
  if (j.contains("nu_plus")) eq.nu_plus = scalar_from_json(j.at("nu_plus"));
  if (j.contains("nu_minus")) eq.nu_minus = scalar_from_json(j.at("nu_minus"));
  if (!j.contains("v") || !j.at("v").is_array()) throw ParseError("equation needs an array 'v'");
  for (const Json& c : j.at("v")) eq.v.push_back(scalar_from_json(c));
  return eq;
}

inline Json equation_to_json(const EquationSpec& eq) {
  Json v = Json::array();
  for (const ExactScalar& c : eq.v) v.push_back(scalar_to_json(c));
  return Json{{"s", scalar_to_json(eq.s)},
              {"nu_plus", scalar_to_json(eq.nu_plus)},
              {"nu_minus", scalar_to_json(eq.nu_minus)},
              {"v", v}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline EquationSpec load_equation(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  return equation_from_json(j);
}

/// Complex value at `digits` significant digits per component.
inline Json complex_to_json(const Complex& z, long digits) {
  return Json{{"re", z.re.to_string(digits)}, {"im", z.im.to_string(digits)}};
}

inline Json exponent_to_json(const BinaryExponent& e) {
  if (e.is_zero()) return nullptr;
  return e.value();
}

inline Json finite_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

inline Json diagnostics_to_json(const SeriesDiagnostics& d) {
  return Json{{"maxAExponent", exponent_to_json(d.maxAExponent)},
              {"maxA_at", d.maxA_at},
              {"maxAdExponent", exponent_to_json(d.maxAdExponent)},
              {"maxAd_at", d.maxAd_at},
              {"terms_summed", d.terms_summed},
              {"lgErrorF", finite_or_null(d.lgErrorF)},
              {"lgErrorFd", finite_or_null(d.lgErrorFd)}};
}

/// psi (and psi') printed with every digit the working precision carries.
inline Json result_to_json(const SeriesResult& r) {
  const long digits = bits_to_digits(r.prec.bits);
  Json j{{"psi", complex_to_json(r.psi, digits)}};
  if (r.dpsi) j["dpsi"] = complex_to_json(*r.dpsi, digits);
  j["diagnostics"] = diagnostics_to_json(r.diag);
  j["precision"] = Json{{"digits", r.prec.digits}, {"bits", r.prec.bits}};
  return j;
}

}  // namespace seriesode
