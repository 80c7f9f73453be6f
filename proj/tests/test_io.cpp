#include "seriesode/io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

using namespace seriesode;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr discarded and returns its exit status and stdout.
CliRun cli(const std::string& args) {
  const std::string cmd = std::string(SERIESODE_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string data(const char* name) { return std::string(SERIESODE_DATA_DIR) + "/" + name; }

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / (std::string("seriesode_test_") + name);
}

}  // namespace

TEST(Json, ScalarForms) {
  EXPECT_EQ(scalar_from_json(Json("27/2")).rational().re, mpq_class(27, 2));
  EXPECT_EQ(scalar_from_json(Json(0.5)).rational().re, mpq_class(1, 2));
  EXPECT_EQ(scalar_from_json(Json(3)).rational().re, mpq_class(3));
  const ExactScalar c = scalar_from_json(Json::parse(R"({"re": "1/3", "im": -1.25})"));
  EXPECT_TRUE(c.rational() == (ComplexRational{mpq_class(1, 3), mpq_class(-5, 4)}));
  EXPECT_TRUE(scalar_from_json(Json::parse(R"({"im": 2})")).rational() == (ComplexRational{0, 2}));
  EXPECT_THROW(scalar_from_json(Json::parse(R"({"re": 1, "imag": 2})")), ParseError);
  EXPECT_THROW(scalar_from_json(Json::parse("[1, 2]")), ParseError);
  EXPECT_THROW(scalar_from_json(Json(true)), ParseError);
}

TEST(Json, EquationRoundTrip) {
  EquationSpec eq;
  eq.s = parse_scalar("1/3-1i");
  eq.nu_plus = parse_scalar("2.5-1.25i");
  eq.nu_minus = parse_scalar("-3.75+0.5i");
  eq.v = {parse_scalar("1/2"), parse_scalar("-1+2i"), parse_scalar("3/4")};
  const Json j = equation_to_json(eq);
  const EquationSpec back = equation_from_json(Json::parse(j.dump()));
  EXPECT_EQ(equation_to_json(back).dump(), j.dump());
  EXPECT_TRUE(back.nu_minus.rational() == eq.nu_minus.rational());
  EXPECT_EQ(j.at("v").at(0), "1/2");
  EXPECT_THROW(equation_from_json(Json::parse(R"({"s": 1})")), ParseError);
  EXPECT_THROW(equation_from_json(Json::parse(R"({"v": [1], "w": 2})")), ParseError);
}

TEST(Json, FilesAndDiagnostics) {
  const EquationSpec eq = load_equation(data("complex.json"));
  EXPECT_EQ(eq.degree(), 2);
  EXPECT_THROW(load_equation(data("missing.json")), IoError);
  const auto bad = temp_file("bad.json");
  write_file(bad.string(), "{not json");
  EXPECT_THROW(load_equation(bad.string()), ParseError);
  std::filesystem::remove(bad);
  SeriesDiagnostics d;
  const Json dj = diagnostics_to_json(d);
  EXPECT_TRUE(dj.at("maxAExponent").is_null());
  EXPECT_TRUE(finite_or_null(-INFINITY).is_null());
}

TEST(Cli, EvalPrintsValuesAndDiagnostics) {
  const CliRun r = cli("eval --eq " + data("cosh.json") + " --z 1 --prec 30 --deriv");
  ASSERT_EQ(r.status, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("command"), "eval");
  EXPECT_EQ(j.at("result").at("psi").at("re").get<std::string>().substr(0, 12), "1.5430806348");
  EXPECT_EQ(j.at("result").at("dpsi").at("re").get<std::string>().substr(0, 12), "1.1752011936");
  EXPECT_EQ(j.at("config").at("precision").at("bits"), 128);
  EXPECT_LT(j.at("result").at("diagnostics").at("lgErrorF").get<double>(), -30.0);
}

TEST(Cli, OutFileMatchesStdout) {
  const std::string args = "wronskian --eq " + data("complex.json") + " --z 3+4i --prec 40";
  const CliRun a = cli(args);
  ASSERT_EQ(a.status, 0);
  const auto path = temp_file("out.json");
  const CliRun b = cli(args + " --out " + path.string());
  ASSERT_EQ(b.status, 0);
  EXPECT_TRUE(b.out.empty());
  EXPECT_EQ(read_file(path.string()), a.out);
  std::filesystem::remove(path);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("eval --eq " + data("cosh.json") + " --z 0").status, 2);
  EXPECT_EQ(cli("eval --eq " + data("cosh.json") + " --z 10 --max-terms 5").status, 3);
  EXPECT_EQ(cli("eval --eq " + data("missing.json") + " --z 1").status, 4);
  EXPECT_EQ(cli("eval --eq " + data("cosh.json") + " --z abc").status, 4);
  EXPECT_EQ(cli("eval --z 1").status, 4);
  EXPECT_EQ(cli("no-such-command").status, 4);
}

TEST(Cli, EigenAndApriori) {
  const CliRun e = cli("eigen --potential quartic --digits 20");
  ASSERT_EQ(e.status, 0);
  const Json j = Json::parse(e.out);
  EXPECT_EQ(j.dump().find("1.0603620904841828996") != std::string::npos, true);
  const CliRun a = cli("apriori --family anharmonic --c 0 --y 13.341664064126334 --prec 100000 --split 2");
  ASSERT_EQ(a.status, 0);
  const Json aj = Json::parse(a.out);
  EXPECT_EQ(aj.at("split").at(1).at("terms_per_sum"), 67468);
}
