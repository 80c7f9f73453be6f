#include "seriesode/accuracy.hpp"
#include "seriesode/continuation.hpp"

#include <gtest/gtest.h>

using namespace seriesode;

namespace {

EquationSpec cosh_equation() {
  EquationSpec eq;
  eq.nu_plus = ExactScalar(1);
  eq.v = {ExactScalar(0), ExactScalar(1)};
  return eq;
}

double digits_agree(const Complex& a, const Complex& b) { return lg_abs(b) - lg_abs(a - b); }

}  // namespace

TEST(ErrorEstimate, ClosedForm) {
  SeriesDiagnostics d;
  d.maxAExponent = BinaryExponent::of(1664 - 333);
  d.maxAdExponent = BinaryExponent::of(1664 - 333);
  const PrecisionSpec p{500, 1664};
  EXPECT_NEAR(estimate_error(d, p).lg_error, -333 * kLog10Of2 + 4.30, 1e-12);
  EXPECT_NEAR(estimate_error(d, p).lg_error, -95.94, 0.01);
  EXPECT_NEAR(estimate_error(d, p, Quantity::derivative).lg_error, -333 * kLog10Of2 + 3.02, 1e-12);
  d.maxAExponent = BinaryExponent::of(0);
  EXPECT_NEAR(estimate_error(d, PrecisionSpec{19, 64}).lg_error, -14.966, 0.001);
  EXPECT_EQ(estimate_error(d, PrecisionSpec{19, 64}).source, ErrorSource::largest_term);
}

TEST(ErrorEstimate, Bootstrap) {
  // lg eps = -10 at 128 bits, projected to 1728 bits.
  EXPECT_NEAR(bootstrap_error(-10.0, 128, 1728), -10.0 - 1600 * kLog10Of2 + 2.0, 1e-12);
  EXPECT_NEAR(bootstrap_error(-10.0, 128, 1728), -489.65, 0.01);
  EXPECT_DOUBLE_EQ(bootstrap_error(-7.0, 64, 64), -5.0);
  EXPECT_THROW(bootstrap_error(-10.0, 128, 64), std::invalid_argument);
}

TEST(Wronskian, CoshSinhIsMinusOne) {
  for (const char* z : {"1", "10+3i", "-2.5"}) {
    const WronskiReport w = wronskian(cosh_equation(), parse_scalar(z), digits_to_bits(100));
    EXPECT_NEAR(w.w_exact.re.to_double(), -1.0, 0.0);
    ASSERT_TRUE(w.lg_delta_r.has_value());
    EXPECT_LE(*w.lg_delta_r, w.lg_delta_e) << z;
    EXPECT_LT(w.lg_delta_e, -90.0) << z;
  }
}

TEST(Wronskian, GeneralExponents) {
  EquationSpec eq;
  eq.s = parse_scalar("1/3-1i");
  eq.nu_plus = parse_scalar("2.25-3.5i");
  eq.nu_minus = parse_scalar("-1.5+0.75i");
  eq.v = {parse_scalar("1-2i"), parse_scalar("0.5"), parse_scalar("-3+1i"), parse_scalar("2i")};
  for (const char* z : {"3+4i", "-6-1i", "0.25i"}) {
    const WronskiReport w = wronskian(eq, parse_scalar(z), digits_to_bits(60));
    ASSERT_TRUE(w.lg_delta_r.has_value());
    EXPECT_LE(*w.lg_delta_r, w.lg_delta_e) << z;
    EXPECT_GE(*w.lg_delta_r - w.lg_delta_e, -8.0) << z;
  }
}

TEST(PlanPrecision, MeetsTheTarget) {
  EquationSpec eq;
  eq.s = parse_scalar("1/3+1/3i");
  eq.nu_plus = parse_scalar("4.5-2i");
  eq.nu_minus = parse_scalar("-7+3.25i");
  eq.v = {parse_scalar("2-1i"), parse_scalar("-4+3i"), parse_scalar("1+1i")};
  const ExactScalar z = parse_scalar("-12+9i");
  const PrecisionPlan plan = plan_precision_detailed(eq, z, 60);
  EXPECT_GT(plan.prec.digits, 60);
  const WronskiReport w = wronskian(eq, z, plan.prec);
  EXPECT_LE(*w.lg_delta_r, -60.0);
  EXPECT_EQ(plan_precision(eq, z, 60), plan.prec);
  EXPECT_THROW(plan_precision(eq, z, 0), std::invalid_argument);
}

TEST(Recenter, TaylorCoefficientsOfQ) {
  // q(z) = 1 + 2z + 3z^2 around 2: 17 + 14w + 3w^2.
  EquationSpec eq;
  eq.nu_plus = ExactScalar(1);
  eq.v = {ExactScalar(0), ExactScalar(1), ExactScalar(2), ExactScalar(3)};
  const EquationSpec r = recenter(eq, ExactScalar(2));
  ASSERT_EQ(r.v.size(), 4u);
  EXPECT_TRUE(r.v[0].is_zero());
  EXPECT_EQ(r.v[1].rational().re, 17);
  EXPECT_EQ(r.v[2].rational().re, 14);
  EXPECT_EQ(r.v[3].rational().re, 3);
  // Shifting by zero is the identity; two shifts compose.
  EXPECT_EQ(recenter(eq, ExactScalar(0)).v[2].rational().re, 2);
  const EquationSpec twice = recenter(recenter(eq, ExactScalar(1)), ExactScalar(1));
  for (size_t k = 0; k < r.v.size(); ++k) EXPECT_TRUE(twice.v[k].rational() == r.v[k].rational());
}

TEST(Recenter, ComplexShiftAndRejection) {
  EquationSpec eq;
  eq.nu_plus = ExactScalar(1);
  eq.v = {ExactScalar(0), ExactScalar(0), ExactScalar(0), ExactScalar(1)};  // q = z^2
  const EquationSpec r = recenter(eq, parse_scalar("1+i"));
  // (1 + i + w)^2 = 2i + (2 + 2i) w + w^2
  EXPECT_TRUE(r.v[1].rational() == (ComplexRational{0, 2}));
  EXPECT_TRUE(r.v[2].rational() == (ComplexRational{2, 2}));
  EXPECT_TRUE(r.v[3].rational() == (ComplexRational{1, 0}));
  EquationSpec bad = eq;
  bad.v[0] = ExactScalar(1);
  EXPECT_THROW(recenter(bad, ExactScalar(1)), std::invalid_argument);
}

TEST(Continuation, MatchesDirectEvaluation) {
  const PrecisionSpec prec = digits_to_bits(100);
  const EquationSpec eq = cosh_equation();
  const Complex one(Real(1L, prec.bits)), zero(Real(0L, prec.bits));
  const SeriesResult direct = evaluate(eq, ExactScalar(3), Branch::minus, prec, true);
  const ContinuationResult c =
      continue_solution(eq, {ExactScalar(0), ExactScalar(1), ExactScalar(2), ExactScalar(3)}, one, zero, prec);
  EXPECT_EQ(c.steps, 3);
  EXPECT_GE(digits_agree(c.psi, direct.psi), 88.0);
  EXPECT_GE(digits_agree(c.dpsi, *direct.dpsi), 88.0);
  EXPECT_LT(c.lg_error_psi, -85.0);
}

TEST(Continuation, RoundTripReturnsToStart) {
  const PrecisionSpec prec = digits_to_bits(80);
  EquationSpec eq;
  eq.nu_plus = ExactScalar(1);
  eq.v = {ExactScalar(0), ExactScalar(-1), ExactScalar(0), ExactScalar(0), ExactScalar(0), ExactScalar(1)};
  const Complex psi0(Real(mpq_class(1, 3), prec.bits), Real(mpq_class(1, 7), prec.bits));
  const Complex dpsi0(Real(mpq_class(-2, 5), prec.bits));
  const auto path = std::vector<ExactScalar>{ExactScalar(0), parse_scalar("1+1i"), parse_scalar("2"), ExactScalar(0)};
  const ContinuationResult c = continue_solution(eq, path, psi0, dpsi0, prec);
  EXPECT_GE(digits_agree(c.psi, psi0), 60.0);
  EXPECT_GE(digits_agree(c.dpsi, dpsi0), 60.0);
}

TEST(Continuation, TrivialPaths) {
  const PrecisionSpec prec = digits_to_bits(30);
  const Complex a(Real(2L, prec.bits)), b(Real(3L, prec.bits));
  const ContinuationResult c = continue_solution(cosh_equation(), {ExactScalar(1)}, a, b, prec);
  EXPECT_EQ(c.steps, 0);
  EXPECT_EQ(c.psi.re.to_double(), 2.0);
  EquationSpec singular = cosh_equation();
  singular.nu_plus = ExactScalar(1, 2);
  EXPECT_THROW(continue_solution(singular, {ExactScalar(1), ExactScalar(2)}, a, b, prec), std::invalid_argument);
}
