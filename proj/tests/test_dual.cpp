#include <cmath>
#include <limits>

#include "support.hpp"

namespace dl3 {
namespace {

using test::DualNear;
using test::Rng;

TEST(DualScalar, MultiplicationRule) {
  EXPECT_EQ(mul(DualScalar(2, 3), DualScalar(4, 5)), DualScalar(8, 22));
  DualScalar a(1.5, -2.25);
  EXPECT_EQ(a * DualScalar(1, 0), a);
}

TEST(DualScalar, EpsilonIsNilpotent) {
  DualScalar e = DualScalar::epsilon();
  EXPECT_EQ(e, DualScalar(0, 1));
  EXPECT_EQ(e * e, DualScalar(0, 0));
  DualScalar a(3.7, -1.2);
  EXPECT_EQ(a * e, DualScalar(0, 3.7));
}

TEST(DualScalar, DivisionExamples) {
  EXPECT_EQ(DualScalar(4, 2) / DualScalar(2, 1), DualScalar(2, 0));
  DualScalar a(-0.3, 7.5);
  EXPECT_EQ(a / DualScalar(1, 0), a);
  EXPECT_EQ(DualScalar(1, 1) / DualScalar(1, 1), DualScalar(1, 0));
}

TEST(DualScalar, DivisionMatchesComponentFormula) {
  // (a/b, (a*b − ab*)/b²)
  double a = 1.3, as = -0.7, b = 2.9, bs = 0.45;
  DualScalar q = div(DualScalar(a, as), DualScalar(b, bs));
  EXPECT_NEAR(q.re, a / b, 1e-15);
  EXPECT_NEAR(q.du, (as * b - a * bs) / (b * b), 1e-15);
}

TEST(DualScalar, DivisionReconstructsWithinFourUlps) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    DualScalar a = rng.dual(-10, 10);
    DualScalar b = rng.dual(0.5, 10);
    DualScalar back = mul(div(a, b), b);
    auto ulps = [](double x, double y) {
      double scale = std::max({std::abs(x), std::abs(y), std::numeric_limits<double>::min()});
      return std::abs(x - y) / (scale * std::numeric_limits<double>::epsilon());
    };
    EXPECT_LE(ulps(back.re, a.re), 4.0);
    // The dual part is a difference of products; measure it against the size of its terms.
    double du_scale = std::max(std::abs(a.du), std::abs(a.re / b.re * b.du));
    EXPECT_LE(std::abs(back.du - a.du) / (du_scale * std::numeric_limits<double>::epsilon()), 4.0);
  }
}

TEST(DualScalar, PureDualDivisorIsAnError) {
  EXPECT_EQ(test::error_code_of([] { div(DualScalar(1, 1), DualScalar(0, 2)); }), Errc::PureDualDivisor);
  EXPECT_EQ(test::error_code_of([] { div(DualScalar(1, 1), DualScalar(1e-8, 2), 1e-6); }), Errc::PureDualDivisor);
  EXPECT_NO_THROW(div(DualScalar(1, 1), DualScalar(1e-290, 0)));
}

TEST(DualScalar, NonFiniteResultIsAnOverflowError) {
  EXPECT_EQ(test::error_code_of([] { DualScalar(1e308, 0) * DualScalar(10, 0); }), Errc::ArithmeticOverflow);
  EXPECT_EQ(test::error_code_of([] { DualScalar(1e308, 1e308) + DualScalar(1e308, 0); }), Errc::ArithmeticOverflow);
}

TEST(DualScalarProperty, RingAxioms) {
  Rng rng(2);
  for (int i = 0; i < 10000; ++i) {
    DualScalar a = rng.dual(-1e3, 1e3), b = rng.dual(-1e3, 1e3), c = rng.dual(-1e3, 1e3);
    auto mag = [](const DualScalar& x) { return std::abs(x.re) + std::abs(x.du); };
    double s2 = mag(a) * mag(b) + 1.0;
    double s3 = mag(a) * mag(b) * mag(c) + 1.0;
    double s_add = mag(a) + mag(b) + mag(c);
    EXPECT_TRUE(DualNear(a * b, b * a, 1e-12 * s2));
    EXPECT_TRUE(DualNear(a + b, b + a, 1e-12 * s_add));
    EXPECT_TRUE(DualNear((a * b) * c, a * (b * c), 1e-12 * s3));
    EXPECT_TRUE(DualNear((a + b) + c, a + (b + c), 1e-12 * s_add));
    EXPECT_TRUE(DualNear(a * (b + c), a * b + a * c, 1e-12 * mag(a) * (mag(b) + mag(c))));
  }
}

TEST(DualScalarProperty, DivMulRoundTrip) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    DualScalar a = rng.dual(-1e3, 1e3);
    DualScalar b = rng.dual(-1e3, 1e3);
    if (std::abs(b.re) < 1e-6) continue;
    DualScalar back = mul(div(a, b), b);
    double ratio = std::abs(a.re / b.re * b.du);
    EXPECT_LE(std::abs(back.re - a.re), 1e-12 * std::abs(a.re));
    EXPECT_LE(std::abs(back.du - a.du), 1e-12 * (std::abs(a.du) + ratio));
  }
}

TEST(DualLift, TaylorRuleExamples) {
  EXPECT_EQ(lift(Fn::Sin, DualScalar(0, 1)), DualScalar(0, 1));
  DualScalar a(0.7, -1.9);
  EXPECT_EQ(lift(Fn::Identity, a), a);
  DualScalar r = lift(Fn::Sqrt, DualScalar(1, 4));
  EXPECT_EQ(r, DualScalar(1, 2));
  EXPECT_TRUE(DualNear(mul(r, r), DualScalar(1, 4), 1e-15));
}

TEST(DualLift, ResultComponents) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    double x = rng.uniform(0.1, 0.9);
    double d = rng.uniform(-2, 2);
    DualScalar y = lift(Fn::Atanh, DualScalar(x, d));
    EXPECT_DOUBLE_EQ(y.re, std::atanh(x));
    EXPECT_NEAR(y.du, d / (1 - x * x), 1e-13);
  }
}

TEST(DualLift, DomainErrorsNameTheFunction) {
  auto message = [](Fn f, double x) { return test::error_message_of([&] { lift(f, DualScalar(x, 1)); }); };
  EXPECT_NE(message(Fn::Sqrt, -1.0).find("sqrt"), std::string::npos);
  EXPECT_NE(message(Fn::Acosh, 0.5).find("acosh"), std::string::npos);
  EXPECT_NE(message(Fn::Ln, 0.0).find("ln"), std::string::npos);
  EXPECT_NE(message(Fn::Atanh, 1.0).find("atanh"), std::string::npos);
  EXPECT_EQ(test::error_code_of([] { lift(Fn::Sqrt, DualScalar(-1, 0)); }), Errc::Domain);
  // sqrt is defined at 0 but its derivative is not.
  EXPECT_EQ(test::error_code_of([] { lift(Fn::Sqrt, DualScalar(0, 1)); }), Errc::Domain);
  EXPECT_EQ(lift(Fn::Sqrt, DualScalar(0, 0)), DualScalar(0, 0));
}

TEST(DualLiftProperty, DualPartMatchesCentralDifference) {
  struct Case {
    Fn f;
    double lo, hi;
    double (*ref)(double);
  };
  const Case cases[] = {
      {Fn::Sin, -5, 5, [](double x) { return std::sin(x); }},
      {Fn::Cos, -5, 5, [](double x) { return std::cos(x); }},
      {Fn::Sinh, -3, 3, [](double x) { return std::sinh(x); }},
      {Fn::Cosh, -3, 3, [](double x) { return std::cosh(x); }},
      {Fn::Tanh, -3, 3, [](double x) { return std::tanh(x); }},
      {Fn::Exp, -3, 3, [](double x) { return std::exp(x); }},
      {Fn::Ln, 0.1, 10, [](double x) { return std::log(x); }},
      {Fn::Sqrt, 0.1, 10, [](double x) { return std::sqrt(x); }},
      {Fn::Atanh, -0.9, 0.9, [](double x) { return std::atanh(x); }},
      {Fn::Asinh, -5, 5, [](double x) { return std::asinh(x); }},
      {Fn::Acosh, 1.1, 5, [](double x) { return std::acosh(x); }},
      {Fn::Acos, -0.9, 0.9, [](double x) { return std::acos(x); }},
  };
  Rng rng(5);
  const double h = 1e-6;
  for (const Case& c : cases) {
    for (int i = 0; i < 200; ++i) {
      double a = rng.uniform(c.lo, c.hi);
      double fd = (c.ref(a + h) - c.ref(a - h)) / (2 * h);
      DualScalar y = lift(c.f, DualScalar(a, 1));
      EXPECT_NEAR(y.re, c.ref(a), 1e-14 * std::max(1.0, std::abs(y.re))) << fn_name(c.f);
      EXPECT_NEAR(y.du, fd, 1e-6) << fn_name(c.f) << " at " << a;
    }
  }
  for (double p : {-1.5, -1.0, 0.5, 2.0, 3.0}) {
    for (int i = 0; i < 200; ++i) {
      double a = rng.uniform(0.2, 4);
      double fd = (std::pow(a + h, p) - std::pow(a - h, p)) / (2 * h);
      EXPECT_NEAR(lift_pow(DualScalar(a, 1), p).du, fd, 1e-6);
    }
  }
}

TEST(DualLift, NestedDualsGiveHigherDerivatives) {
  using D2 = Dual<Dual<double>>;
  D2 x(Dual<double>(0.4, 1), Dual<double>(1, 0));
  D2 y = sinh(x) * x;
  // d²/dx² (x sinh x) = 2 cosh x + x sinh x
  EXPECT_NEAR(y.du.du, 2 * std::cosh(0.4) + 0.4 * std::sinh(0.4), 1e-14);
}

TEST(HyperbolicPair, Examples) {
  auto [s0, c0] = hyperbolic_pair(DualScalar(0, 1));
  EXPECT_EQ(s0, DualScalar(0, 1));
  EXPECT_EQ(c0, DualScalar(1, 0));
  auto [s1, c1] = hyperbolic_pair(DualScalar(0, 0));
  EXPECT_EQ(s1, DualScalar(0, 0));
  EXPECT_EQ(c1, DualScalar(1, 0));
  auto [s, c] = hyperbolic_pair(DualScalar(0.3, 0.2));
  EXPECT_TRUE(DualNear(c * c - s * s, DualScalar(1, 0), 1e-12));
}

TEST(HyperbolicPairProperty, UnitHyperbola) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    auto [s, c] = hyperbolic_pair(rng.dual(-3, 3));
    EXPECT_TRUE(DualNear(c * c - s * s, DualScalar(1, 0), 1e-12 * c.re * c.re * (1 + std::abs(c.du))));
  }
}

TEST(DualAbs, SignOfRealPartFlipsDualPart) {
  EXPECT_EQ(dual_abs(DualScalar(-2, 3)), DualScalar(2, -3));
  EXPECT_EQ(dual_abs(DualScalar(2, 3)), DualScalar(2, 3));
  EXPECT_EQ(test::error_code_of([] { dual_abs(DualScalar(0, 1)); }), Errc::Domain);
}

}  // namespace
}  // namespace dl3
