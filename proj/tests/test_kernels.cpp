// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "opcvx/kernels.hpp"
#include "test_util.hpp"

using namespace opcvx;
using opcvx::testing::expect_kind;

namespace {

const KernelId kAll[] = {KernelId::G21, KernelId::F23, KernelId::H25, KernelId::F33,
                         KernelId::F34, KernelId::F35, KernelId::LIEB};

double eval(KernelId id, double p, std::vector<double> args) { return ScalarKernel(id, p).eval(args); }

std::vector<double> draw(int arity, Rng& rng) {
  const RVector x = random_log_uniform(arity, -2.0, 2.0, rng);
  return {x.data(), x.data() + x.size()};
}

}  // namespace

TEST(Kernels, Examples) {
  EXPECT_NEAR(eval(KernelId::G21, 0.5, {1.0, 4.0}), 7.0 / 3.0, 1e-14);
  EXPECT_NEAR(eval(KernelId::F23, 0.5, {1.0, 4.0}), 3.0 / 7.0, 1e-15);
  EXPECT_NEAR(eval(KernelId::H25, 0.5, {1.0, 4.0}), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(eval(KernelId::F35, 0.5, {4.0, 1.0, 1.0}), 3.0, 1e-14);
  EXPECT_NEAR(eval(KernelId::LIEB, 0.5, {4.0, 9.0}), 6.0, 1e-14);
  EXPECT_NEAR(eval(KernelId::F33, 0.5, {1.0, 4.0, 9.0}), 7.0, 1e-13);
  EXPECT_NEAR(eval(KernelId::F34, 0.5, {1.0, 4.0, 4.0}), 8.0 / 3.0, 1e-14);
  // p = 1: G21 is s + t, H25 at p = 0 is 1
  EXPECT_NEAR(eval(KernelId::G21, 1.0, {2.0, 5.0}), 7.0, 1e-13);
  EXPECT_NEAR(eval(KernelId::H25, 0.0, {2.0, 5.0}), 1.0, 1e-15);
}

TEST(Kernels, DiagonalValues) {
  const double p = 0.3;
  const double t = 2.5;
  const double t3 = 0.7;
  EXPECT_NEAR(eval(KernelId::G21, p, {t, t}), (1 + p) * std::pow(t, p), 1e-13);
  EXPECT_NEAR(eval(KernelId::H25, p, {t, t}), (1 - p) * std::pow(t, -p), 1e-13);
  EXPECT_NEAR(eval(KernelId::F35, p, {t, t, t3}), std::pow(t, 1 - p) * std::pow(t3, p) / p, 1e-13);
  // F33 on the diagonal is a multiple of the Lieb kernel.
  EXPECT_NEAR(eval(KernelId::F33, p, {t, t, t3}), (1 + p) * eval(KernelId::LIEB, p, {t, t3}), 1e-13);
}

TEST(Kernels, SymmetricInFirstTwoArguments) {
  Rng rng(51);
  for (KernelId id : {KernelId::G21, KernelId::F23, KernelId::H25, KernelId::F33, KernelId::F34, KernelId::F35}) {
    for (double p : {0.25, 0.5, 0.75}) {
      const ScalarKernel k(id, p);
      for (int s = 0; s < 30; ++s) {
        std::vector<double> x = draw(k.arity(), rng);
        const double a = k.eval(x);
        std::swap(x[0], x[1]);
        EXPECT_EQ(a, k.eval(x)) << k.name();
      }
    }
  }
}

TEST(Kernels, ContinuousAtTheDiagonal) {
  for (KernelId id : kAll) {
    const ScalarKernel k(id, 0.6);
    std::vector<double> on(static_cast<std::size_t>(k.arity()), 1.7);
    std::vector<double> near = on;
    near[1] *= 1.0 + 1e-9;
    EXPECT_NEAR(k.eval(on), k.eval(near), 1e-8 * std::abs(k.eval(on))) << k.name();
  }
}

TEST(Kernels, Homogeneity) {
  // Degrees: G21 p, F23 -p, H25 -p, the three-variable kernels and LIEB 1.
  Rng rng(52);
  const double p = 0.35;
  const double c = 3.7;
  for (KernelId id : kAll) {
    const ScalarKernel k(id, p);
    double degree = 1.0;
    if (id == KernelId::G21) degree = p;
    if (id == KernelId::F23 || id == KernelId::H25) degree = -p;
    for (int s = 0; s < 20; ++s) {
      std::vector<double> x = draw(k.arity(), rng);
      const double base = k.eval(x);
      for (double& v : x) v *= c;
      EXPECT_NEAR(k.eval(x), std::pow(c, degree) * base, 1e-12 * std::abs(k.eval(x))) << k.name();
    }
  }
}

TEST(Kernels, MidpointConcavityAndConvexity) {
  Rng rng(53);
  for (KernelId id : kAll) {
    for (double p : {0.25, 0.5, 0.75}) {
      const ScalarKernel k(id, p);
      for (int s = 0; s < 100; ++s) {
        const std::vector<double> x = draw(k.arity(), rng);
        const std::vector<double> y = draw(k.arity(), rng);
        std::vector<double> m(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) m[i] = 0.5 * (x[i] + y[i]);
        const double gap = k.eval(m) - 0.5 * (k.eval(x) + k.eval(y));
        const double slack = 1e-12 * (1.0 + std::abs(k.eval(m)));
        if (k.sense() == Sense::Concave) {
          EXPECT_GE(gap, -slack) << k.name();
        } else {
          EXPECT_LE(gap, slack) << k.name();
        }
      }
    }
  }
}

TEST(Kernels, F23IsReciprocalOfG21) {
  Rng rng(54);
  for (int s = 0; s < 30; ++s) {
    const std::vector<double> x = draw(2, rng);
    EXPECT_NEAR(eval(KernelId::F23, 0.4, x) * eval(KernelId::G21, 0.4, x), 1.0, 1e-14);
  }
}

TEST(Kernels, ParameterRanges) {
  expect_kind(ErrorKind::BadParameter, [] { ScalarKernel(KernelId::G21, 0.0); });
  expect_kind(ErrorKind::BadParameter, [] { ScalarKernel(KernelId::G21, 1.5); });
  expect_kind(ErrorKind::BadParameter, [] { ScalarKernel(KernelId::H25, 1.0); });
  expect_kind(ErrorKind::BadParameter, [] { ScalarKernel(KernelId::F34, 1.0); });
  expect_kind(ErrorKind::BadParameter, [] { ScalarKernel(KernelId::F34, 0.0); });
  expect_kind(ErrorKind::BadParameter, [] { ScalarKernel(KernelId::F35, std::nan("")); });
  EXPECT_NO_THROW(ScalarKernel(KernelId::H25, 0.0));
  EXPECT_NO_THROW(ScalarKernel(KernelId::F35, 1.0));
  EXPECT_EQ(kernel_id_from_string("F35"), KernelId::F35);
  expect_kind(ErrorKind::BadParameter, [] { kernel_id_from_string("F99"); });
}

TEST(Kernels, ArgumentErrors) {
  const ScalarKernel g(KernelId::G21, 0.5);
  expect_kind(ErrorKind::ArityMismatch, [&] { g.eval(std::vector<double>{1.0, 2.0, 3.0}); });
  expect_kind(ErrorKind::DomainViolation, [&] { g.eval(std::vector<double>{1.0, 0.0}); });
  expect_kind(ErrorKind::DomainViolation, [&] { g.eval(std::vector<double>{-1.0, 2.0}); });
}

TEST(Quadrature, RuleProperties) {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(64);
  EXPECT_EQ(rule.size(), 64);
  double total = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    EXPECT_GT(rule.nodes()[static_cast<std::size_t>(i)], 0.0);
    EXPECT_LT(rule.nodes()[static_cast<std::size_t>(i)], 1.0);
    if (i > 0) EXPECT_LT(rule.nodes()[static_cast<std::size_t>(i - 1)], rule.nodes()[static_cast<std::size_t>(i)]);
    total += rule.weights()[static_cast<std::size_t>(i)];
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
  // exact for polynomials up to degree 127
  EXPECT_NEAR(rule.integrate([](double x) { return std::pow(x, 20); }), 1.0 / 21.0, 1e-15);
  EXPECT_NEAR(QuadratureRule::gauss_legendre(3).integrate([](double x) { return x * x * x * x * x; }), 1.0 / 6.0,
              1e-15);
  expect_kind(ErrorKind::BadParameter, [] { QuadratureRule::gauss_legendre(0); });
  expect_kind(ErrorKind::BadParameter, [] { QuadratureRule({0.5, 0.2}, {0.5, 0.5}); });
  expect_kind(ErrorKind::BadParameter, [] { QuadratureRule({0.5}, {0.7}); });
}

TEST(Quadrature, IntegralFormsMatchClosedForms) {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(64);
  Rng rng(55);
  for (KernelId id : {KernelId::G21, KernelId::H25, KernelId::F33, KernelId::F34}) {
    for (double p : {0.25, 0.5, 0.75}) {
      const ScalarKernel k(id, p);
      ASSERT_TRUE(k.has_integral_form());
      for (int s = 0; s < 100; ++s) {
        const std::vector<double> x = draw(k.arity(), rng);
        const double closed = k.eval(x);
        EXPECT_LE(std::abs(k.integral(x, rule) - closed) / (1.0 + std::abs(closed)), 1e-9) << k.name();
      }
    }
  }
  const double spot[2] = {1.0, 4.0};
  EXPECT_NEAR(kernel_integral(ScalarKernel(KernelId::G21, 0.5), spot, rule), 7.0 / 3.0, 1e-10);
}

TEST(Quadrature, IntegralOnTheDiagonal) {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(64);
  const std::vector<double> x = {3.0, 3.0};
  for (double p : {0.25, 1.0}) {
    const ScalarKernel k(KernelId::G21, p);
    EXPECT_NEAR(k.integral(x, rule), k.eval(x), 1e-12 * k.eval(x));
  }
}

TEST(Quadrature, NoIntegralForm) {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(8);
  const std::vector<double> x = {1.0, 2.0, 3.0};
  EXPECT_FALSE(ScalarKernel(KernelId::F35, 0.5).has_integral_form());
  expect_kind(ErrorKind::NoIntegralForm, [&] { ScalarKernel(KernelId::F35, 0.5).integral(x, rule); });
  expect_kind(ErrorKind::NoIntegralForm,
              [&] { ScalarKernel(KernelId::LIEB, 0.5).integral(std::vector<double>{1.0, 2.0}, rule); });
}

TEST(Kernels, AsFunctionAgreesWithEval) {
  const ScalarKernel k(KernelId::F34, 0.4);
  const MultivariateFunction f = k.as_function();
  EXPECT_EQ(f.arity(), 3);
  const std::vector<double> x = {0.3, 2.0, 5.0};
  EXPECT_EQ(f(x), k.eval(x));
}
