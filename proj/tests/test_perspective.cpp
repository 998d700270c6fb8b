// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "opcvx/perspective.hpp"
#include "test_util.hpp"

using namespace opcvx;
using opcvx::testing::expect_kind;

namespace {

OperatorMap power_map(double p) {
  OperatorMap f;
  f.name = "A^p";
  f.arity = 1;
  f.fn = [p](std::span<const HermitianMatrix> x) { return matrix_function(functions::power(p), x[0]); };
  return f;
}

HermitianMatrix conj(const CMatrix& q, const HermitianMatrix& a) {
  return HermitianMatrix(CMatrix(q * a.matrix() * q.adjoint()));
}

const QuadratureRule& rule() {
  static const QuadratureRule r = QuadratureRule::gauss_legendre(64);
  return r;
}

}  // namespace

TEST(Perspective, ScalarValue) {
  const std::vector<HermitianMatrix> as = {HermitianMatrix::scalar(8.0)};
  // b (a / b)^p = 2 * 4^0.5
  EXPECT_NEAR(perspective_apply(power_map(0.5), as, HermitianMatrix::scalar(2.0))(0, 0).real(), 4.0, 1e-14);
}

TEST(Perspective, IdentityBLeavesMapUnchanged) {
  Rng rng(61);
  const std::vector<HermitianMatrix> as = {random_pd(3, -1.0, 1.0, rng)};
  const HermitianMatrix direct = power_map(0.3)(as);
  const HermitianMatrix persp = perspective_apply(power_map(0.3), as, HermitianMatrix::identity(3));
  EXPECT_LE((direct.matrix() - persp.matrix()).norm(), 1e-12);
}

TEST(Perspective, OfMapHasExtraInput) {
  const OperatorMap p = perspective_of(power_map(0.5));
  EXPECT_EQ(p.arity, 2);
  const std::vector<HermitianMatrix> in = {HermitianMatrix::scalar(9.0), HermitianMatrix::scalar(1.0)};
  EXPECT_NEAR(p(in)(0, 0).real(), 3.0, 1e-14);
  const std::vector<HermitianMatrix> one = {HermitianMatrix::scalar(9.0)};
  expect_kind(ErrorKind::ArityMismatch, [&] { p(one); });
}

TEST(Perspective, RequiresPositiveDefiniteB) {
  const std::vector<HermitianMatrix> as = {HermitianMatrix::identity(2)};
  expect_kind(ErrorKind::DomainViolation,
              [&] { perspective_apply(power_map(0.5), as, -1.0 * HermitianMatrix::identity(2)); });
}

TEST(F1Map, Endpoints) {
  Rng rng(62);
  const HermitianMatrix a = random_pd(3, -1.0, 1.0, rng);
  EXPECT_LE((f1_map(a, 1.0, 0.4).matrix() - a.matrix()).norm(), 1e-11 * a.frobenius_norm());
  EXPECT_LE((f1_map(a, 0.0, 0.4).matrix() - CMatrix::Identity(3, 3)).norm(), 1e-13);
  // p = 1 gives the affine mix
  const HermitianMatrix mixed = f1_map(a, 0.25, 1.0);
  EXPECT_LE((mixed.matrix() - (0.25 * a + 0.75 * HermitianMatrix::identity(3)).matrix()).norm(), 1e-12);
}

TEST(F2Map, EqualScalarArguments) {
  // At (tI, tI) every F1 term equals tI, so F2 = (1/p) t^{1-p} I.
  for (double p : {0.25, 0.5, 1.0}) {
    for (double t : {0.5, 2.0, 10.0}) {
      const HermitianMatrix a = t * HermitianMatrix::identity(2);
      const HermitianMatrix r = f2_map(a, a, p, rule());
      const double expected = std::pow(t, 1.0 - p) / p;
      EXPECT_LE((r.matrix() - expected * CMatrix::Identity(2, 2)).norm(), 1e-12 * expected) << p << " " << t;
    }
  }
}

TEST(Pf2, EqualScalarArgumentsWithIdentityC) {
  const double t = 3.0;
  const double p = 0.5;
  const HermitianMatrix a = t * HermitianMatrix::identity(3);
  const HermitianMatrix r = pf2_apply(a, a, HermitianMatrix::identity(3), p, rule());
  EXPECT_LE((r.matrix() - (std::pow(t, 1.0 - p) / p) * CMatrix::Identity(3, 3)).norm(), 1e-12);
}

TEST(Pf2, SpotValue) {
  const HermitianMatrix r =
      pf2_apply(HermitianMatrix::scalar(4.0), HermitianMatrix::scalar(1.0), HermitianMatrix::scalar(1.0), 0.5, rule());
  EXPECT_NEAR(r(0, 0).real(), 3.0, 1e-10);
}

TEST(Pf2, ScalarRestrictionIsF35) {
  Rng rng(63);
  for (double p : {0.25, 0.5, 0.75, 1.0}) {
    const ScalarKernel k(KernelId::F35, p);
    for (int s = 0; s < 30; ++s) {
      const RVector x = random_log_uniform(3, -1.0, 1.0, rng);
      const double nested = pf2_apply(HermitianMatrix::scalar(x(0)), HermitianMatrix::scalar(x(1)),
                                      HermitianMatrix::scalar(x(2)), p, rule())(0, 0)
                                .real();
      const double closed = k.eval(std::vector<double>{x(0), x(1), x(2)});
      EXPECT_LE(std::abs(nested - closed) / (1.0 + closed), 1e-8);
    }
  }
}

TEST(Pf2, IdentityCMatchesF2) {
  Rng rng(64);
  const HermitianMatrix a = random_pd(3, -1.0, 1.0, rng);
  const HermitianMatrix b = random_pd(3, -1.0, 1.0, rng);
  const HermitianMatrix lhs = pf2_apply(a, b, HermitianMatrix::identity(3), 0.6, rule());
  const HermitianMatrix rhs = f2_map(a, b, 0.6, rule());
  EXPECT_LE((lhs.matrix() - rhs.matrix()).norm(), 1e-11 * (1.0 + rhs.frobenius_norm()));
}

TEST(Pf2, HomogeneousOfDegreeOne) {
  Rng rng(65);
  for (int dim : {2, 3}) {
    const HermitianMatrix a = random_pd(dim, -1.0, 1.0, rng);
    const HermitianMatrix b = random_pd(dim, -1.0, 1.0, rng);
    const HermitianMatrix c = random_pd(dim, -1.0, 1.0, rng);
    const double s = 4.5;
    const HermitianMatrix base = pf2_apply(a, b, c, 0.5, rule());
    const HermitianMatrix scaled = pf2_apply(s * a, s * b, s * c, 0.5, rule());
    EXPECT_LE((scaled.matrix() - s * base.matrix()).norm(), 1e-10 * (1.0 + scaled.frobenius_norm()));
  }
}

TEST(Pf2, UnitaryCovariance) {
  Rng rng(66);
  const HermitianMatrix a = random_pd(3, -1.0, 1.0, rng);
  const HermitianMatrix b = random_pd(3, -1.0, 1.0, rng);
  const HermitianMatrix c = random_pd(3, -1.0, 1.0, rng);
  const CMatrix q = random_unitary(3, rng);
  const HermitianMatrix base = pf2_apply(a, b, c, 0.3, rule());
  const HermitianMatrix rotated = pf2_apply(conj(q, a), conj(q, b), conj(q, c), 0.3, rule());
  EXPECT_LE((rotated.matrix() - conj(q, base).matrix()).norm(), 1e-10 * (1.0 + base.frobenius_norm()));
}

TEST(Pf2, Errors) {
  const HermitianMatrix i2 = HermitianMatrix::identity(2);
  expect_kind(ErrorKind::BadParameter, [&] { pf2_apply(i2, i2, i2, 0.0, rule()); });
  expect_kind(ErrorKind::BadParameter, [&] { pf2_apply(i2, i2, i2, 1.5, rule()); });
  expect_kind(ErrorKind::DomainViolation, [&] { pf2_apply(i2, i2, -1.0 * i2, 0.5, rule()); });
  expect_kind(ErrorKind::DimensionMismatch,
              [&] { pf2_apply(i2, HermitianMatrix::identity(3), i2, 0.5, rule()); });
}
