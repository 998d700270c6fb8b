// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "opcvx/funcalc.hpp"
#include "test_util.hpp"

using namespace opcvx;
using opcvx::testing::expect_kind;

namespace {

HermitianMatrix rotate(const CMatrix& q, const RVector& diag) {
  return HermitianMatrix(CMatrix(q * diag.cast<Complex>().asDiagonal() * q.adjoint()));
}

MultivariateFunction product_power(double p) {
  MultivariateFunction f;
  f.name = "s^p t^(1-p)";
  f.domains = {Interval::positive(), Interval::positive()};
  f.fn = [p](std::span<const double> x) { return std::pow(x[0], p) * std::pow(x[1], 1.0 - p); };
  return f;
}

}  // namespace

TEST(MultivariateApply, SumOfDiagonals) {
  RVector a(2), b(2);
  a << 1, 2;
  b << 3, 4;
  const CommutingTuple tuple({HermitianMatrix::diagonal(a), HermitianMatrix::diagonal(b)});
  const HermitianMatrix r = multivariate_apply(make_bivariate("s+t", [](double s, double t) { return s + t; }), tuple);
  EXPECT_NEAR(r(0, 0).real(), 4.0, 1e-14);
  EXPECT_NEAR(r(1, 1).real(), 6.0, 1e-14);
  EXPECT_NEAR(std::abs(r(0, 1)), 0.0, 1e-14);
}

TEST(MultivariateApply, WeightedGeometricMeanOfScalars) {
  const CommutingTuple tuple({4.0 * HermitianMatrix::identity(3), HermitianMatrix::identity(3)});
  const HermitianMatrix r = multivariate_apply(product_power(0.5), tuple);
  EXPECT_LE((r.matrix() - 2.0 * CMatrix::Identity(3, 3)).norm(), 1e-14);
}

TEST(MultivariateApply, SingleVariableMatchesMatrixFunction) {
  Rng rng(21);
  for (int dim : {2, 4, 6}) {
    const HermitianMatrix a = random_pd(dim, -1.0, 1.0, rng);
    MultivariateFunction f;
    f.name = "t^1.5";
    f.domains = {Interval::positive()};
    f.fn = [](std::span<const double> x) { return std::pow(x[0], 1.5); };
    const HermitianMatrix via_tuple = multivariate_apply(f, CommutingTuple({a}));
    const HermitianMatrix direct = matrix_function(functions::power(1.5), a);
    EXPECT_LE((via_tuple.matrix() - direct.matrix()).norm(), 1e-11 * (1.0 + direct.frobenius_norm()));
  }
}

TEST(MultivariateApply, DegenerateSpectraInSharedBasis) {
  // X has a repeated eigenvalue that Y splits; the joint basis must resolve it.
  Rng rng(22);
  const CMatrix q = random_unitary(4, rng);
  RVector x(4), y(4);
  x << 1, 1, 2, 2;
  y << 5, 7, 5, 7;
  const CommutingTuple tuple({rotate(q, x), rotate(q, y)});
  const MultivariateFunction f = make_bivariate("s*t", [](double s, double t) { return s * t; });
  RVector expected(4);
  expected << 5, 7, 10, 14;
  const HermitianMatrix r = multivariate_apply(f, tuple);
  EXPECT_LE((r.matrix() - rotate(q, expected).matrix()).norm(), 1e-10);
}

TEST(MultivariateApply, Errors) {
  RVector a(2);
  a << 1, 2;
  RMatrix off(2, 2);
  off << 0, 1, 1, 0;
  expect_kind(ErrorKind::NotCommuting,
              [&] { CommutingTuple({HermitianMatrix::diagonal(a), HermitianMatrix(off)}); });
  expect_kind(ErrorKind::DimensionMismatch,
              [] { CommutingTuple({HermitianMatrix::identity(2), HermitianMatrix::identity(3)}); });
  const CommutingTuple one({HermitianMatrix::identity(2)});
  expect_kind(ErrorKind::ArityMismatch, [&] { multivariate_apply(product_power(0.5), one); });
  a << -1, 2;
  const CommutingTuple negative({HermitianMatrix::diagonal(a), HermitianMatrix::identity(2)});
  expect_kind(ErrorKind::DomainViolation, [&] { multivariate_apply(product_power(0.5), negative); });
}

TEST(JointDiagonalize, DiagonalizesEveryMember) {
  Rng rng(23);
  for (int dim : {2, 3, 5}) {
    const CMatrix q = random_unitary(dim, rng);
    std::vector<HermitianMatrix> members;
    for (int m = 0; m < 3; ++m) {
      RVector d = random_log_uniform(dim, -1.0, 1.0, rng);
      if (m == 0) d.setConstant(2.0);  // fully degenerate member
      members.push_back(rotate(q, d));
    }
    const JointEigensystem sys = joint_diagonalize(CommutingTuple(members));
    const CMatrix& u = sys.basis;
    EXPECT_LE((u.adjoint() * u - CMatrix::Identity(dim, dim)).norm(), 1e-12);
    for (int m = 0; m < 3; ++m) {
      const CMatrix rebuilt = u * sys.diag_values[static_cast<std::size_t>(m)].cast<Complex>().asDiagonal() * u.adjoint();
      EXPECT_LE((rebuilt - members[static_cast<std::size_t>(m)].matrix()).norm(), 1e-10);
    }
  }
}

TEST(LrApply, IdentityKernelIsIdentity) {
  Rng rng(31);
  const HermitianMatrix a = random_pd(3, -1.0, 1.0, rng);
  const HermitianMatrix b = random_pd(3, -1.0, 1.0, rng);
  const CMatrix h = random_complex(3, rng);
  const CMatrix r = lr_apply(make_bivariate("1", [](double, double) { return 1.0; }), a, b, h);
  EXPECT_LE((r - h).norm(), 1e-13);
}

TEST(LrApply, MultiplicationOperators) {
  // f(s, t) = s gives A H, f(s, t) = t gives H B.
  Rng rng(32);
  const HermitianMatrix a = random_pd(4, -1.0, 1.0, rng);
  const HermitianMatrix b = random_pd(4, -1.0, 1.0, rng);
  const CMatrix h = random_complex(4, rng);
  const CMatrix left = lr_apply(make_bivariate("s", [](double s, double) { return s; }), a, b, h);
  const CMatrix right = lr_apply(make_bivariate("t", [](double, double t) { return t; }), a, b, h);
  EXPECT_LE((left - a.matrix() * h).norm(), 1e-11 * (1.0 + left.norm()));
  EXPECT_LE((right - h * b.matrix()).norm(), 1e-11 * (1.0 + right.norm()));
}

TEST(LrApply, IsLinearInH) {
  Rng rng(33);
  const MultivariateFunction f = product_power(0.3);
  for (int dim : {2, 3, 5}) {
    const HermitianMatrix a = random_pd(dim, -1.0, 1.0, rng);
    const HermitianMatrix b = random_pd(dim, -1.0, 1.0, rng);
    const CMatrix h1 = random_complex(dim, rng);
    const CMatrix h2 = random_complex(dim, rng);
    const Complex alpha(0.7, -1.3);
    const CMatrix lhs = lr_apply(f, a, b, alpha * h1 + h2);
    const CMatrix rhs = alpha * lr_apply(f, a, b, h1) + lr_apply(f, a, b, h2);
    EXPECT_LE((lhs - rhs).norm(), 1e-11 * (1.0 + rhs.norm()));
  }
}

TEST(LrApply, MatchesDenseSuperoperator) {
  Rng rng(34);
  const MultivariateFunction f = product_power(0.6);
  for (int dim : {1, 2, 3, 4}) {
    const HermitianMatrix a = random_pd(dim, -1.0, 1.0, rng);
    const HermitianMatrix b = random_pd(dim, -1.0, 1.0, rng);
    const CMatrix h = random_complex(dim, rng);
    const CMatrix dense = lr_superoperator(f, a, b);
    ASSERT_EQ(dense.rows(), dim * dim);
    const CMatrix via_dense = unvec(dense * vec(h), dim);
    const CMatrix direct = lr_apply(f, a, b, h);
    EXPECT_LE((via_dense - direct).norm(), 1e-10 * (1.0 + direct.norm()));
  }
  expect_kind(ErrorKind::BadParameter, [&] {
    lr_superoperator(f, HermitianMatrix::identity(5), HermitianMatrix::identity(5));
  });
}

TEST(LrTrace, RealForEqualArguments) {
  Rng rng(35);
  const MultivariateFunction f = product_power(0.4);
  for (int dim : {2, 3, 5}) {
    const HermitianMatrix a = random_pd(dim, -1.0, 1.0, rng);
    const CMatrix h = random_complex(dim, rng);
    const Complex t = lr_trace(f, a, a, h);
    EXPECT_LE(std::abs(t.imag()), 1e-12 * (1.0 + std::abs(t.real())));
    EXPECT_NEAR(t.real(), trace_form(f, a, a, h), 1e-11 * (1.0 + std::abs(t.real())));
    EXPECT_GT(t.real(), 0.0);  // positive kernel
  }
}

TEST(VecUnvec, ColumnMajorRoundTrip) {
  CMatrix m(2, 2);
  m << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0);
  const Eigen::VectorXcd v = vec(m);
  EXPECT_EQ(v(1), Complex(3, 0));
  EXPECT_EQ(v(2), Complex(2, 0));
  EXPECT_TRUE((unvec(v, 2).array() == m.array()).all());
}
