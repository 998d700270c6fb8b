// SPDX-License-Identifier: Apache-2.0
#include "opcvx/perspective.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "opcvx/errors.hpp"

namespace opcvx {

namespace {

void require_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "p must lie in (0, 1], got " << p;
    throw Error(ErrorKind::BadParameter, os.str());
  }
}

void require_same_dim(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "operands differ in dimension");
}

// (lambda t^p + 1 - lambda)^{1/p}
double f1_scalar(double t, double lambda, double p) {
  return std::pow(lambda * std::pow(t, p) + (1.0 - lambda), 1.0 / p);
}

}  // namespace

HermitianMatrix perspective_apply(const OperatorMap& f, std::span<const HermitianMatrix> as,
                                  const HermitianMatrix& b) {
  const HalfPowers half(b);
  std::vector<HermitianMatrix> inner;
  inner.reserve(as.size());
  for (const auto& a : as) {
    const SpectralDecomposition d = spectral_decompose(a);
    require_positive_definite(d, "perspective argument");
    inner.push_back(half.apply(a, HalfPower::Negative));
  }
  return half.apply(f(inner), HalfPower::Positive);
}

OperatorMap perspective_of(OperatorMap f) {
  OperatorMap out;
  out.name = "P[" + f.name + "]";
  out.arity = f.arity + 1;
  out.sense = f.sense;
  out.fn = [f = std::move(f)](std::span<const HermitianMatrix> inputs) {
    return perspective_apply(f, inputs.first(inputs.size() - 1), inputs.back());
  };
  return out;
}

HermitianMatrix f1_map(const HermitianMatrix& a, double lambda, double p) {
  require_p(p);
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorKind::BadParameter, "lambda must lie in [0, 1]");
  const SpectralDecomposition d = spectral_decompose(a);
  require_positive_definite(d, "F1 argument");
  const ScalarFunction f{"F1", [lambda, p](double t) { return f1_scalar(t, lambda, p); }, Interval::positive()};
  return matrix_function(f, d);
}

namespace {

// Operands from the outer congruence in pf2_apply are positive definite by
// construction; they are only required to keep a positive computed spectrum.
HermitianMatrix f2_core(const HermitianMatrix& a, const HermitianMatrix& b, double p, const QuadratureRule& rule,
                        PositivityCheck check) {
  const HalfPowers half(b, check);
  // F1 acts on M = B^{-1/2} A B^{-1/2}; its spectrum is shared by every node.
  const SpectralDecomposition m = spectral_decompose(half.apply(a, HalfPower::Negative));
  require_positive_spectrum(m, "B^{-1/2} A B^{-1/2}");
  const ScalarFunction outer_power = functions::power(1.0 - p);

  const int n = a.dim();
  CMatrix sum = CMatrix::Zero(n, n);
  for (int node = 0; node < rule.size(); ++node) {
    const double lambda = rule.nodes()[static_cast<std::size_t>(node)];
    RVector values(n);
    for (int i = 0; i < n; ++i) values(i) = f1_scalar(m.eigenvalues(i), lambda, p);
    const HermitianMatrix perspective =
        half.apply(HermitianMatrix::from_spectrum(values, m.eigenvectors), HalfPower::Positive);
    const SpectralDecomposition pd = spectral_decompose(perspective);
    require_positive_spectrum(pd, "P_F1(A, B)");
    sum += rule.weights()[static_cast<std::size_t>(node)] * matrix_function(outer_power, pd).matrix();
  }
  return HermitianMatrix::hermitian_part(sum / p);
}

}  // namespace

HermitianMatrix f2_map(const HermitianMatrix& a, const HermitianMatrix& b, double p, const QuadratureRule& rule) {
  require_p(p);
  require_same_dim(a, b);
  require_positive_definite(spectral_decompose(a), "F2 argument A");
  return f2_core(a, b, p, rule, PositivityCheck::Threshold);
}

HermitianMatrix pf2_apply(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c, double p,
                          const QuadratureRule& rule) {
  require_p(p);
  require_same_dim(a, b);
  require_same_dim(a, c);
  require_positive_definite(spectral_decompose(a), "PF2 argument A");
  require_positive_definite(spectral_decompose(b), "PF2 argument B");
  const HalfPowers half(c);
  const HermitianMatrix inner = f2_core(half.apply(a, HalfPower::Negative), half.apply(b, HalfPower::Negative), p,
                                        rule, PositivityCheck::Strict);
  return half.apply(inner, HalfPower::Positive);
}

}  // namespace opcvx
