// SPDX-License-Identifier: Apache-2.0
#include "opcvx/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "opcvx/errors.hpp"

namespace opcvx {

namespace {

constexpr double kSingularThreshold = 1e-14;

void require_operands(const SpectralDecomposition& a, const CMatrix& h) {
  if (h.rows() != a.dim() || h.cols() != a.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "direction H and A differ in dimension");
  }
  require_positive_definite(a, "A");
}

}  // namespace

PowerFunction::PowerFunction(double exponent) : exponent_(exponent) {
  if (!std::isfinite(exponent)) throw Error(ErrorKind::BadParameter, "power exponent must be finite");
}

double PowerFunction::value(double t) const { return std::pow(t, exponent_); }

double PowerFunction::derivative(double t) const { return exponent_ * std::pow(t, exponent_ - 1.0); }

ScalarFunction PowerFunction::as_scalar_function() const {
  std::ostringstream name;
  name << "t^" << exponent_;
  const double p = exponent_;
  return {name.str(), [p](double t) { return std::pow(t, p); }, Interval::positive()};
}

double divided_difference(const PowerFunction& f, double s, double t) {
  if (!(s > 0.0) || !(t > 0.0)) {
    std::ostringstream os;
    os << "divided difference of " << f.as_scalar_function().name << " needs positive arguments, got (" << s
       << ", " << t << ")";
    throw Error(ErrorKind::DomainViolation, os.str());
  }
  if (s > t) std::swap(s, t);
  if (t - s <= kDiagonalSwitch * std::max(t, 1.0)) return f.derivative(0.5 * (s + t));
  // (t^a - s^a) / (t - s) = s^(a-1) expm1(a log1p(r)) / r with r = (t - s) / s.
  const double r = (t - s) / s;
  const double a = f.exponent();
  return std::pow(s, a - 1.0) * std::expm1(a * std::log1p(r)) / r;
}

LoewnerMatrix loewner_matrix(const PowerFunction& f, const RVector& eigenvalues) {
  const auto n = eigenvalues.size();
  RMatrix values(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    values(i, i) = divided_difference(f, eigenvalues(i), eigenvalues(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      values(i, j) = divided_difference(f, eigenvalues(i), eigenvalues(j));
      values(j, i) = values(i, j);
    }
  }
  return {values};
}

CMatrix frechet_apply(const PowerFunction& f, const SpectralDecomposition& a, const CMatrix& h) {
  require_operands(a, h);
  const LoewnerMatrix l = loewner_matrix(f, a.eigenvalues);
  const CMatrix& u = a.eigenvectors;
  return u * (u.adjoint() * h * u).cwiseProduct(l.values.cast<Complex>()) * u.adjoint();
}

CMatrix frechet_apply(const PowerFunction& f, const HermitianMatrix& a, const CMatrix& h) {
  return frechet_apply(f, spectral_decompose(a), h);
}

namespace {

RMatrix inverse_loewner(const PowerFunction& f, const RVector& eigenvalues) {
  const LoewnerMatrix l = loewner_matrix(f, eigenvalues);
  const double floor = kSingularThreshold * l.max_abs();
  if (!(l.max_abs() > 0.0) || (l.values.cwiseAbs().array() < floor).any()) {
    throw Error(ErrorKind::SingularDifferential,
                "Loewner matrix of " + f.as_scalar_function().name + " has a (near) zero entry");
  }
  return l.values.cwiseInverse();
}

}  // namespace

CMatrix frechet_inverse_apply(const PowerFunction& f, const SpectralDecomposition& a, const CMatrix& h) {
  require_operands(a, h);
  const RMatrix inverse = inverse_loewner(f, a.eigenvalues);
  const CMatrix& u = a.eigenvectors;
  return u * (u.adjoint() * h * u).cwiseProduct(inverse.cast<Complex>()) * u.adjoint();
}

CMatrix frechet_inverse_apply(const PowerFunction& f, const HermitianMatrix& a, const CMatrix& h) {
  return frechet_inverse_apply(f, spectral_decompose(a), h);
}

double frechet_trace_form(const PowerFunction& f, const SpectralDecomposition& a, const CMatrix& h) {
  require_operands(a, h);
  const LoewnerMatrix l = loewner_matrix(f, a.eigenvalues);
  const CMatrix rotated = a.eigenvectors.adjoint() * h * a.eigenvectors;
  return rotated.cwiseAbs2().cwiseProduct(l.values).sum();
}

double frechet_trace_form(const PowerFunction& f, const HermitianMatrix& a, const CMatrix& h) {
  return frechet_trace_form(f, spectral_decompose(a), h);
}

double frechet_inverse_trace_form(const PowerFunction& f, const SpectralDecomposition& a, const CMatrix& h) {
  require_operands(a, h);
  const RMatrix inverse = inverse_loewner(f, a.eigenvalues);
  const CMatrix rotated = a.eigenvectors.adjoint() * h * a.eigenvectors;
  return rotated.cwiseAbs2().cwiseProduct(inverse).sum();
}

double frechet_inverse_trace_form(const PowerFunction& f, const HermitianMatrix& a, const CMatrix& h) {
  return frechet_inverse_trace_form(f, spectral_decompose(a), h);
}

}  // namespace opcvx
