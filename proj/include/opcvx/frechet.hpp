// SPDX-License-Identifier: Apache-2.0
#pragma once

// Divided differences, Loewner matrices and the Frechet differential of
// power functions on positive definite matrices.

#include "opcvx/matcore.hpp"

namespace opcvx {

/// Relative gap below which a divided difference falls back to the midpoint derivative.
inline constexpr double kDiagonalSwitch = 1e-7;

/// t -> t^exponent on (0, inf).
class PowerFunction {
 public:
  explicit PowerFunction(double exponent);

  double exponent() const { return exponent_; }
  double value(double t) const;
  double derivative(double t) const;
  ScalarFunction as_scalar_function() const;

 private:
  double exponent_;
};

/// f[s, t] = (f(t) - f(s)) / (t - s), or f'((s + t) / 2) when |t - s| <= 1e-7 max(s, t, 1).
double divided_difference(const PowerFunction& f, double s, double t);

/// Symmetric matrix of divided differences f[lambda_i, lambda_j].
struct LoewnerMatrix {
  RMatrix values;

  int dim() const { return static_cast<int>(values.rows()); }
  double max_abs() const { return values.cwiseAbs().maxCoeff(); }
};

LoewnerMatrix loewner_matrix(const PowerFunction& f, const RVector& eigenvalues);

/// Df(A)(H) = U ((U* H U) o L_f) U*.
CMatrix frechet_apply(const PowerFunction& f, const HermitianMatrix& a, const CMatrix& h);
CMatrix frechet_apply(const PowerFunction& f, const SpectralDecomposition& a, const CMatrix& h);

/// Df(A)^{-1}(H) = U ((U* H U) / L_f) U*. Throws SingularDifferential when some
/// |L_f entry| < 1e-14 max |L_f|.
CMatrix frechet_inverse_apply(const PowerFunction& f, const HermitianMatrix& a, const CMatrix& h);
CMatrix frechet_inverse_apply(const PowerFunction& f, const SpectralDecomposition& a, const CMatrix& h);

/// Re Tr(H* Df(A)(H)) = sum_ij |(U* H U)_ij|^2 L_f[i][j].
double frechet_trace_form(const PowerFunction& f, const HermitianMatrix& a, const CMatrix& h);
double frechet_trace_form(const PowerFunction& f, const SpectralDecomposition& a, const CMatrix& h);

/// Re Tr(H* Df(A)^{-1}(H)).
double frechet_inverse_trace_form(const PowerFunction& f, const HermitianMatrix& a, const CMatrix& h);
double frechet_inverse_trace_form(const PowerFunction& f, const SpectralDecomposition& a, const CMatrix& h);

}  // namespace opcvx
