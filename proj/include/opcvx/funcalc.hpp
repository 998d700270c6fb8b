// SPDX-License-Identifier: Apache-2.0
#pragma once

// Functional calculus for commuting tuples and for the left/right
// multiplication pair (L_A, R_B) acting on matrix space.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "opcvx/matcore.hpp"

namespace opcvx {

/// A real function of k real variables with one domain interval per variable.
struct MultivariateFunction {
  std::string name;
  std::vector<Interval> domains;
  std::function<double(std::span<const double>)> fn;

  int arity() const { return static_cast<int>(domains.size()); }
  double operator()(std::span<const double> args) const { return fn(args); }
  double operator()(double s, double t) const {
    const double args[2] = {s, t};
    return fn(args);
  }
};

MultivariateFunction make_bivariate(std::string name, std::function<double(double, double)> f,
                                    Interval domain = Interval::real_line());

/// Hermitian matrices of equal dimension with pairwise small commutators.
class CommutingTuple {
 public:
  /// Throws NotCommuting if some ||X_i X_j - X_j X_i||_F > 1e-10 (1 + ||X_i||_F ||X_j||_F).
  explicit CommutingTuple(std::vector<HermitianMatrix> members);

  int arity() const { return static_cast<int>(members_.size()); }
  int dim() const { return members_.front().dim(); }
  const HermitianMatrix& operator[](int m) const { return members_[static_cast<std::size_t>(m)]; }
  const std::vector<HermitianMatrix>& members() const { return members_; }

 private:
  std::vector<HermitianMatrix> members_;
};

struct JointEigensystem {
  CMatrix basis;                    // unitary, one joint eigenvector per column
  std::vector<RVector> diag_values; // diag_values[m](j) = u_j* X_m u_j

  int arity() const { return static_cast<int>(diag_values.size()); }
  int dim() const { return static_cast<int>(basis.cols()); }
};

/// Diagonalizes a seeded random combination of the members, then splits any
/// degenerate cluster by diagonalizing the members one at a time on it.
JointEigensystem joint_diagonalize(const CommutingTuple& tuple, std::uint64_t seed = 0x5eed);

/// f(X_1, ..., X_k) = sum_j f(lambda_j(1), ..., lambda_j(k)) u_j u_j*.
HermitianMatrix multivariate_apply(const MultivariateFunction& f, const CommutingTuple& tuple);
HermitianMatrix multivariate_apply(const MultivariateFunction& f, const JointEigensystem& system);

/// Action of f(L_A, R_B) on H: sum_{i,j} f(lambda_i, mu_j) P_i H Q_j.
CMatrix lr_apply(const MultivariateFunction& f, const HermitianMatrix& a, const HermitianMatrix& b,
                 const CMatrix& h);
CMatrix lr_apply(const MultivariateFunction& f, const SpectralDecomposition& a, const SpectralDecomposition& b,
                 const CMatrix& h);

/// Tr(H* f(L_A, R_B) H) as a complex number; the imaginary part is roundoff for real f and A = B.
Complex lr_trace(const MultivariateFunction& f, const HermitianMatrix& a, const HermitianMatrix& b,
                 const CMatrix& h);

/// Re Tr(H* f(L_A, R_B) H).
double trace_form(const MultivariateFunction& f, const HermitianMatrix& a, const HermitianMatrix& b,
                  const CMatrix& h);
double trace_form(const MultivariateFunction& f, const SpectralDecomposition& a, const SpectralDecomposition& b,
                  const CMatrix& h);

/// Dense n^2 x n^2 matrix of f(L_A, R_B) on column-major vec(H). Debug export, n <= 4.
CMatrix lr_superoperator(const MultivariateFunction& f, const HermitianMatrix& a, const HermitianMatrix& b);

/// Column-major vec and its inverse.
Eigen::VectorXcd vec(const CMatrix& m);
CMatrix unvec(const Eigen::VectorXcd& v, int dim);

}  // namespace opcvx
