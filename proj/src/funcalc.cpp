// SPDX-License-Identifier: Apache-2.0
#include "opcvx/funcalc.hpp"

#include <sstream>

#include "opcvx/errors.hpp"

namespace opcvx {

namespace {

constexpr double kCommutatorTolerance = 1e-10;
constexpr double kClusterGap = 1e-8;
constexpr double kJointResidualTolerance = 1e-9;
constexpr int kMaxSuperoperatorDim = 4;

// Consecutive runs of ascending values closer than `gap`.
std::vector<std::pair<int, int>> clusters(const RVector& values, double gap) {
  std::vector<std::pair<int, int>> runs;
  int start = 0;
  for (int i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values(i) - values(i - 1) >= gap) {
      runs.emplace_back(start, i);
      start = i;
    }
  }
  return runs;
}

CMatrix restricted(const CMatrix& v, const CMatrix& x) {
  const CMatrix r = v.adjoint() * x * v;
  return (r + r.adjoint()) * 0.5;
}

// Splits the invariant subspace spanned by v using members first..k-1.
CMatrix split_cluster(const std::vector<const CMatrix*>& members, const CMatrix& v, std::size_t first) {
  if (v.cols() == 1 || first == members.size()) return v;
  const CMatrix& x = *members[first];
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(restricted(v, x));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonConvergence, "eigensolver failed inside a degenerate cluster");
  }
  const CMatrix rotated = v * solver.eigenvectors();
  const double gap = kClusterGap * (1.0 + x.norm());
  CMatrix out(v.rows(), v.cols());
  for (auto [lo, hi] : clusters(solver.eigenvalues(), gap)) {
    out.middleCols(lo, hi - lo) = split_cluster(members, rotated.middleCols(lo, hi - lo), first + 1);
  }
  return out;
}

void require_domains(const MultivariateFunction& f, const std::vector<RVector>& values) {
  for (int m = 0; m < f.arity(); ++m) {
    const RVector& column = values[static_cast<std::size_t>(m)];
    for (int j = 0; j < column.size(); ++j) {
      if (!f.domains[static_cast<std::size_t>(m)].contains(column(j))) {
        std::ostringstream os;
        os << "argument " << m << " value " << column(j) << " outside the domain "
           << f.domains[static_cast<std::size_t>(m)].describe() << " of " << f.name;
        throw Error(ErrorKind::DomainViolation, os.str());
      }
    }
  }
}

void require_bivariate(const MultivariateFunction& f) {
  if (f.arity() != 2) {
    throw Error(ErrorKind::ArityMismatch, f.name + " is not a function of two variables");
  }
}

// F(i, j) = f(lambda_i, mu_j) with domain checks.
RMatrix kernel_matrix(const MultivariateFunction& f, const RVector& lambda, const RVector& mu) {
  require_bivariate(f);
  require_domains(f, {lambda, mu});
  RMatrix values(lambda.size(), mu.size());
  for (int j = 0; j < mu.size(); ++j) {
    for (int i = 0; i < lambda.size(); ++i) values(i, j) = f(lambda(i), mu(j));
  }
  return values;
}

}  // namespace

MultivariateFunction make_bivariate(std::string name, std::function<double(double, double)> f, Interval domain) {
  return {std::move(name), {domain, domain},
          [f = std::move(f)](std::span<const double> args) { return f(args[0], args[1]); }};
}

CommutingTuple::CommutingTuple(std::vector<HermitianMatrix> members) : members_(std::move(members)) {
  if (members_.empty()) throw Error(ErrorKind::ArityMismatch, "a commuting tuple needs at least one member");
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].dim() != members_[0].dim()) {
      throw Error(ErrorKind::DimensionMismatch, "tuple members differ in dimension");
    }
    for (std::size_t j = i + 1; j < members_.size(); ++j) {
      const CMatrix& x = members_[i].matrix();
      const CMatrix& y = members_[j].matrix();
      const double residual = (x * y - y * x).norm();
      if (residual > kCommutatorTolerance * (1.0 + x.norm() * y.norm())) {
        std::ostringstream os;
        os << "members " << i << " and " << j << " have commutator norm " << residual;
        throw Error(ErrorKind::NotCommuting, os.str());
      }
    }
  }
}

JointEigensystem joint_diagonalize(const CommutingTuple& tuple, std::uint64_t seed) {
  const int n = tuple.dim();
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(tuple.arity())));
  std::uniform_real_distribution<double> coefficient(0.5, 1.5);

  std::vector<const CMatrix*> members;
  CMatrix combination = CMatrix::Zero(n, n);
  for (const auto& x : tuple.members()) {
    members.push_back(&x.matrix());
    // Normalize so that no member dominates the combination.
    combination += coefficient(rng) / (1.0 + x.frobenius_norm()) * x.matrix();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(combination);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonConvergence, "eigensolver failed on the tuple combination");
  }
  const CMatrix& u = solver.eigenvectors();
  const double gap = kClusterGap * (1.0 + combination.norm());
  CMatrix basis(n, n);
  for (auto [lo, hi] : clusters(solver.eigenvalues(), gap)) {
    basis.middleCols(lo, hi - lo) =
        hi - lo == 1 ? CMatrix(u.middleCols(lo, 1)) : split_cluster(members, u.middleCols(lo, hi - lo), 0);
  }

  JointEigensystem system{basis, {}};
  for (std::size_t m = 0; m < members.size(); ++m) {
    const CMatrix& x = *members[m];
    RVector values = (basis.adjoint() * x * basis).diagonal().real();
    const double residual =
        (basis * values.cast<Complex>().asDiagonal() * basis.adjoint() - x).norm();
    if (residual > kJointResidualTolerance * (1.0 + x.norm())) {
      std::ostringstream os;
      os << "member " << m << " is not diagonal in the joint basis (residual " << residual << ")";
      throw Error(ErrorKind::NotCommuting, os.str());
    }
    system.diag_values.push_back(std::move(values));
  }
  return system;
}

HermitianMatrix multivariate_apply(const MultivariateFunction& f, const JointEigensystem& system) {
  if (f.arity() != system.arity()) {
    std::ostringstream os;
    os << f.name << " takes " << f.arity() << " arguments, tuple has " << system.arity();
    throw Error(ErrorKind::ArityMismatch, os.str());
  }
  require_domains(f, system.diag_values);
  const int k = system.arity();
  std::vector<double> args(static_cast<std::size_t>(k));
  RVector values(system.dim());
  for (int j = 0; j < system.dim(); ++j) {
    for (int m = 0; m < k; ++m) args[static_cast<std::size_t>(m)] = system.diag_values[static_cast<std::size_t>(m)](j);
    values(j) = f(args);
  }
  return HermitianMatrix::from_spectrum(values, system.basis);
}

HermitianMatrix multivariate_apply(const MultivariateFunction& f, const CommutingTuple& tuple) {
  if (f.arity() != tuple.arity()) {
    std::ostringstream os;
    os << f.name << " takes " << f.arity() << " arguments, tuple has " << tuple.arity();
    throw Error(ErrorKind::ArityMismatch, os.str());
  }
  return multivariate_apply(f, joint_diagonalize(tuple));
}

CMatrix lr_apply(const MultivariateFunction& f, const SpectralDecomposition& a, const SpectralDecomposition& b,
                 const CMatrix& h) {
  if (a.dim() != b.dim() || h.rows() != a.dim() || h.cols() != a.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "lr_apply operands differ in dimension");
  }
  const RMatrix kernel = kernel_matrix(f, a.eigenvalues, b.eigenvalues);
  const CMatrix& u = a.eigenvectors;
  const CMatrix& v = b.eigenvectors;
  const CMatrix inner = (u.adjoint() * h * v).cwiseProduct(kernel.cast<Complex>());
  return u * inner * v.adjoint();
}

CMatrix lr_apply(const MultivariateFunction& f, const HermitianMatrix& a, const HermitianMatrix& b,
                 const CMatrix& h) {
  return lr_apply(f, spectral_decompose(a), spectral_decompose(b), h);
}

Complex lr_trace(const MultivariateFunction& f, const HermitianMatrix& a, const HermitianMatrix& b,
                 const CMatrix& h) {
  return (h.adjoint() * lr_apply(f, a, b, h)).trace();
}

double trace_form(const MultivariateFunction& f, const SpectralDecomposition& a, const SpectralDecomposition& b,
                  const CMatrix& h) {
  if (a.dim() != b.dim() || h.rows() != a.dim() || h.cols() != a.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "trace_form operands differ in dimension");
  }
  // Tr(H* U (K o U*HV) V*) = sum_ij |(U*HV)_ij|^2 K_ij.
  const RMatrix kernel = kernel_matrix(f, a.eigenvalues, b.eigenvalues);
  const CMatrix inner = a.eigenvectors.adjoint() * h * b.eigenvectors;
  return inner.cwiseAbs2().cwiseProduct(kernel).sum();
}

double trace_form(const MultivariateFunction& f, const HermitianMatrix& a, const HermitianMatrix& b,
                  const CMatrix& h) {
  return trace_form(f, spectral_decompose(a), spectral_decompose(b), h);
}

Eigen::VectorXcd vec(const CMatrix& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

CMatrix unvec(const Eigen::VectorXcd& v, int dim) { return Eigen::Map<const CMatrix>(v.data(), dim, dim); }

CMatrix lr_superoperator(const MultivariateFunction& f, const HermitianMatrix& a, const HermitianMatrix& b) {
  require_bivariate(f);
  const int n = a.dim();
  if (b.dim() != n) throw Error(ErrorKind::DimensionMismatch, "lr_superoperator operands differ in dimension");
  if (n > kMaxSuperoperatorDim) {
    throw Error(ErrorKind::BadParameter, "dense superoperator export is limited to dimension 4");
  }
  // vec(AH) = (I kron A) vec(H), vec(HB) = (B^T kron I) vec(H); the two commute.
  const CMatrix identity = CMatrix::Identity(n, n);
  CMatrix left = CMatrix::Zero(n * n, n * n);
  CMatrix right = CMatrix::Zero(n * n, n * n);
  const CMatrix bt = b.matrix().transpose();
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      left.block(p * n, q * n, n, n) = identity(p, q) * a.matrix();
      right.block(p * n, q * n, n, n) = bt(p, q) * identity;
    }
  }
  const CommutingTuple pair({HermitianMatrix(left), HermitianMatrix(right)});
  return multivariate_apply(f, pair).matrix();
}

}  // namespace opcvx
