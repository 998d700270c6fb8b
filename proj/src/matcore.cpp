// SPDX-License-Identifier: Apache-2.0
#include "opcvx/matcore.hpp"

#include <cmath>
#include <sstream>

#include "opcvx/errors.hpp"

namespace opcvx {

namespace {

CMatrix symmetrized(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

void require_square(const CMatrix& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << "expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

void require_same_dim(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "dimensions " << a.dim() << " and " << b.dim() << " differ";
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

}  // namespace

HermitianMatrix::HermitianMatrix(const CMatrix& entries) {
  require_square(entries);
  if (!entries.allFinite()) throw Error(ErrorKind::BadInput, "matrix has non-finite entries");
  const double asymmetry = (entries - entries.adjoint()).norm();
  if (asymmetry > kHermitianTolerance * (1.0 + entries.norm())) {
    std::ostringstream os;
    os << "||A - A*||_F = " << asymmetry << " exceeds tolerance";
    throw Error(ErrorKind::NotHermitian, os.str());
  }
  m_ = symmetrized(entries);
}

HermitianMatrix::HermitianMatrix(const RMatrix& entries) : HermitianMatrix(CMatrix(entries.cast<Complex>())) {}

HermitianMatrix HermitianMatrix::identity(int dim) {
  if (dim < 1) throw Error(ErrorKind::BadParameter, "dimension must be at least 1");
  return HermitianMatrix(Exact{}, CMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(const RVector& values) {
  if (values.size() < 1) throw Error(ErrorKind::BadParameter, "dimension must be at least 1");
  return HermitianMatrix(Exact{}, values.cast<Complex>().asDiagonal().toDenseMatrix());
}

HermitianMatrix HermitianMatrix::hermitian_part(const CMatrix& m) {
  require_square(m);
  if (!m.allFinite()) throw Error(ErrorKind::BadInput, "matrix has non-finite entries");
  return HermitianMatrix(Exact{}, symmetrized(m));
}

HermitianMatrix HermitianMatrix::from_spectrum(const RVector& values, const CMatrix& basis) {
  const CMatrix m = basis * values.cast<Complex>().asDiagonal() * basis.adjoint();
  return HermitianMatrix(Exact{}, symmetrized(m));
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
  require_same_dim(*this, other);
  return HermitianMatrix(Exact{}, m_ + other.m_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
  require_same_dim(*this, other);
  return HermitianMatrix(Exact{}, m_ - other.m_);
}

HermitianMatrix mix(double lambda, const HermitianMatrix& x, const HermitianMatrix& y) {
  return lambda * x + (1.0 - lambda) * y;
}

double SpectralDecomposition::operator_norm() const {
  return std::max(std::abs(min_eigenvalue()), std::abs(max_eigenvalue()));
}

SpectralDecomposition spectral_decompose(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonConvergence, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RVector eigenvalues(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonConvergence, "Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues();
}

double operator_norm(const HermitianMatrix& a) {
  const RVector ev = eigenvalues(a);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

bool Interval::contains(double x) const {
  if (std::isnan(x)) return false;
  const bool above = lo_closed ? x >= lo : x > lo;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

std::string Interval::describe() const {
  std::ostringstream os;
  os << (lo_closed ? '[' : '(') << lo << ", " << hi << (hi_closed ? ']' : ')');
  return os.str();
}

namespace functions {

ScalarFunction power(double p) {
  if (!std::isfinite(p)) throw Error(ErrorKind::BadParameter, "exponent must be finite");
  std::ostringstream name;
  name << "t^" << p;
  const bool whole = p >= 0.0 && std::floor(p) == p;
  return {name.str(), [p](double t) { return std::pow(t, p); },
          whole ? Interval::real_line() : Interval::positive()};
}

ScalarFunction sqrt() {
  return {"sqrt", [](double t) { return std::sqrt(t); }, Interval::nonnegative()};
}

ScalarFunction inverse() {
  return {"t^-1", [](double t) { return 1.0 / t; }, Interval::positive()};
}

}  // namespace functions

HermitianMatrix matrix_function(const ScalarFunction& f, const SpectralDecomposition& a) {
  RVector values(a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    const double lambda = a.eigenvalues(i);
    if (!f.domain.contains(lambda)) {
      std::ostringstream os;
      os << "eigenvalue " << lambda << " outside the domain " << f.domain.describe() << " of " << f.name;
      throw Error(ErrorKind::DomainViolation, os.str());
    }
    values(i) = f(lambda);
  }
  return HermitianMatrix::from_spectrum(values, a.eigenvectors);
}

HermitianMatrix matrix_function(const ScalarFunction& f, const HermitianMatrix& a) {
  return matrix_function(f, spectral_decompose(a));
}

double loewner_margin(const HermitianMatrix& a, const HermitianMatrix& b) {
  require_same_dim(a, b);
  return eigenvalues(b - a)(0);
}

bool is_positive_definite(const SpectralDecomposition& a) {
  return a.min_eigenvalue() > kPositiveDefiniteThreshold * (1.0 + a.operator_norm());
}

void require_positive_definite(const SpectralDecomposition& a, const std::string& what) {
  if (!is_positive_definite(a)) {
    std::ostringstream os;
    os << what << " is not positive definite (lambda_min = " << a.min_eigenvalue() << ")";
    throw Error(ErrorKind::DomainViolation, os.str());
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto mix64 = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix64(mix64(seed) ^ stream);
}

void PdSamplerSpec::validate() const {
  if (dim < 1) throw Error(ErrorKind::BadParameter, "sampler dimension must be at least 1");
  if (!std::isfinite(log10_eig_min) || !std::isfinite(log10_eig_max) || log10_eig_min > log10_eig_max) {
    throw Error(ErrorKind::BadParameter, "sampler eigenvalue range must satisfy log10_eig_min <= log10_eig_max");
  }
}

namespace {

CMatrix gaussian_matrix(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

}  // namespace

CMatrix random_unitary(int dim, Rng& rng) {
  const CMatrix g = gaussian_matrix(dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

RVector random_log_uniform(int count, double log10_lo, double log10_hi, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  RVector values(count);
  for (int i = 0; i < count; ++i) {
    const double u = uniform(rng);
    values(i) = std::pow(10.0, log10_lo + (log10_hi - log10_lo) * u);
  }
  return values;
}

HermitianMatrix random_pd(int dim, double log10_lo, double log10_hi, Rng& rng) {
  PdSamplerSpec{dim, log10_lo, log10_hi, 0}.validate();
  const RVector values = random_log_uniform(dim, log10_lo, log10_hi, rng);
  const CMatrix basis = random_unitary(dim, rng);
  return HermitianMatrix::from_spectrum(values, basis);
}

HermitianMatrix random_pd(const PdSamplerSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, 0));
  return random_pd(spec.dim, spec.log10_eig_min, spec.log10_eig_max, rng);
}

HermitianMatrix random_hermitian(int dim, Rng& rng) {
  const CMatrix g = gaussian_matrix(dim, rng);
  CMatrix h = (g + g.adjoint()) * 0.5;
  h /= h.norm();
  return HermitianMatrix(h);
}

CMatrix random_complex(int dim, Rng& rng) {
  CMatrix g = gaussian_matrix(dim, rng);
  return g / g.norm();
}

void require_positive_spectrum(const SpectralDecomposition& a, const std::string& what) {
  if (!(a.min_eigenvalue() > 0.0)) {
    std::ostringstream os;
    os << what << " lost positivity in floating point (lambda_min = " << a.min_eigenvalue() << ")";
    throw Error(ErrorKind::DomainViolation, os.str());
  }
}

HalfPowers::HalfPowers(const HermitianMatrix& b, PositivityCheck check) {
  const SpectralDecomposition decomposition = spectral_decompose(b);
  if (check == PositivityCheck::Threshold) {
    require_positive_definite(decomposition, "congruence factor B");
  } else {
    require_positive_spectrum(decomposition, "congruence factor B");
  }
  const RVector root = decomposition.eigenvalues.cwiseSqrt();
  const CMatrix& u = decomposition.eigenvectors;
  sqrt_ = u * root.cast<Complex>().asDiagonal() * u.adjoint();
  inv_sqrt_ = u * root.cwiseInverse().cast<Complex>().asDiagonal() * u.adjoint();
}

HermitianMatrix HalfPowers::apply(const HermitianMatrix& x, HalfPower direction) const {
  if (x.dim() != dim()) {
    throw Error(ErrorKind::DimensionMismatch, "congruence operand dimension differs from B");
  }
  const CMatrix& factor = direction == HalfPower::Positive ? sqrt_ : inv_sqrt_;
  return HermitianMatrix::hermitian_part(factor * x.matrix() * factor);
}

HermitianMatrix congruence_half(const HermitianMatrix& b, const HermitianMatrix& x, HalfPower direction) {
  return HalfPowers(b).apply(x, direction);
}

}  // namespace opcvx
