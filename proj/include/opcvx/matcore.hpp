// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace opcvx {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Asymmetry accepted (and symmetrized away) by HermitianMatrix, relative to 1 + ||A||_F.
inline constexpr double kHermitianTolerance = 1e-10;
/// Positive definite means lambda_min > kPositiveDefiniteThreshold * (1 + ||A||_2).
inline constexpr double kPositiveDefiniteThreshold = 1e-12;

/// Complex square matrix equal to its conjugate transpose.
///
/// Construction from raw entries symmetrizes inputs whose asymmetry is within
/// kHermitianTolerance and throws NotHermitian otherwise. Arithmetic between
/// Hermitian matrices stays exactly Hermitian, so results skip the check.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const CMatrix& entries);
  explicit HermitianMatrix(const RMatrix& entries);

  static HermitianMatrix identity(int dim);
  static HermitianMatrix diagonal(const RVector& values);
  static HermitianMatrix scalar(double value) { return diagonal(RVector::Constant(1, value)); }
  /// U diag(values) U*, forced exactly Hermitian.
  static HermitianMatrix from_spectrum(const RVector& values, const CMatrix& basis);
  /// (M + M*) / 2 with no tolerance check, for products that are Hermitian in exact arithmetic.
  static HermitianMatrix hermitian_part(const CMatrix& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double frobenius_norm() const { return m_.norm(); }

  HermitianMatrix operator+(const HermitianMatrix& other) const;
  HermitianMatrix operator-(const HermitianMatrix& other) const;
  HermitianMatrix operator-() const { return HermitianMatrix(Exact{}, -m_); }
  HermitianMatrix operator*(double s) const { return HermitianMatrix(Exact{}, m_ * s); }
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a) { return a * s; }

 private:
  struct Exact {};
  HermitianMatrix(Exact, CMatrix m) : m_(std::move(m)) {}

  CMatrix m_;
};

/// lambda * x + (1 - lambda) * y.
HermitianMatrix mix(double lambda, const HermitianMatrix& x, const HermitianMatrix& y);

struct SpectralDecomposition {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // unitary, columns

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  double min_eigenvalue() const { return eigenvalues(0); }
  double max_eigenvalue() const { return eigenvalues(eigenvalues.size() - 1); }
  double operator_norm() const;
  HermitianMatrix reconstruct() const { return HermitianMatrix::from_spectrum(eigenvalues, eigenvectors); }
};

SpectralDecomposition spectral_decompose(const HermitianMatrix& a);
RVector eigenvalues(const HermitianMatrix& a);
double operator_norm(const HermitianMatrix& a);

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double x) const;
  std::string describe() const;

  static Interval real_line() { return {}; }
  static Interval positive() { return {0.0, std::numeric_limits<double>::infinity(), false, false}; }
  static Interval nonnegative() { return {0.0, std::numeric_limits<double>::infinity(), true, false}; }
};

/// A real function of one real variable together with its domain.
struct ScalarFunction {
  std::string name;
  std::function<double(double)> fn;
  Interval domain;

  double operator()(double t) const { return fn(t); }
};

namespace functions {
/// t^p; the domain is the real line for non-negative integer p and (0, inf) otherwise.
ScalarFunction power(double p);
ScalarFunction sqrt();
ScalarFunction inverse();
}  // namespace functions

/// f(A) = U diag(f(lambda_i)) U*. Throws DomainViolation if an eigenvalue lies outside f's domain.
HermitianMatrix matrix_function(const ScalarFunction& f, const HermitianMatrix& a);
HermitianMatrix matrix_function(const ScalarFunction& f, const SpectralDecomposition& a);

/// lambda_min(B - A); non-negative iff A <= B in the Loewner order.
double loewner_margin(const HermitianMatrix& a, const HermitianMatrix& b);

bool is_positive_definite(const SpectralDecomposition& a);
/// Throws DomainViolation naming `what` unless `a` is positive definite.
void require_positive_definite(const SpectralDecomposition& a, const std::string& what);

// ---------------------------------------------------------------------------
// Randomness

using Rng = std::mt19937_64;

/// Stream seed for (seed, stream) pairs; splitmix64 finalizer over both words.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct PdSamplerSpec {
  int dim = 1;
  double log10_eig_min = -2.0;
  double log10_eig_max = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Haar-distributed unitary: QR of a complex Gaussian matrix with R's diagonal phases removed.
CMatrix random_unitary(int dim, Rng& rng);
/// Values log-uniform on [10^lo, 10^hi], in draw order.
RVector random_log_uniform(int count, double log10_lo, double log10_hi, Rng& rng);
HermitianMatrix random_pd(int dim, double log10_lo, double log10_hi, Rng& rng);
HermitianMatrix random_pd(const PdSamplerSpec& spec);
/// Hermitian matrix with Gaussian entries scaled to unit Frobenius norm.
HermitianMatrix random_hermitian(int dim, Rng& rng);
/// Complex Gaussian matrix scaled to unit Frobenius norm.
CMatrix random_complex(int dim, Rng& rng);

// ---------------------------------------------------------------------------
// Congruences by B^{1/2} and B^{-1/2}

enum class HalfPower { Positive, Negative };

/// Threshold: lambda_min > 1e-12 (1 + ||B||), for inputs.
/// Strict: lambda_min > 0, for operands derived from inputs that already passed.
enum class PositivityCheck { Threshold, Strict };

/// Throws DomainViolation unless every eigenvalue is positive.
void require_positive_spectrum(const SpectralDecomposition& a, const std::string& what);

/// B^{1/2} and B^{-1/2} computed once from B's spectrum.
class HalfPowers {
 public:
  explicit HalfPowers(const HermitianMatrix& b, PositivityCheck check = PositivityCheck::Threshold);

  int dim() const { return static_cast<int>(sqrt_.rows()); }
  /// B^{+-1/2} X B^{+-1/2}.
  HermitianMatrix apply(const HermitianMatrix& x, HalfPower direction) const;

 private:
  CMatrix sqrt_;
  CMatrix inv_sqrt_;
};

HermitianMatrix congruence_half(const HermitianMatrix& b, const HermitianMatrix& x, HalfPower direction);

}  // namespace opcvx
