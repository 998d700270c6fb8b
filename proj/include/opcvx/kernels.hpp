// SPDX-License-Identifier: Apache-2.0
#pragma once

// Catalog of two- and three-variable kernels whose functional calculus is
// operator concave or convex, plus their integral representations.

#include <span>
#include <string>
#include <vector>

#include "opcvx/funcalc.hpp"
#include "opcvx/operator_map.hpp"

namespace opcvx {

enum class KernelId { G21, F23, H25, F33, F34, F35, LIEB };

const char* to_string(KernelId id);
/// Throws BadParameter for unknown names.
KernelId kernel_id_from_string(const std::string& name);

/// Gauss-Legendre rule mapped to [0, 1]; nodes ascending, weights summing to 1.
class QuadratureRule {
 public:
  static QuadratureRule gauss_legendre(int nodes = 64);

  QuadratureRule(std::vector<double> nodes, std::vector<double> weights);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  template <typename F>
  double integrate(F&& g) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * g(nodes_[i]);
    return sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

struct ParameterRange {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;

  bool contains(double p) const { return Interval{lo, hi, lo_closed, hi_closed}.contains(p); }
  std::string describe() const { return Interval{lo, hi, lo_closed, hi_closed}.describe(); }
};

/// A named kernel with parameter p. Arguments must be positive.
class ScalarKernel {
 public:
  /// Throws BadParameter if p is outside the kernel's admissible range.
  ScalarKernel(KernelId id, double p);

  static ParameterRange admissible_range(KernelId id);
  static Sense sense_of(KernelId id);
  static int arity_of(KernelId id);

  KernelId id() const { return id_; }
  double p() const { return p_; }
  int arity() const { return arity_of(id_); }
  Sense sense() const { return sense_of(id_); }
  std::string name() const;

  double eval(std::span<const double> args) const;
  double operator()(std::span<const double> args) const { return eval(args); }

  bool has_integral_form() const;
  /// Quadrature value of the kernel's lambda-integral including its prefactor.
  double integral(std::span<const double> args, const QuadratureRule& rule) const;

  MultivariateFunction as_function() const;

 private:
  void check_args(std::span<const double> args) const;

  KernelId id_;
  double p_;
};

double kernel_eval(const ScalarKernel& k, std::span<const double> args);
double kernel_integral(const ScalarKernel& k, std::span<const double> args, const QuadratureRule& rule);

}  // namespace opcvx
