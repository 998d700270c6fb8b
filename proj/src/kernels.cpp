// SPDX-License-Identifier: Apache-2.0
#include "opcvx/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include <gsl/gsl_integration.h>

#include "opcvx/errors.hpp"
#include "opcvx/frechet.hpp"

namespace opcvx {

const char* to_string(KernelId id) {
  switch (id) {
    case KernelId::G21: return "G21";
    case KernelId::F23: return "F23";
    case KernelId::H25: return "H25";
    case KernelId::F33: return "F33";
    case KernelId::F34: return "F34";
    case KernelId::F35: return "F35";
    case KernelId::LIEB: return "LIEB";
  }
  return "?";
}

KernelId kernel_id_from_string(const std::string& name) {
  for (KernelId id : {KernelId::G21, KernelId::F23, KernelId::H25, KernelId::F33, KernelId::F34, KernelId::F35,
                      KernelId::LIEB}) {
    if (name == to_string(id)) return id;
  }
  throw Error(ErrorKind::BadParameter, "unknown kernel '" + name + "'");
}

// ---------------------------------------------------------------------------

QuadratureRule QuadratureRule::gauss_legendre(int nodes) {
  if (nodes < 1) throw Error(ErrorKind::BadParameter, "quadrature needs at least one node");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(nodes)), &gsl_integration_glfixed_table_free);
  if (!table) throw Error(ErrorKind::BadParameter, "could not build the Gauss-Legendre table");
  std::vector<std::pair<double, double>> points(static_cast<std::size_t>(nodes));
  for (std::size_t i = 0; i < points.size(); ++i) {
    gsl_integration_glfixed_point(0.0, 1.0, i, &points[i].first, &points[i].second, table.get());
  }
  std::sort(points.begin(), points.end());
  std::vector<double> x;
  std::vector<double> w;
  for (const auto& [node, weight] : points) {
    x.push_back(node);
    w.push_back(weight);
  }
  return QuadratureRule(std::move(x), std::move(w));
}

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (nodes_.empty() || nodes_.size() != weights_.size()) {
    throw Error(ErrorKind::BadParameter, "quadrature rule needs matching, non-empty node and weight lists");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > 0.0 && nodes_[i] < 1.0)) throw Error(ErrorKind::BadParameter, "nodes must lie in (0, 1)");
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) throw Error(ErrorKind::BadParameter, "nodes must be ascending");
    if (!(weights_[i] > 0.0)) throw Error(ErrorKind::BadParameter, "weights must be positive");
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-14) throw Error(ErrorKind::BadParameter, "weights must sum to 1");
}

// ---------------------------------------------------------------------------

ParameterRange ScalarKernel::admissible_range(KernelId id) {
  switch (id) {
    case KernelId::H25: return {0.0, 1.0, true, false};
    case KernelId::F34: return {0.0, 1.0, false, false};
    default: return {0.0, 1.0, false, true};
  }
}

Sense ScalarKernel::sense_of(KernelId id) {
  switch (id) {
    case KernelId::F23:
    case KernelId::H25:
    case KernelId::F34: return Sense::Convex;
    default: return Sense::Concave;
  }
}

int ScalarKernel::arity_of(KernelId id) {
  switch (id) {
    case KernelId::F33:
    case KernelId::F34:
    case KernelId::F35: return 3;
    default: return 2;
  }
}

ScalarKernel::ScalarKernel(KernelId id, double p) : id_(id), p_(p) {
  const ParameterRange range = admissible_range(id);
  if (!range.contains(p)) {
    std::ostringstream os;
    os << to_string(id) << " requires p in " << range.describe() << ", got " << p;
    throw Error(ErrorKind::BadParameter, os.str());
  }
}

std::string ScalarKernel::name() const {
  std::ostringstream os;
  os << to_string(id_) << "(p=" << p_ << ")";
  return os.str();
}

void ScalarKernel::check_args(std::span<const double> args) const {
  if (static_cast<int>(args.size()) != arity()) {
    std::ostringstream os;
    os << name() << " takes " << arity() << " arguments, got " << args.size();
    throw Error(ErrorKind::ArityMismatch, os.str());
  }
  for (double x : args) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      std::ostringstream os;
      os << name() << " needs positive finite arguments, got " << x;
      throw Error(ErrorKind::DomainViolation, os.str());
    }
  }
}

double ScalarKernel::eval(std::span<const double> args) const {
  check_args(args);
  const double p = p_;
  switch (id_) {
    case KernelId::G21: return divided_difference(PowerFunction(1.0 + p), args[0], args[1]);
    case KernelId::F23: return 1.0 / divided_difference(PowerFunction(1.0 + p), args[0], args[1]);
    case KernelId::H25: return divided_difference(PowerFunction(1.0 - p), args[0], args[1]);
    case KernelId::F33:
      return divided_difference(PowerFunction(1.0 + p), args[0], args[1]) * std::pow(args[2], 1.0 - p);
    case KernelId::F34:
      return divided_difference(PowerFunction(1.0 - p), args[0], args[1]) * std::pow(args[2], 1.0 + p);
    case KernelId::F35: return std::pow(args[2], p) / divided_difference(PowerFunction(p), args[0], args[1]);
    case KernelId::LIEB: return std::pow(args[0], p) * std::pow(args[1], 1.0 - p);
  }
  return 0.0;
}

bool ScalarKernel::has_integral_form() const {
  return id_ == KernelId::G21 || id_ == KernelId::H25 || id_ == KernelId::F33 || id_ == KernelId::F34;
}

double ScalarKernel::integral(std::span<const double> args, const QuadratureRule& rule) const {
  if (!has_integral_form()) throw Error(ErrorKind::NoIntegralForm, name() + " has no registered integral form");
  check_args(args);
  const bool convex_branch = id_ == KernelId::H25 || id_ == KernelId::F34;
  // prefactor * int_0^1 (lambda t + (1 - lambda) s)^exponent dlambda * tail
  const double exponent = convex_branch ? -p_ : p_;
  const double prefactor = convex_branch ? 1.0 - p_ : 1.0 + p_;
  double tail = 1.0;
  if (id_ == KernelId::F33) tail = std::pow(args[2], 1.0 - p_);
  if (id_ == KernelId::F34) tail = std::pow(args[2], 1.0 + p_);

  const double lo = std::min(args[0], args[1]);
  const double hi = std::max(args[0], args[1]);
  double mean;
  if (lo == hi) {
    mean = std::pow(lo, exponent);
  } else {
    // Substituting lambda t + (1 - lambda) s = lo (hi / lo)^v turns the integrand
    // into lo^exponent * exp((exponent + 1) v L) * L / r, smooth in v even when
    // the ratio hi / lo is large.
    const double r = (hi - lo) / lo;
    const double log_ratio = std::log1p(r);
    const double c = (exponent + 1.0) * log_ratio;
    mean = std::pow(lo, exponent) * (log_ratio / r) * rule.integrate([c](double v) { return std::exp(c * v); });
  }
  return prefactor * mean * tail;
}

MultivariateFunction ScalarKernel::as_function() const {
  std::vector<Interval> domains(static_cast<std::size_t>(arity()), Interval::positive());
  ScalarKernel self = *this;
  return {name(), std::move(domains), [self](std::span<const double> args) { return self.eval(args); }};
}

double kernel_eval(const ScalarKernel& k, std::span<const double> args) { return k.eval(args); }

double kernel_integral(const ScalarKernel& k, std::span<const double> args, const QuadratureRule& rule) {
  return k.integral(args, rule);
}

}  // namespace opcvx
