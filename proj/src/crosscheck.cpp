// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cmath>
#include <functional>

#include "opcvx/certify.hpp"
#include "opcvx/errors.hpp"
#include "opcvx/frechet.hpp"
#include "opcvx/funcalc.hpp"
#include "opcvx/matrix_json.hpp"
#include "opcvx/perspective.hpp"

namespace opcvx {

using nlohmann::json;

namespace {

struct CheckName {
  CheckId id;
  const char* name;
};

constexpr CheckName kCheckNames[] = {
    {CheckId::QUAD, "QUAD"},
    {CheckId::PF2_F35, "PF2-F35"},
    {CheckId::FD_FRECHET, "FD-FRECHET"},
    {CheckId::TRACE_IDENT, "TRACE-IDENT"},
};

// Running maximum of deviations with the sample that produced it.
struct DeviationTracker {
  int samples = 0;
  double max_deviation = 0.0;
  json worst_sample;

  void add(double deviation, const std::function<json()>& describe) {
    ++samples;
    if (samples == 1 || deviation > max_deviation || std::isnan(deviation)) {
      max_deviation = std::isnan(deviation) ? std::numeric_limits<double>::infinity() : deviation;
      worst_sample = describe();
      worst_sample["deviation"] = deviation;
    }
  }
};

double relative(double value, double reference) { return std::abs(value - reference) / (1.0 + std::abs(reference)); }

std::vector<double> admissible(const std::vector<double>& grid, KernelId id) {
  std::vector<double> out;
  for (double p : grid) {
    if (ScalarKernel::admissible_range(id).contains(p)) out.push_back(p);
  }
  return out;
}

json quadrature_check(const CrosscheckParams& params, DeviationTracker& tracker, bool& spot_failed) {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(params.quadrature_nodes);
  const int samples = params.samples.value_or(200);
  Rng rng(derive_seed(params.seed, 0x9a4d));
  for (KernelId id : {KernelId::G21, KernelId::H25, KernelId::F33, KernelId::F34}) {
    for (double p : admissible(params.p_grid, id)) {
      const ScalarKernel kernel(id, p);
      for (int s = 0; s < samples; ++s) {
        const RVector draw = random_log_uniform(kernel.arity(), -2.0, 2.0, rng);
        const std::vector<double> args(draw.data(), draw.data() + draw.size());
        const double closed = kernel.eval(args);
        const double integral = kernel.integral(args, rule);
        tracker.add(relative(integral, closed), [&] {
          return json{{"kernel", to_string(id)}, {"p", p}, {"args", args}, {"closed_form", closed},
                      {"quadrature", integral}};
        });
      }
    }
  }
  // G21 at p = 1/2 on (1, 4) is (8 - 1) / 3.
  const double spot_args[2] = {1.0, 4.0};
  const double spot = ScalarKernel(KernelId::G21, 0.5).integral(spot_args, rule);
  const double spot_error = std::abs(spot - 7.0 / 3.0);
  spot_failed = spot_failed || !(spot_error <= 1e-10);
  return {{"spot_G21_1_4", {{"value", spot}, {"expected", 7.0 / 3.0}, {"abs_error", spot_error}}}};
}

json pf2_check(const CrosscheckParams& params, DeviationTracker& tracker) {
  const QuadratureRule rule = QuadratureRule::gauss_legendre(params.quadrature_nodes);
  std::vector<double> grid;
  for (int i = 0; i < 5; ++i) grid.push_back(std::pow(10.0, -1.0 + 0.5 * i));
  for (double p : admissible(params.p_grid, KernelId::F35)) {
    const ScalarKernel kernel(KernelId::F35, p);
    for (double t1 : grid) {
      for (double t2 : grid) {
        for (double t3 : grid) {
          const double args[3] = {t1, t2, t3};
          const double closed = kernel.eval(args);
          const double nested = pf2_apply(HermitianMatrix::scalar(t1), HermitianMatrix::scalar(t2),
                                          HermitianMatrix::scalar(t3), p, rule)(0, 0).real();
          tracker.add(relative(nested, closed), [&] {
            return json{{"p", p}, {"args", {t1, t2, t3}}, {"closed_form", closed}, {"nested", nested}};
          });
        }
      }
    }
  }
  // sqrt(4) + sqrt(1) = 3 at p = 1/2.
  const double spot = pf2_apply(HermitianMatrix::scalar(4.0), HermitianMatrix::scalar(1.0),
                                HermitianMatrix::scalar(1.0), 0.5, rule)(0, 0).real();
  tracker.add(relative(spot, 3.0), [&] {
    return json{{"p", 0.5}, {"args", {4.0, 1.0, 1.0}}, {"expected", 3.0}, {"nested", spot}};
  });
  return {{"spot_4_1_1", {{"value", spot}, {"expected", 3.0}}}};
}

json finite_difference_check(const CrosscheckParams& params, DeviationTracker& tracker) {
  constexpr double kStep = 1e-5;
  const int samples = params.samples.value_or(50);
  Rng rng(derive_seed(params.seed, 0xfdf));
  for (double exponent : {1.5, 0.5, 2.0}) {
    const PowerFunction f(exponent);
    const ScalarFunction scalar = f.as_scalar_function();
    for (int dim : params.dims) {
      for (int s = 0; s < samples; ++s) {
        const HermitianMatrix a = random_pd(dim, -1.0, 1.0, rng);
        const HermitianMatrix h = random_hermitian(dim, rng);
        const CMatrix exact = frechet_apply(f, a, h.matrix());
        const CMatrix central =
            (matrix_function(scalar, a + kStep * h).matrix() - matrix_function(scalar, a - kStep * h).matrix()) /
            (2.0 * kStep);
        const double deviation = (central - exact).norm() / (1.0 + exact.norm());
        tracker.add(deviation, [&] {
          return json{{"exponent", exponent}, {"dim", dim}, {"A", to_json(a)}, {"H", to_json(h)}};
        });
      }
    }
  }
  return {{"step", kStep}};
}

json trace_identity_check(const CrosscheckParams& params, DeviationTracker& tracker) {
  const int samples = params.samples.value_or(100);
  Rng rng(derive_seed(params.seed, 0x7ace));
  for (double p : admissible(params.p_grid, KernelId::G21)) {
    const PowerFunction f(1.0 + p);
    const MultivariateFunction g = ScalarKernel(KernelId::G21, p).as_function();
    for (int s = 0; s < samples; ++s) {
      const int dim = params.dims[static_cast<std::size_t>(s) % params.dims.size()];
      const HermitianMatrix a = random_pd(dim, -2.0, 2.0, rng);
      const CMatrix h = random_complex(dim, rng);
      const SpectralDecomposition d = spectral_decompose(a);
      // Full differential, then an explicit trace, against the kernel-side quadratic form.
      const double differential = (h.adjoint() * frechet_apply(f, d, h)).trace().real();
      const double superoperator = trace_form(g, d, d, h);
      tracker.add(relative(superoperator, differential), [&] {
        return json{{"p", p}, {"dim", dim}, {"A", to_json(a)}, {"H", matrix_to_json(h)},
                    {"frechet_trace_form", differential}, {"trace_form", superoperator}};
      });
    }
  }
  return nullptr;
}

}  // namespace

const char* to_string(CheckId id) {
  for (const auto& entry : kCheckNames) {
    if (entry.id == id) return entry.name;
  }
  return "?";
}

CheckId check_id_from_string(const std::string& name) {
  for (const auto& entry : kCheckNames) {
    if (name == entry.name) return entry.id;
  }
  throw Error(ErrorKind::UnknownCheck, "unknown crosscheck '" + name + "'");
}

CertificationReport crosscheck(CheckId id, const CrosscheckParams& params) {
  if (params.quadrature_nodes < 1) throw Error(ErrorKind::BadParameter, "quadrature_nodes must be at least 1");
  if (params.samples && *params.samples < 1) throw Error(ErrorKind::BadParameter, "samples must be at least 1");
  if (params.dims.empty()) throw Error(ErrorKind::BadParameter, "dims must not be empty");
  for (int dim : params.dims) {
    if (dim < 1) throw Error(ErrorKind::BadParameter, "dims must be positive");
  }
  double default_tolerance = 0.0;
  switch (id) {
    case CheckId::QUAD: default_tolerance = 1e-9; break;
    case CheckId::PF2_F35: default_tolerance = 1e-8; break;
    case CheckId::FD_FRECHET: default_tolerance = 1e-5; break;
    case CheckId::TRACE_IDENT: default_tolerance = 1e-10; break;
  }
  const double tolerance = params.tolerance.value_or(default_tolerance);
  if (!(tolerance > 0.0)) throw Error(ErrorKind::BadParameter, "tolerance must be positive");

  const auto start = std::chrono::steady_clock::now();
  DeviationTracker tracker;
  bool spot_failed = false;
  json extra;
  switch (id) {
    case CheckId::QUAD: extra = quadrature_check(params, tracker, spot_failed); break;
    case CheckId::PF2_F35: extra = pf2_check(params, tracker); break;
    case CheckId::FD_FRECHET: extra = finite_difference_check(params, tracker); break;
    case CheckId::TRACE_IDENT: extra = trace_identity_check(params, tracker); break;
  }
  if (tracker.samples == 0) throw Error(ErrorKind::BadParameter, "no admissible p in the crosscheck grid");

  CertificationReport report;
  report.map_id = to_string(id);
  report.trials = tracker.samples;
  report.seed = params.seed;
  report.tolerance = tolerance;
  report.worst_margin = -tracker.max_deviation;
  report.violation = report.worst_margin < -tolerance || spot_failed;
  report.details = {{"max_deviation", tracker.max_deviation}, {"worst_sample", tracker.worst_sample},
                    {"p_grid", params.p_grid}, {"quadrature_nodes", params.quadrature_nodes}};
  if (!extra.is_null()) report.details["extra"] = extra;
  if (report.violation) report.worst_case = tracker.worst_sample;
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace opcvx
