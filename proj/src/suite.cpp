// SPDX-License-Identifier: Apache-2.0
#include "opcvx/suite.hpp"

#include <chrono>

#include "opcvx/errors.hpp"

namespace opcvx {

using nlohmann::json;

std::vector<double> default_p_set(MapId id) {
  const ParameterRange range = admissible_p(id);
  std::vector<double> ps;
  if (range.contains(0.0)) ps.push_back(0.0);
  for (double p : {0.25, 0.5, 0.75, 1.0}) {
    if (range.contains(p)) ps.push_back(p);
  }
  return ps;
}

SuiteResult run_suite(const SuiteOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<int> dims = options.dim ? std::vector<int>{*options.dim} : std::vector<int>{2, 3, 5};

  std::vector<MapSpec> specs;
  for (MapId id : positive_maps()) {
    const std::vector<double> ps = options.p ? std::vector<double>{*options.p} : default_p_set(id);
    for (double p : ps) {
      for (int dim : dims) {
        MapSpec spec;
        spec.map_id = id;
        spec.p = p;
        spec.dim = dim;
        spec.quadrature_nodes = options.quadrature_nodes;
        spec.validate();
        specs.push_back(spec);
      }
    }
  }

  CertifyOptions certify_options;
  certify_options.trials = options.trials;
  certify_options.seed = options.seed;
  certify_options.tolerance = options.tolerance;
  certify_options.lambda_grid = options.lambda_grid;
  certify_options.jobs = options.jobs;
  if (options.stress) certify_options.eigenvalue_range = {-4.0, 4.0};

  bool passed = true;
  json certifications = json::array();
  for (const MapSpec& spec : specs) {
    const CertificationReport report = certify(spec, certify_options);
    passed = passed && !report.violation;
    certifications.push_back(report.to_json());
  }

  CrosscheckParams crosscheck_params;
  crosscheck_params.seed = options.seed;
  crosscheck_params.quadrature_nodes = options.quadrature_nodes;
  json crosschecks = json::array();
  for (CheckId id : {CheckId::QUAD, CheckId::PF2_F35, CheckId::FD_FRECHET, CheckId::TRACE_IDENT}) {
    const CertificationReport report = crosscheck(id, crosscheck_params);
    passed = passed && !report.violation;
    crosschecks.push_back(report.to_json());
  }

  MapSpec negative;
  negative.map_id = MapId::NEG_T4;
  negative.dim = options.negative_control_dim;
  CertifyOptions negative_options = certify_options;
  negative_options.trials = options.negative_control_trials;
  const CertificationReport control = certify(negative, negative_options);
  passed = passed && control.violation;

  json report;
  report["kind"] = "suite";
  report["seed"] = options.seed;
  report["trials"] = options.trials;
  report["tolerance"] = options.tolerance;
  report["lambda_grid"] = options.lambda_grid;
  report["quadrature_nodes"] = options.quadrature_nodes;
  report["stress"] = options.stress;
  report["dims"] = dims;
  report["certifications"] = std::move(certifications);
  report["crosschecks"] = std::move(crosschecks);
  report["negative_control"] = control.to_json();
  report["passed"] = passed;
  report["wall_time_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return {std::move(report), passed};
}

}  // namespace opcvx
