// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "opcvx/certify.hpp"

namespace opcvx {

struct SuiteOptions {
  int trials = 200;
  std::uint64_t seed = 42;
  double tolerance = 1e-8;
  std::vector<double> lambda_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  int quadrature_nodes = 64;
  int jobs = 1;
  bool stress = false;
  std::optional<double> p;  // replaces every map's default p set
  std::optional<int> dim;   // replaces the default dims {2, 3, 5}
  int negative_control_trials = 500;
  int negative_control_dim = 2;
};

/// Default p values: {0.25, 0.5, 0.75} plus the admissible endpoints 0 and 1.
std::vector<double> default_p_set(MapId id);

struct SuiteResult {
  nlohmann::json report;
  bool passed = false;  // every positive check held and the negative control fired
};

/// Every positive map over its p set and dims, the four crosschecks and NEG_T4.
/// Throws BadParameter (before running anything) if an override is inadmissible.
SuiteResult run_suite(const SuiteOptions& options);

}  // namespace opcvx
