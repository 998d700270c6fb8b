// SPDX-License-Identifier: Apache-2.0
#pragma once

// Randomized Loewner-order certification of operator concavity/convexity.
//
// A trial draws two input tuples X, Y and checks, for each lambda in a grid,
//   concave: lambda F(X) + (1 - lambda) F(Y) <= F(lambda X + (1 - lambda) Y)
//   convex:  F(lambda X + (1 - lambda) Y) <= lambda F(X) + (1 - lambda) F(Y)
// by the smallest eigenvalue of (right side - left side). Margins are reported
// relative to 1 + the largest operator norm among the three map values.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opcvx/kernels.hpp"
#include "opcvx/operator_map.hpp"

namespace opcvx {

enum class MapId { THM2_1, COR2_3, THM2_2, COR2_4, THM2_5, THM3_3, THM3_4, THM3_5, LIEB, NEG_T4 };

const char* to_string(MapId id);
/// Throws UnknownMap.
MapId map_id_from_string(const std::string& name);
std::vector<MapId> positive_maps();

/// How commuting tuples are sampled for the functional-calculus maps.
///  SharedBasis: every member of X and Y is diagonal in one random basis.
///  Tensor: member m acts on tensor factor m (dimension dim each, total dim^k),
///          so X_m and Y_m need not commute while X_m and X_n always do.
enum class CommutingModel { SharedBasis, Tensor };

struct MapSpec {
  MapId map_id = MapId::THM2_1;
  double p = 0.5;
  int dim = 2;
  int probe_count = 8;
  int quadrature_nodes = 64;
  CommutingModel commuting_model = CommutingModel::SharedBasis;

  /// Throws BadParameter.
  void validate() const;
};

ParameterRange admissible_p(MapId id);
Sense sense_of(MapId id);
/// Number of matrices per input tuple.
int input_arity(MapId id);

/// Random constants a map closes over: probe directions H for the trace-form
/// maps, the matrix K for LIEB. Empty for the others.
struct MapConstants {
  std::vector<CMatrix> matrices;
};

MapConstants draw_constants(const MapSpec& spec, Rng& rng);
OperatorMap build_map(const MapSpec& spec, const MapConstants& constants);
/// Convenience overload drawing the constants from `seed`.
OperatorMap build_map(const MapSpec& spec, std::uint64_t seed = 42);

using InputTuple = std::vector<HermitianMatrix>;

struct EigenvalueRange {
  double log10_min = -2.0;
  double log10_max = 2.0;
};

struct TrialInputs {
  InputTuple x;
  InputTuple y;
};

TrialInputs sample_trial_inputs(const MapSpec& spec, const EigenvalueRange& range, Rng& rng);

InputTuple mix(double lambda, const InputTuple& x, const InputTuple& y);

struct TrialResult {
  int trial_index = 0;
  double lambda = 0.0;
  double margin = 0.0;  // signed Loewner margin, positive when the inequality holds strictly
  double scale = 1.0;   // 1 + max operator norm of the three map values

  double relative_margin() const { return margin / scale; }
};

TrialResult concavity_trial(const OperatorMap& map, Sense sense, const InputTuple& x, const InputTuple& y,
                            double lambda, int trial_index = 0);

struct CertifyOptions {
  int trials = 200;
  std::uint64_t seed = 42;
  double tolerance = 1e-8;
  std::vector<double> lambda_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  EigenvalueRange eigenvalue_range{};
  int jobs = 1;  // 0 = hardware concurrency
  bool emit_worst = false;
};

struct CertificationReport {
  std::string map_id;
  std::optional<double> p;
  std::optional<int> dim;
  int trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::vector<double> lambda_grid;
  double worst_margin = 0.0;
  bool violation = false;
  nlohmann::json worst_case;  // null when absent
  double wall_time_ms = 0.0;
  nlohmann::json details;     // check-specific extras; null when absent

  nlohmann::json to_json() const;
};

CertificationReport certify(const MapSpec& spec, const CertifyOptions& options);

/// Re-runs the trial stored in a report's worst_case and returns its relative margin.
TrialResult replay_worst_case(const MapSpec& spec, const nlohmann::json& worst_case);

// ---------------------------------------------------------------------------
// Identity crosschecks

enum class CheckId { QUAD, PF2_F35, FD_FRECHET, TRACE_IDENT };

const char* to_string(CheckId id);
/// Throws UnknownCheck.
CheckId check_id_from_string(const std::string& name);

struct CrosscheckParams {
  std::uint64_t seed = 42;
  std::vector<double> p_grid = {0.25, 0.5, 0.75, 1.0};
  std::vector<int> dims = {2, 3, 5};
  int quadrature_nodes = 64;
  std::optional<int> samples;       // per-check default when empty
  std::optional<double> tolerance;  // per-check default when empty
};

/// worst_margin is minus the largest deviation found; violation means it exceeded the tolerance.
CertificationReport crosscheck(CheckId id, const CrosscheckParams& params);

/// Removes every "wall_time_ms" key, recursively.
nlohmann::json strip_wall_time(nlohmann::json j);

}  // namespace opcvx
