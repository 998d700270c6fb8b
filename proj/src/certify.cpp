// SPDX-License-Identifier: Apache-2.0
#include "opcvx/certify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "opcvx/errors.hpp"
#include "opcvx/frechet.hpp"
#include "opcvx/funcalc.hpp"
#include "opcvx/matrix_json.hpp"
#include "opcvx/perspective.hpp"

namespace opcvx {

using nlohmann::json;

namespace {

struct MapName {
  MapId id;
  const char* name;
};

constexpr MapName kMapNames[] = {
    {MapId::THM2_1, "THM2.1"}, {MapId::COR2_3, "COR2.3"}, {MapId::THM2_2, "THM2.2"}, {MapId::COR2_4, "COR2.4"},
    {MapId::THM2_5, "THM2.5"}, {MapId::THM3_3, "THM3.3"}, {MapId::THM3_4, "THM3.4"}, {MapId::THM3_5, "THM3.5"},
    {MapId::LIEB, "LIEB"},     {MapId::NEG_T4, "NEG_T4"},
};

// Functional-calculus maps and the kernel each one evaluates.
std::optional<KernelId> calculus_kernel(MapId id) {
  switch (id) {
    case MapId::THM2_1: return KernelId::G21;
    case MapId::COR2_3: return KernelId::F23;
    case MapId::THM3_3: return KernelId::F33;
    case MapId::THM3_4: return KernelId::F34;
    default: return std::nullopt;
  }
}

bool is_trace_form_map(MapId id) { return id == MapId::THM2_2 || id == MapId::COR2_4 || id == MapId::THM2_5; }

// I (x) ... (x) A (x) ... (x) I with A in slot `slot` of `factors` slots.
CMatrix embed(const CMatrix& a, int slot, int factors) {
  const auto d = a.rows();
  CMatrix out = CMatrix::Identity(1, 1);
  for (int s = 0; s < factors; ++s) {
    const CMatrix factor = s == slot ? a : CMatrix(CMatrix::Identity(d, d));
    CMatrix next(out.rows() * d, out.cols() * d);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(i * d, j * d, d, d) = out(i, j) * factor;
    }
    out = std::move(next);
  }
  return out;
}

HermitianMatrix probe_diagonal(const std::vector<double>& values) {
  return HermitianMatrix::diagonal(Eigen::Map<const RVector>(values.data(), static_cast<Eigen::Index>(values.size())));
}

}  // namespace

const char* to_string(MapId id) {
  for (const auto& entry : kMapNames) {
    if (entry.id == id) return entry.name;
  }
  return "?";
}

MapId map_id_from_string(const std::string& name) {
  for (const auto& entry : kMapNames) {
    if (name == entry.name) return entry.id;
  }
  throw Error(ErrorKind::UnknownMap, "unknown map '" + name + "'");
}

std::vector<MapId> positive_maps() {
  return {MapId::THM2_1, MapId::COR2_3, MapId::THM2_2, MapId::COR2_4, MapId::THM2_5,
          MapId::THM3_3, MapId::THM3_4, MapId::THM3_5, MapId::LIEB};
}

ParameterRange admissible_p(MapId id) {
  switch (id) {
    case MapId::THM2_1: return ScalarKernel::admissible_range(KernelId::G21);
    case MapId::COR2_3: return ScalarKernel::admissible_range(KernelId::F23);
    case MapId::THM2_5: return ScalarKernel::admissible_range(KernelId::H25);
    case MapId::THM3_3: return ScalarKernel::admissible_range(KernelId::F33);
    case MapId::THM3_4: return ScalarKernel::admissible_range(KernelId::F34);
    case MapId::THM3_5: return ScalarKernel::admissible_range(KernelId::F35);
    case MapId::LIEB: return ScalarKernel::admissible_range(KernelId::LIEB);
    case MapId::NEG_T4:
      return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), false, false};
    default: return {0.0, 1.0, false, true};
  }
}

Sense sense_of(MapId id) {
  switch (id) {
    case MapId::COR2_3:
    case MapId::COR2_4:
    case MapId::THM2_5:
    case MapId::THM3_4:
    case MapId::NEG_T4: return Sense::Convex;
    default: return Sense::Concave;
  }
}

int input_arity(MapId id) {
  switch (id) {
    case MapId::THM2_1:
    case MapId::COR2_3:
    case MapId::LIEB: return 2;
    case MapId::THM3_3:
    case MapId::THM3_4:
    case MapId::THM3_5: return 3;
    default: return 1;
  }
}

void MapSpec::validate() const {
  const ParameterRange range = admissible_p(map_id);
  if (!range.contains(p)) {
    std::ostringstream os;
    os << to_string(map_id) << " requires p in " << range.describe() << ", got " << p;
    throw Error(ErrorKind::BadParameter, os.str());
  }
  if (dim < 1) throw Error(ErrorKind::BadParameter, "dim must be at least 1");
  if (probe_count < 1) throw Error(ErrorKind::BadParameter, "probe_count must be at least 1");
  if (quadrature_nodes < 1) throw Error(ErrorKind::BadParameter, "quadrature_nodes must be at least 1");
}

MapConstants draw_constants(const MapSpec& spec, Rng& rng) {
  MapConstants constants;
  if (is_trace_form_map(spec.map_id)) {
    for (int k = 0; k < spec.probe_count; ++k) constants.matrices.push_back(random_hermitian(spec.dim, rng).matrix());
  } else if (spec.map_id == MapId::LIEB) {
    constants.matrices.push_back(random_complex(spec.dim, rng));
  }
  return constants;
}

OperatorMap build_map(const MapSpec& spec, const MapConstants& constants) {
  spec.validate();
  const MapId id = spec.map_id;
  const double p = spec.p;
  OperatorMap map;
  map.name = to_string(id);
  map.arity = input_arity(id);
  map.sense = sense_of(id);

  if (auto kernel_id = calculus_kernel(id)) {
    const MultivariateFunction f = ScalarKernel(*kernel_id, p).as_function();
    map.fn = [f](std::span<const HermitianMatrix> in) {
      return multivariate_apply(f, CommutingTuple(std::vector<HermitianMatrix>(in.begin(), in.end())));
    };
    return map;
  }

  auto require_constants = [&](std::size_t count) {
    if (constants.matrices.size() != count) {
      throw Error(ErrorKind::BadParameter, std::string(to_string(id)) + " built with the wrong number of constants");
    }
    for (const auto& m : constants.matrices) {
      if (m.rows() != spec.dim || m.cols() != spec.dim) {
        throw Error(ErrorKind::DimensionMismatch, "map constant has the wrong dimension");
      }
    }
  };

  switch (id) {
    case MapId::THM2_2:
    case MapId::COR2_4:
    case MapId::THM2_5: {
      require_constants(static_cast<std::size_t>(spec.probe_count));
      const PowerFunction f(id == MapId::THM2_5 ? 1.0 - p : 1.0 + p);
      const bool inverse = id == MapId::COR2_4;
      const std::vector<CMatrix> probes = constants.matrices;
      map.fn = [f, inverse, probes](std::span<const HermitianMatrix> in) {
        const SpectralDecomposition a = spectral_decompose(in[0]);
        std::vector<double> forms;
        forms.reserve(probes.size());
        for (const auto& h : probes) {
          forms.push_back(inverse ? frechet_inverse_trace_form(f, a, h) : frechet_trace_form(f, a, h));
        }
        return probe_diagonal(forms);
      };
      break;
    }
    case MapId::THM3_5: {
      const QuadratureRule rule = QuadratureRule::gauss_legendre(spec.quadrature_nodes);
      map.fn = [rule, p](std::span<const HermitianMatrix> in) { return pf2_apply(in[0], in[1], in[2], p, rule); };
      break;
    }
    case MapId::LIEB: {
      require_constants(1);
      const MultivariateFunction f = ScalarKernel(KernelId::LIEB, p).as_function();
      const CMatrix k = constants.matrices.front();
      map.fn = [f, k](std::span<const HermitianMatrix> in) {
        return HermitianMatrix::scalar(trace_form(f, in[0], in[1], k));
      };
      break;
    }
    case MapId::NEG_T4: {
      const ScalarFunction quartic = functions::power(4.0);
      map.fn = [quartic](std::span<const HermitianMatrix> in) { return matrix_function(quartic, in[0]); };
      break;
    }
    default: throw Error(ErrorKind::UnknownMap, "no builder for " + map.name);
  }
  return map;
}

OperatorMap build_map(const MapSpec& spec, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xc0457));
  return build_map(spec, draw_constants(spec, rng));
}

TrialInputs sample_trial_inputs(const MapSpec& spec, const EigenvalueRange& range, Rng& rng) {
  const int k = input_arity(spec.map_id);
  TrialInputs inputs;
  if (calculus_kernel(spec.map_id) && spec.commuting_model == CommutingModel::SharedBasis) {
    const CMatrix basis = random_unitary(spec.dim, rng);
    for (InputTuple* tuple : {&inputs.x, &inputs.y}) {
      for (int m = 0; m < k; ++m) {
        tuple->push_back(HermitianMatrix::from_spectrum(
            random_log_uniform(spec.dim, range.log10_min, range.log10_max, rng), basis));
      }
    }
  } else if (calculus_kernel(spec.map_id)) {
    for (InputTuple* tuple : {&inputs.x, &inputs.y}) {
      for (int m = 0; m < k; ++m) {
        const HermitianMatrix factor = random_pd(spec.dim, range.log10_min, range.log10_max, rng);
        tuple->push_back(HermitianMatrix(embed(factor.matrix(), m, k)));
      }
    }
  } else {
    for (InputTuple* tuple : {&inputs.x, &inputs.y}) {
      for (int m = 0; m < k; ++m) tuple->push_back(random_pd(spec.dim, range.log10_min, range.log10_max, rng));
    }
  }
  return inputs;
}

InputTuple mix(double lambda, const InputTuple& x, const InputTuple& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::ArityMismatch, "input tuples differ in length");
  InputTuple out;
  out.reserve(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) out.push_back(mix(lambda, x[m], y[m]));
  return out;
}

namespace {

TrialResult compare(Sense sense, const HermitianMatrix& fx, double norm_x, const HermitianMatrix& fy, double norm_y,
                    const HermitianMatrix& fmix, double lambda, int trial_index) {
  const HermitianMatrix combination = mix(lambda, fx, fy);
  TrialResult result;
  result.trial_index = trial_index;
  result.lambda = lambda;
  result.margin = sense == Sense::Concave ? loewner_margin(combination, fmix) : loewner_margin(fmix, combination);
  result.scale = 1.0 + std::max({norm_x, norm_y, operator_norm(fmix)});
  return result;
}

void require_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorKind::BadParameter, "lambda must lie in [0, 1]");
}

}  // namespace

TrialResult concavity_trial(const OperatorMap& map, Sense sense, const InputTuple& x, const InputTuple& y,
                            double lambda, int trial_index) {
  require_lambda(lambda);
  const HermitianMatrix fx = map(x);
  const HermitianMatrix fy = map(y);
  const HermitianMatrix fmix = map(mix(lambda, x, y));
  return compare(sense, fx, operator_norm(fx), fy, operator_norm(fy), fmix, lambda, trial_index);
}

json CertificationReport::to_json() const {
  json j;
  j["map_id"] = map_id;
  j["p"] = p ? json(*p) : json(nullptr);
  j["dim"] = dim ? json(*dim) : json(nullptr);
  j["trials"] = trials;
  j["seed"] = seed;
  j["tolerance"] = tolerance;
  j["lambda_grid"] = lambda_grid;
  j["worst_margin"] = worst_margin;
  j["violation"] = violation;
  j["worst_case"] = worst_case;
  j["wall_time_ms"] = wall_time_ms;
  if (!details.is_null()) j["details"] = details;
  return j;
}

namespace {

struct TrialOutcome {
  TrialResult worst;  // smallest relative margin over the lambda grid, first lambda on ties
};

struct Trial {
  MapConstants constants;
  TrialInputs inputs;
};

Trial draw_trial(const MapSpec& spec, const CertifyOptions& options, int trial_index) {
  Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(trial_index)));
  Trial trial;
  trial.constants = draw_constants(spec, rng);
  trial.inputs = sample_trial_inputs(spec, options.eigenvalue_range, rng);
  return trial;
}

TrialOutcome run_trial(const MapSpec& spec, const CertifyOptions& options, int trial_index) {
  const Trial trial = draw_trial(spec, options, trial_index);
  const OperatorMap map = build_map(spec, trial.constants);
  const Sense sense = sense_of(spec.map_id);
  const HermitianMatrix fx = map(trial.inputs.x);
  const HermitianMatrix fy = map(trial.inputs.y);
  const double norm_x = operator_norm(fx);
  const double norm_y = operator_norm(fy);
  std::optional<TrialResult> worst;
  for (double lambda : options.lambda_grid) {
    const HermitianMatrix fmix = map(mix(lambda, trial.inputs.x, trial.inputs.y));
    const TrialResult r = compare(sense, fx, norm_x, fy, norm_y, fmix, lambda, trial_index);
    if (!worst || r.relative_margin() < worst->relative_margin()) worst = r;
  }
  return {*worst};
}

json constants_to_json(const MapConstants& constants) {
  json out = json::array();
  for (const auto& m : constants.matrices) out.push_back(matrix_to_json(m));
  return out;
}

}  // namespace

CertificationReport certify(const MapSpec& spec, const CertifyOptions& options) {
  spec.validate();
  if (options.trials < 1) throw Error(ErrorKind::BadParameter, "trials must be at least 1");
  if (!(options.tolerance > 0.0)) throw Error(ErrorKind::BadParameter, "tolerance must be positive");
  if (options.lambda_grid.empty()) throw Error(ErrorKind::BadParameter, "lambda grid is empty");
  for (double lambda : options.lambda_grid) require_lambda(lambda);
  if (options.eigenvalue_range.log10_min > options.eigenvalue_range.log10_max) {
    throw Error(ErrorKind::BadParameter, "eigenvalue range is empty");
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::optional<TrialOutcome>> outcomes(static_cast<std::size_t>(options.trials));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(options.trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < options.trials; t = next++) {
      try {
        outcomes[static_cast<std::size_t>(t)] = run_trial(spec, options, t);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    }
  };
  int jobs = options.jobs > 0 ? options.jobs : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, options.trials);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  // Strict comparison in trial order keeps the lowest trial index on ties.
  const TrialResult* worst = nullptr;
  for (const auto& outcome : outcomes) {
    if (!worst || outcome->worst.relative_margin() < worst->relative_margin()) worst = &outcome->worst;
  }

  CertificationReport report;
  report.map_id = to_string(spec.map_id);
  if (spec.map_id != MapId::NEG_T4) report.p = spec.p;
  report.dim = spec.dim;
  report.trials = options.trials;
  report.seed = options.seed;
  report.tolerance = options.tolerance;
  report.lambda_grid = options.lambda_grid;
  report.worst_margin = worst->relative_margin();
  report.violation = report.worst_margin < -options.tolerance;
  if (report.violation || options.emit_worst) {
    const Trial trial = draw_trial(spec, options, worst->trial_index);
    report.worst_case = {
        {"X", to_json(trial.inputs.x)},
        {"Y", to_json(trial.inputs.y)},
        {"lambda", worst->lambda},
        {"trial_index", worst->trial_index},
        {"margin", worst->margin},
        {"scale", worst->scale},
        {"constants", constants_to_json(trial.constants)},
    };
  }
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

TrialResult replay_worst_case(const MapSpec& spec, const json& worst_case) {
  if (!worst_case.is_object() || !worst_case.contains("X") || !worst_case.contains("Y") ||
      !worst_case.contains("lambda")) {
    throw Error(ErrorKind::BadInput, "worst_case needs X, Y and lambda");
  }
  MapConstants constants;
  if (worst_case.contains("constants")) {
    for (const auto& m : worst_case["constants"]) constants.matrices.push_back(matrix_from_json(m));
  }
  const OperatorMap map = build_map(spec, constants);
  const InputTuple x = hermitian_list_from_json(worst_case["X"]);
  const InputTuple y = hermitian_list_from_json(worst_case["Y"]);
  const int index = worst_case.value("trial_index", 0);
  return concavity_trial(map, sense_of(spec.map_id), x, y, worst_case["lambda"].get<double>(), index);
}

json strip_wall_time(json j) {
  if (j.is_object()) {
    j.erase("wall_time_ms");
    for (auto& item : j.items()) item.value() = strip_wall_time(item.value());
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_wall_time(value);
  }
  return j;
}

}  // namespace opcvx
