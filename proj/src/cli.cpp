// SPDX-License-Identifier: Apache-2.0
#include "opcvx/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "opcvx/certify.hpp"
#include "opcvx/errors.hpp"
#include "opcvx/matrix_json.hpp"
#include "opcvx/suite.hpp"

namespace opcvx {

using nlohmann::json;

namespace {

struct CliConfig {
  std::string map;
  std::string check;
  std::string kernel;
  std::string input;
  std::string out;
  std::string config;
  double p = 0.5;
  int dim = 2;
  int trials = 200;
  std::uint64_t seed = 42;
  double tol = 1e-8;
  std::vector<double> lambda_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  int quadrature_nodes = 64;
  int probes = 8;
  int samples = 0;
  int jobs = 0;
  std::vector<double> args;
  bool emit_worst = false;
  bool stress = false;
  bool tensor = false;
  bool integral = false;
};

// Binds a config-file key to the option it shadows and a setter for its value.
struct ConfigBinding {
  CLI::Option* option;
  std::function<void(const json&)> assign;
};

using Bindings = std::map<std::string, ConfigBinding>;

template <typename T>
void bind_option(CLI::App* app, Bindings& bindings, const std::string& key, T& target, const std::string& help) {
  std::string flag = "--" + key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  CLI::Option* option;
  if constexpr (std::is_same_v<T, bool>) {
    option = app->add_flag(flag, target, help);
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    option = app->add_option(flag, target, help)->delimiter(',')->capture_default_str();
  } else {
    option = app->add_option(flag, target, help)->capture_default_str();
  }
  bindings[key] = {option, [&target](const json& value) { target = value.get<T>(); }};
}

// Returns the keys taken from the file.
std::set<std::string> apply_config(const std::string& path, const Bindings& bindings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::BadInput, "cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadInput, std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::BadInput, "config file must hold a JSON object");
  std::set<std::string> applied;
  for (const auto& item : j.items()) {
    const auto it = bindings.find(item.key());
    if (it == bindings.end()) throw Error(ErrorKind::BadInput, "unknown config key '" + item.key() + "'");
    if (it->second.option->count() > 0) continue;  // flags win
    try {
      it->second.assign(item.value());
    } catch (const json::exception&) {
      throw Error(ErrorKind::BadInput, "config key '" + item.key() + "' has the wrong type");
    }
    applied.insert(item.key());
  }
  return applied;
}

void write_json(const std::string& path, const json& j) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::BadInput, "cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::BadInput, "failed writing " + path);
}

int resolve_jobs(int jobs) {
  return jobs > 0 ? jobs : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

void print_summary(std::ostream& out, const CertificationReport& r) {
  out << std::left << std::setw(12) << r.map_id;
  if (r.p) out << " p=" << *r.p;
  if (r.dim) out << " dim=" << *r.dim;
  out << " trials=" << r.trials << " worst_margin=" << std::setprecision(6) << r.worst_margin
      << " tol=" << r.tolerance << (r.violation ? "  VIOLATION" : "  ok") << '\n';
}

int run_certify(const CliConfig& c, std::ostream& out) {
  if (c.map.empty()) throw Error(ErrorKind::BadParameter, "certify needs --map (flag or config key)");
  MapSpec spec;
  spec.map_id = map_id_from_string(c.map);
  spec.p = c.p;
  spec.dim = c.dim;
  spec.probe_count = c.probes;
  spec.quadrature_nodes = c.quadrature_nodes;
  spec.commuting_model = c.tensor ? CommutingModel::Tensor : CommutingModel::SharedBasis;
  CertifyOptions options;
  options.trials = c.trials;
  options.seed = c.seed;
  options.tolerance = c.tol;
  options.lambda_grid = c.lambda_grid;
  options.jobs = resolve_jobs(c.jobs);
  options.emit_worst = c.emit_worst;
  if (c.stress) options.eigenvalue_range = {-4.0, 4.0};
  const CertificationReport report = certify(spec, options);
  print_summary(out, report);
  write_json(c.out, report.to_json());
  return report.violation ? kExitViolation : kExitPass;
}

int run_crosscheck(const CliConfig& c, bool p_given, bool tol_given, std::ostream& out) {
  if (c.check.empty()) throw Error(ErrorKind::BadParameter, "crosscheck needs --check (flag or config key)");
  CrosscheckParams params;
  params.seed = c.seed;
  params.quadrature_nodes = c.quadrature_nodes;
  if (p_given) params.p_grid = {c.p};
  if (c.samples > 0) params.samples = c.samples;
  if (tol_given) params.tolerance = c.tol;
  const CertificationReport report = crosscheck(check_id_from_string(c.check), params);
  print_summary(out, report);
  write_json(c.out, report.to_json());
  return report.violation ? kExitViolation : kExitPass;
}

int run_eval(const CliConfig& c, std::ostream& out) {
  if (!c.kernel.empty() == !c.map.empty()) {
    throw Error(ErrorKind::BadParameter, "eval needs exactly one of --kernel or --map");
  }
  if (!c.kernel.empty()) {
    const ScalarKernel kernel(kernel_id_from_string(c.kernel), c.p);
    const double value = c.integral
                             ? kernel.integral(c.args, QuadratureRule::gauss_legendre(c.quadrature_nodes))
                             : kernel.eval(c.args);
    out << std::setprecision(17) << value << '\n';
    write_json(c.out, {{"kernel", c.kernel}, {"p", c.p}, {"args", c.args}, {"value", value}});
    return kExitPass;
  }
  if (c.input.empty()) throw Error(ErrorKind::BadParameter, "eval --map needs --input <matrices.json>");
  std::ifstream in(c.input);
  if (!in) throw Error(ErrorKind::BadInput, "cannot open " + c.input);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadInput, std::string("input is not valid JSON: ") + e.what());
  }
  const std::vector<HermitianMatrix> inputs = hermitian_list_from_json(j);
  MapSpec spec;
  spec.map_id = map_id_from_string(c.map);
  spec.p = c.p;
  spec.dim = inputs.front().dim();
  spec.probe_count = c.probes;
  spec.quadrature_nodes = c.quadrature_nodes;
  const OperatorMap map = build_map(spec, c.seed);
  const HermitianMatrix value = map(inputs);
  const json result = to_json(value);
  out << result.dump() << '\n';
  write_json(c.out, {{"map_id", c.map}, {"p", c.p}, {"value", result}});
  return kExitPass;
}

int run_suite_command(const CliConfig& c, bool p_given, bool dim_given, std::ostream& out) {
  SuiteOptions options;
  options.trials = c.trials;
  options.seed = c.seed;
  options.tolerance = c.tol;
  options.lambda_grid = c.lambda_grid;
  options.quadrature_nodes = c.quadrature_nodes;
  options.jobs = resolve_jobs(c.jobs);
  options.stress = c.stress;
  if (p_given) options.p = c.p;
  if (dim_given) options.dim = c.dim;
  const SuiteResult result = run_suite(options);
  for (const auto& r : result.report["certifications"]) {
    out << r["map_id"].get<std::string>() << " p=" << r["p"] << " dim=" << r["dim"]
        << " worst_margin=" << r["worst_margin"] << (r["violation"].get<bool>() ? "  VIOLATION" : "  ok") << '\n';
  }
  for (const auto& r : result.report["crosschecks"]) {
    out << r["map_id"].get<std::string>() << " max_deviation=" << r["details"]["max_deviation"]
        << (r["violation"].get<bool>() ? "  DEVIATION" : "  ok") << '\n';
  }
  const auto& control = result.report["negative_control"];
  out << "NEG_T4 dim=" << control["dim"] << " worst_margin=" << control["worst_margin"]
      << (control["violation"].get<bool>() ? "  fired" : "  DID NOT FIRE") << '\n';
  out << (result.passed ? "suite passed" : "suite FAILED") << '\n';
  write_json(c.out, result.report);
  return result.passed ? kExitPass : kExitViolation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized Loewner-order certification of operator concavity and convexity"};
  app.require_subcommand(1);
  CliConfig c;

  auto* certify_cmd = app.add_subcommand("certify", "certify one map's concavity/convexity");
  auto* crosscheck_cmd = app.add_subcommand("crosscheck", "run an identity crosscheck");
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a kernel or a map");
  auto* suite_cmd = app.add_subcommand("suite", "run every certification, crosscheck and the negative control");

  std::map<CLI::App*, Bindings> bindings;
  {
    Bindings& b = bindings[certify_cmd];
    bind_option(certify_cmd, b, "map", c.map, "map id, e.g. THM2.1");
    bind_option(certify_cmd, b, "p", c.p, "map parameter p");
    bind_option(certify_cmd, b, "dim", c.dim, "matrix dimension");
    bind_option(certify_cmd, b, "trials", c.trials, "number of random trials");
    bind_option(certify_cmd, b, "seed", c.seed, "run seed");
    bind_option(certify_cmd, b, "tol", c.tol, "relative tolerance");
    bind_option(certify_cmd, b, "lambda_grid", c.lambda_grid, "mixing weights, comma separated");
    bind_option(certify_cmd, b, "quadrature_nodes", c.quadrature_nodes, "Gauss-Legendre nodes");
    bind_option(certify_cmd, b, "probes", c.probes, "probe directions per trial for trace-form maps");
    bind_option(certify_cmd, b, "jobs", c.jobs, "worker threads (0 = available parallelism)");
    bind_option(certify_cmd, b, "out", c.out, "JSON report path");
    bind_option(certify_cmd, b, "emit_worst", c.emit_worst, "embed the worst case even without a violation");
    bind_option(certify_cmd, b, "stress", c.stress, "eigenvalues in [1e-4, 1e4], tolerance 1e-6 unless --tol is given");
    bind_option(certify_cmd, b, "tensor", c.tensor, "sample commuting tuples on tensor factors");
  }
  {
    Bindings& b = bindings[crosscheck_cmd];
    bind_option(crosscheck_cmd, b, "check", c.check, "QUAD, PF2-F35, FD-FRECHET or TRACE-IDENT");
    bind_option(crosscheck_cmd, b, "p", c.p, "restrict the p grid to one value");
    bind_option(crosscheck_cmd, b, "seed", c.seed, "run seed");
    bind_option(crosscheck_cmd, b, "tol", c.tol, "override the check's tolerance");
    bind_option(crosscheck_cmd, b, "samples", c.samples, "random samples per configuration");
    bind_option(crosscheck_cmd, b, "quadrature_nodes", c.quadrature_nodes, "Gauss-Legendre nodes");
    bind_option(crosscheck_cmd, b, "out", c.out, "JSON report path");
  }
  {
    Bindings& b = bindings[eval_cmd];
    bind_option(eval_cmd, b, "kernel", c.kernel, "kernel id: G21 F23 H25 F33 F34 F35 LIEB");
    bind_option(eval_cmd, b, "map", c.map, "map id; inputs from --input");
    bind_option(eval_cmd, b, "p", c.p, "parameter p");
    bind_option(eval_cmd, b, "args", c.args, "kernel arguments, comma separated");
    bind_option(eval_cmd, b, "integral", c.integral, "evaluate the kernel's integral form instead");
    bind_option(eval_cmd, b, "input", c.input, "JSON file with a matrix or an array of matrices");
    bind_option(eval_cmd, b, "seed", c.seed, "seed for the map's random probes");
    bind_option(eval_cmd, b, "probes", c.probes, "probe directions for trace-form maps");
    bind_option(eval_cmd, b, "quadrature_nodes", c.quadrature_nodes, "Gauss-Legendre nodes");
    bind_option(eval_cmd, b, "out", c.out, "JSON output path");
  }
  {
    Bindings& b = bindings[suite_cmd];
    bind_option(suite_cmd, b, "trials", c.trials, "trials per certification");
    bind_option(suite_cmd, b, "seed", c.seed, "run seed");
    bind_option(suite_cmd, b, "tol", c.tol, "relative tolerance");
    bind_option(suite_cmd, b, "lambda_grid", c.lambda_grid, "mixing weights, comma separated");
    bind_option(suite_cmd, b, "quadrature_nodes", c.quadrature_nodes, "Gauss-Legendre nodes");
    bind_option(suite_cmd, b, "p", c.p, "use this p for every map instead of the default set");
    bind_option(suite_cmd, b, "dim", c.dim, "use this dimension instead of {2, 3, 5}");
    bind_option(suite_cmd, b, "jobs", c.jobs, "worker threads (0 = available parallelism)");
    bind_option(suite_cmd, b, "stress", c.stress, "eigenvalues in [1e-4, 1e4], tolerance 1e-6 unless --tol is given");
    bind_option(suite_cmd, b, "out", c.out, "JSON report path");
  }
  for (auto& [cmd, b] : bindings) cmd->add_option("--config", c.config, "JSON file with flag values (flags win)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    Bindings& b = bindings[cmd];
    std::set<std::string> from_config;
    if (!c.config.empty()) from_config = apply_config(c.config, b);
    auto given = [&](const std::string& key) {
      return b.count(key) > 0 && (b.at(key).option->count() > 0 || from_config.count(key) > 0);
    };
    if (c.stress && !given("tol")) c.tol = 1e-6;
    if (cmd == certify_cmd) return run_certify(c, out);
    if (cmd == crosscheck_cmd) return run_crosscheck(c, given("p"), given("tol"), out);
    if (cmd == eval_cmd) return run_eval(c, out);
    return run_suite_command(c, given("p"), given("dim"), out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace opcvx
