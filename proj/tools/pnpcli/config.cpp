#include "config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "pnp/errors.hpp"

namespace pnpcli {

namespace fs = std::filesystem;
using pnp::ConfigError;

namespace {

void check_known_keys(const json& obj, const std::set<std::string>& allowed,
                      const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.contains(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + context);
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

std::string require_string(const json& obj, const std::string& key,
                           const std::string& context) {
  if (!obj.contains(key) || !obj.at(key).is_string())
    throw ConfigError("missing or non-string '" + key + "' in " + context);
  return obj.at(key).get<std::string>();
}

// Applies "a.b.c=value" to the JSON tree; value parsed as JSON when possible,
// as a plain string otherwise.
void apply_override(json& root, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like key.path=value: " + assignment);
  std::string path = assignment.substr(0, eq);
  std::string raw = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;  // unquoted string
  }

  json* node = &root;
  std::size_t start = 0;
  for (;;) {
    auto dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ConfigError("empty key segment in override: " + assignment);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (!node->is_object() && !node->is_null())
      throw ConfigError("override path crosses a non-object: " + assignment);
    start = dot + 1;
  }
}

DenoiserConfig parse_denoiser(const json& block) {
  check_known_keys(block,
                   {"kind", "mu", "tau", "max_inner", "inner_tol", "weights", "means",
                    "variances", "noise_var", "command", "timeout_sec"},
                   "denoiser block");
  DenoiserConfig cfg;
  cfg.kind = require_string(block, "kind", "denoiser block");
  cfg.has_mu = block.contains("mu");
  cfg.mu = get_or(block, "mu", 1.0);

  if (cfg.kind == "tv-prox") {
    cfg.tv.tau = get_or(block, "tau", 1.0);
    cfg.tv.max_inner = get_or(block, "max_inner", 200);
    cfg.tv.inner_tol = get_or(block, "inner_tol", 1e-9);
    if (cfg.tv.tau < 0) throw ConfigError("tv-prox tau must be >= 0");
  } else if (cfg.kind == "gmm-mmse") {
    cfg.gmm_prior.weights = get_or(block, "weights", std::vector<double>{});
    cfg.gmm_prior.means = get_or(block, "means", std::vector<double>{});
    cfg.gmm_prior.variances = get_or(block, "variances", std::vector<double>{});
    cfg.gmm_noise_var = get_or(block, "noise_var", 1.0);
    cfg.gmm_prior.validate();
    if (!(cfg.gmm_noise_var > 0)) throw ConfigError("gmm-mmse noise_var must be > 0");
  } else if (cfg.kind == "external") {
    cfg.command = get_or(block, "command", std::vector<std::string>{});
    cfg.timeout_sec = get_or(block, "timeout_sec", 60.0);
    if (cfg.command.empty()) throw ConfigError("external denoiser needs a command");
  } else {
    throw ConfigError("unknown denoiser kind: " + cfg.kind);
  }
  return cfg;
}

SolverBlock parse_solver(const json& block) {
  check_known_keys(block,
                   {"algorithm", "gamma", "mu", "max_iters", "fp_tol", "x0",
                    "allow_large_gamma"},
                   "solver block");
  SolverBlock solver;
  std::string algorithm = get_or<std::string>(block, "algorithm", "fista");
  if (algorithm == "admm")
    solver.algorithm = pnp::Algorithm::admm;
  else if (algorithm == "ista")
    solver.algorithm = pnp::Algorithm::ista;
  else if (algorithm == "fista")
    solver.algorithm = pnp::Algorithm::fista;
  else
    throw ConfigError("unknown solver algorithm: " + algorithm);

  solver.config.gamma = get_or(block, "gamma", 1.0);
  solver.has_mu = block.contains("mu");
  solver.config.mu = get_or(block, "mu", 1.0);
  solver.config.max_iters = get_or(block, "max_iters", 200);
  solver.config.fp_tol = get_or(block, "fp_tol", 1e-6);
  solver.config.allow_large_gamma = get_or(block, "allow_large_gamma", false);

  std::string x0 = get_or<std::string>(block, "x0", "adjoint");
  if (x0 == "adjoint")
    solver.config.x0_policy = pnp::X0Policy::adjoint_of_y;
  else if (x0 == "zeros")
    solver.config.x0_policy = pnp::X0Policy::zeros;
  else
    throw ConfigError("solver x0 must be 'adjoint' or 'zeros'");

  solver.config.validate();
  return solver;
}

SweepBlock parse_sweep(const json& block) {
  check_known_keys(block, {"parameter", "grid", "jobs"}, "sweep block");
  SweepBlock sweep;
  std::string parameter = get_or<std::string>(block, "parameter", "mu");
  if (parameter == "mu")
    sweep.parameter = pnp::SweepParameter::mu;
  else if (parameter == "lambda")
    sweep.parameter = pnp::SweepParameter::lambda;
  else if (parameter == "gamma")
    sweep.parameter = pnp::SweepParameter::gamma;
  else
    throw ConfigError("sweep parameter must be mu, lambda, or gamma");

  if (!block.contains("grid")) {
    // Default mu grid: 40 log-spaced points in [10^-1.5, 10^0.5].
    if (sweep.parameter != pnp::SweepParameter::mu)
      throw ConfigError("sweep block needs a grid for lambda/gamma sweeps");
    sweep.grid = pnp::log_spaced_grid(std::pow(10.0, -1.5), std::pow(10.0, 0.5), 40);
    sweep.jobs = get_or(block, "jobs", 0);
    return sweep;
  }
  const json& grid = block.at("grid");
  if (grid.is_object() && grid.contains("values")) {
    check_known_keys(grid, {"values"}, "sweep grid");
    sweep.grid = grid.at("values").get<std::vector<double>>();
  } else if (grid.is_object()) {
    check_known_keys(grid, {"log_min", "log_max", "count"}, "sweep grid");
    double lo = get_or(grid, "log_min", 0.0);
    double hi = get_or(grid, "log_max", 0.0);
    int count = get_or(grid, "count", 0);
    sweep.grid = pnp::log_spaced_grid(lo, hi, count);
  } else {
    throw ConfigError("sweep grid must be an object with values or log_min/log_max/count");
  }
  sweep.jobs = get_or(block, "jobs", 0);
  return sweep;
}

void check_input_files_exist(const RunConfig& cfg) {
  auto must_exist = [](const std::string& path, const char* what) {
    if (!path.empty() && !fs::exists(path))
      throw ConfigError(std::string(what) + " file does not exist: " + path);
  };
  must_exist(cfg.paths.truth, "truth");
  must_exist(cfg.paths.mask, "mask");
  must_exist(cfg.paths.kernel, "kernel");
  // measurements/metadata are outputs for simulate; commands that consume
  // them check existence themselves.
}

}  // namespace

RunConfig load_run_config(const std::string& config_path,
                          const std::vector<std::string>& overrides,
                          bool need_denoiser_and_solver) {
  json root;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file: " + config_path);
    try {
      root = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  } else {
    root = json::object();
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");

  for (const auto& assignment : overrides) apply_override(root, assignment);

  check_known_keys(root,
                   {"problem", "seed", "input_snr_db", "paths", "forward", "denoiser",
                    "solver", "sweep"},
                   "config root");

  RunConfig cfg;
  cfg.resolved = root;
  cfg.overrides = overrides;

  cfg.problem = problem_from_name(require_string(root, "problem", "config root"));
  cfg.seed = get_or<std::uint64_t>(root, "seed", 0);
  cfg.input_snr_db = get_or(root, "input_snr_db", 30.0);

  if (root.contains("paths")) {
    const json& paths = root.at("paths");
    check_known_keys(paths,
                     {"truth", "measurements", "metadata", "mask", "kernel",
                      "output_dir"},
                     "paths block");
    cfg.paths.truth = get_or<std::string>(paths, "truth", "");
    cfg.paths.measurements = get_or<std::string>(paths, "measurements", "");
    cfg.paths.metadata = get_or<std::string>(paths, "metadata", "");
    cfg.paths.mask = get_or<std::string>(paths, "mask", "");
    cfg.paths.kernel = get_or<std::string>(paths, "kernel", "");
    cfg.paths.output_dir = get_or<std::string>(paths, "output_dir", ".");
  }

  if (root.contains("forward")) {
    const json& fwd = root.at("forward");
    check_known_keys(fwd, {"sampling_rate", "mask_tolerance", "decimation"},
                     "forward block");
    cfg.forward.sampling_rate = get_or(fwd, "sampling_rate", 1.0 / 3.0);
    cfg.forward.mask_tolerance = get_or(fwd, "mask_tolerance", 0.02);
    cfg.forward.decimation = get_or(fwd, "decimation", 2);
    if (!(cfg.forward.sampling_rate > 0.0 && cfg.forward.sampling_rate <= 1.0))
      throw ConfigError("forward.sampling_rate must be in (0, 1]");
    if (cfg.forward.decimation < 1)
      throw ConfigError("forward.decimation must be >= 1");
  }

  if (root.contains("denoiser")) cfg.denoiser = parse_denoiser(root.at("denoiser"));
  if (root.contains("solver")) cfg.solver = parse_solver(root.at("solver"));
  if (root.contains("sweep")) cfg.sweep = parse_sweep(root.at("sweep"));

  if (cfg.denoiser && cfg.denoiser->has_mu && cfg.solver.has_mu)
    throw ConfigError(
        "mu given in both the denoiser and solver blocks; pick one source");

  if (need_denoiser_and_solver && !cfg.denoiser)
    throw ConfigError("this command needs a denoiser block");

  check_input_files_exist(cfg);
  return cfg;
}

pnp::DenoiserPtr build_denoiser(const DenoiserConfig& cfg) {
  if (cfg.kind == "tv-prox") return pnp::make_tv_prox_denoiser(cfg.tv);
  if (cfg.kind == "gmm-mmse")
    return pnp::make_gmm_mmse_denoiser(cfg.gmm_prior, cfg.gmm_noise_var);
  if (cfg.kind == "external")
    return pnp::make_external_denoiser(cfg.command, cfg.timeout_sec);
  throw ConfigError("unknown denoiser kind: " + cfg.kind);
}

double effective_mu(const RunConfig& cfg) {
  if (cfg.denoiser && cfg.denoiser->has_mu) return cfg.denoiser->mu;
  return cfg.solver.config.mu;
}

std::string problem_name(Problem p) {
  switch (p) {
    case Problem::denoise: return "denoise";
    case Problem::fourier: return "fourier";
    case Problem::super_resolution: return "super-resolution";
  }
  return "?";
}

Problem problem_from_name(const std::string& name) {
  if (name == "denoise") return Problem::denoise;
  if (name == "fourier") return Problem::fourier;
  if (name == "super-resolution") return Problem::super_resolution;
  throw ConfigError("unknown problem kind: " + name +
                    " (expected denoise, fourier, or super-resolution)");
}

std::string algorithm_name(pnp::Algorithm a) {
  switch (a) {
    case pnp::Algorithm::admm: return "admm";
    case pnp::Algorithm::ista: return "ista";
    case pnp::Algorithm::fista: return "fista";
  }
  return "?";
}

}  // namespace pnpcli
