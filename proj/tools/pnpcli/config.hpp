#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pnp/denoiser.hpp"
#include "pnp/solver.hpp"
#include "pnp/tuning.hpp"

namespace pnpcli {

using json = nlohmann::json;

enum class Problem { denoise, fourier, super_resolution };

struct PathsConfig {
  std::string truth;
  std::string measurements;
  std::string metadata;
  std::string mask;
  std::string kernel;
  std::string output_dir = ".";
};

struct ForwardConfig {
  double sampling_rate = 1.0 / 3.0;
  double mask_tolerance = 0.02;
  int decimation = 2;
};

struct DenoiserConfig {
  std::string kind;  // tv-prox | gmm-mmse | external
  pnp::TvProxParams tv;
  pnp::GmmPrior gmm_prior;
  double gmm_noise_var = 1.0;
  std::vector<std::string> command;
  double timeout_sec = 60.0;
  bool has_mu = false;  // "mu" key present in the denoiser block
  double mu = 1.0;
};

struct SolverBlock {
  pnp::Algorithm algorithm = pnp::Algorithm::fista;
  pnp::SolverConfig config;
  bool has_mu = false;  // "mu" key present in the solver block
};

struct SweepBlock {
  pnp::SweepParameter parameter = pnp::SweepParameter::mu;
  std::vector<double> grid;
  int jobs = 0;
};

/// Parsed and validated run configuration; `resolved` holds the effective
/// JSON (file values with flag overrides applied) for provenance sidecars.
struct RunConfig {
  Problem problem = Problem::denoise;
  std::uint64_t seed = 0;
  double input_snr_db = 30.0;
  PathsConfig paths;
  ForwardConfig forward;
  std::optional<DenoiserConfig> denoiser;
  SolverBlock solver;
  std::optional<SweepBlock> sweep;
  json resolved;
  std::vector<std::string> overrides;
};

/// Loads the config file, applies `key.path=value` overrides (flag wins),
/// validates the schema, and checks that referenced input files exist.
/// Throws pnp::ConfigError on any violation.
RunConfig load_run_config(const std::string& config_path,
                          const std::vector<std::string>& overrides,
                          bool need_denoiser_and_solver);

/// Builds the denoiser described by the config block (unscaled; the solver
/// applies mu).
pnp::DenoiserPtr build_denoiser(const DenoiserConfig& cfg);

/// Effective scaling parameter: solver.mu or denoiser.mu (never both).
double effective_mu(const RunConfig& cfg);

std::string problem_name(Problem p);
Problem problem_from_name(const std::string& name);
std::string algorithm_name(pnp::Algorithm a);

}  // namespace pnpcli
