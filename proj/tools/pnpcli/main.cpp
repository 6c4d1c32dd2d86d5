#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "pnp/errors.hpp"

namespace {

// Shared flags for the config-driven subcommands. Sugar flags are turned
// into `--set` overrides so the flag always wins and shows up in provenance.
struct ConfigCliArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigCliArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "JSON run configuration");
  cmd->add_option("--set", args.overrides,
                  "Override a config key, e.g. --set solver.mu=0.5")
      ->take_all();
  auto sugar = [cmd, &args](const std::string& flag, const std::string& key,
                            const std::string& help, bool quote = false) {
    cmd->add_option_function<std::string>(
        flag,
        [&args, key, quote](const std::string& value) {
          args.overrides.push_back(key + "=" + (quote ? "\"" + value + "\"" : value));
        },
        help);
  };
  sugar("--output-dir", "paths.output_dir", "Output directory", true);
  sugar("--truth", "paths.truth", "Ground-truth image (PGM or IMGF64)", true);
  sugar("--measurements", "paths.measurements", "Measurements file", true);
  sugar("--seed", "seed", "RNG seed");
  sugar("--input-snr-db", "input_snr_db", "Input SNR for simulation (dB)");
  sugar("--problem", "problem", "Problem kind", true);
  sugar("--algorithm", "solver.algorithm", "admm | ista | fista", true);
  sugar("--gamma", "solver.gamma", "Solver step parameter");
  sugar("--mu", "solver.mu", "Denoiser scaling parameter");
  sugar("--max-iters", "solver.max_iters", "Iteration cap");
  sugar("--fp-tol", "solver.fp_tol", "Fixed-point stopping tolerance");
  sugar("--jobs", "sweep.jobs", "Parallel sweep workers (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plug-and-play image reconstruction toolkit"};
  app.require_subcommand(1);

  ConfigCliArgs sim_args, rec_args, sweep_args;
  auto* sim = app.add_subcommand("simulate", "Simulate measurements y = Hx + noise");
  add_config_options(sim, sim_args);
  auto* rec = app.add_subcommand("reconstruct", "Run a PnP reconstruction");
  add_config_options(rec, rec_args);
  auto* swp = app.add_subcommand("sweep", "Grid-sweep a parameter, score by SNR");
  add_config_options(swp, sweep_args);

  pnpcli::MetricsArgs metrics_args;
  auto* met = app.add_subcommand("metrics", "SNR between a reference and a test image");
  met->add_option("reference", metrics_args.reference, "Reference image")->required();
  met->add_option("test", metrics_args.test, "Test image")->required();
  met->add_option("--csv", metrics_args.csv_append, "Append the result to a CSV file");

  pnpcli::MaskGenArgs mask_args;
  auto* msk = app.add_subcommand("mask-gen", "Generate a radial frequency mask");
  msk->add_option("--width", mask_args.width)->required();
  msk->add_option("--height", mask_args.height)->required();
  msk->add_option("--rate", mask_args.rate, "Target sampling rate m/n");
  msk->add_option("--tolerance", mask_args.tolerance, "Relative rate tolerance");
  msk->add_option("-o,--output", mask_args.output, "Output IMGF64 path")->required();

  pnpcli::DenoiseArgs den_args;
  std::string den_kind = "tv-prox";
  std::vector<std::string> den_command;
  auto* den = app.add_subcommand(
      "denoise", "Filter one IMGF64 image from stdin to stdout");
  den->add_option("--kind", den_kind, "tv-prox | gmm-mmse | external");
  den->add_option("--tau", den_args.denoiser.tv.tau, "TV prox strength");
  den->add_option("--max-inner", den_args.denoiser.tv.max_inner);
  den->add_option("--inner-tol", den_args.denoiser.tv.inner_tol);
  den->add_option("--weights", den_args.denoiser.gmm_prior.weights)->delimiter(',');
  den->add_option("--means", den_args.denoiser.gmm_prior.means)->delimiter(',');
  den->add_option("--variances", den_args.denoiser.gmm_prior.variances)->delimiter(',');
  den->add_option("--noise-var", den_args.denoiser.gmm_noise_var);
  den->add_option("--command", den_command, "External denoiser argv")->take_all();
  den->add_option("--timeout-sec", den_args.denoiser.timeout_sec);
  den->add_option("--mu", den_args.mu, "Denoiser scaling parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0 through CLI11; real parse errors are usage
    // failures.
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      pnpcli::cmd_simulate(
          pnpcli::load_run_config(sim_args.config_path, sim_args.overrides, false));
    } else if (rec->parsed()) {
      pnpcli::cmd_reconstruct(
          pnpcli::load_run_config(rec_args.config_path, rec_args.overrides, true));
    } else if (swp->parsed()) {
      pnpcli::cmd_sweep(
          pnpcli::load_run_config(sweep_args.config_path, sweep_args.overrides, true));
    } else if (met->parsed()) {
      pnpcli::cmd_metrics(metrics_args);
    } else if (msk->parsed()) {
      pnpcli::cmd_mask_gen(mask_args);
    } else if (den->parsed()) {
      den_args.denoiser.kind = den_kind;
      den_args.denoiser.command = den_command;
      if (den_kind == "gmm-mmse") den_args.denoiser.gmm_prior.validate();
      if (den_kind == "external" && den_command.empty())
        throw pnp::ConfigError("denoise --kind external needs --command");
      pnpcli::cmd_denoise(den_args);
    }
  } catch (const pnp::ConfigError& e) {
    std::cerr << "error (usage): " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error (usage): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
