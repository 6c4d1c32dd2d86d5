#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pnp/image_io.hpp"
#include "pnp/oracles.hpp"

namespace pnpcli {

namespace fs = std::filesystem;
using pnp::ConfigError;
using pnp::Error;
using pnp::Image;

namespace {

Image read_image_any(const std::string& path) {
  if (path.ends_with(".pgm") || path.ends_with(".PGM")) return pnp::read_pgm(path);
  return pnp::read_imgf64(path);
}

void write_pgm_preview(const Image& img, const std::string& path) {
  if (img.channels == 1) {
    pnp::write_pgm(img, path);
    return;
  }
  Image gray = Image::zeros(img.width, img.height, 1);
  for (int c = 0; c < img.channels; ++c) {
    auto plane = img.plane(c);
    for (std::size_t i = 0; i < gray.size(); ++i) gray.data[i] += plane[i];
  }
  gray *= 1.0 / img.channels;
  pnp::write_pgm(gray, path);
}

std::string default_meta_path(const std::string& measurements) {
  if (measurements.ends_with(".imgf64"))
    return measurements.substr(0, measurements.size() - 7) + ".meta.json";
  return measurements + ".meta.json";
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metadata file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("metadata is not valid JSON: ") + e.what());
  }
}

void write_provenance(const RunConfig& cfg, const std::string& command,
                      const std::vector<std::string>& artifacts,
                      const std::string& sidecar_path) {
  json prov;
  prov["command"] = command;
  prov["config"] = cfg.resolved;
  prov["overrides"] = cfg.overrides;
  prov["artifacts"] = artifacts;
  write_json_file(prov, sidecar_path);
}

struct BuiltProblem {
  pnp::ForwardModel model;
  std::string mask_file;    // file the mask was read from / written to
  std::string kernel_file;  // likewise for the kernel
  double achieved_rate = 0.0;
  int line_count = 0;
};

// Model for cmd_simulate: built from config (mask/kernel generated if no file
// was supplied); generated payloads are written next to the measurements.
BuiltProblem build_model_for_simulate(const RunConfig& cfg, const Image& truth,
                                      const fs::path& out_dir) {
  switch (cfg.problem) {
    case Problem::denoise: {
      return {pnp::ForwardModel::identity(truth.width, truth.height, truth.channels),
              "", "", 1.0, 0};
    }
    case Problem::fourier: {
      pnp::RadialMask mask;
      std::string mask_file;
      if (!cfg.paths.mask.empty()) {
        mask = pnp::mask_from_image(pnp::read_imgf64(cfg.paths.mask));
        mask_file = cfg.paths.mask;
      } else {
        mask = pnp::make_radial_mask(truth.width, truth.height,
                                     cfg.forward.sampling_rate,
                                     cfg.forward.mask_tolerance);
        mask_file = (out_dir / "mask.imgf64").string();
        pnp::write_imgf64(pnp::mask_to_image(mask), mask_file);
      }
      double rate = mask.rate();
      int lines = mask.line_count;
      return {pnp::ForwardModel::masked_fourier(std::move(mask), truth.channels),
              mask_file, "", rate, lines};
    }
    case Problem::super_resolution: {
      pnp::BlurKernel kernel;
      std::string kernel_file;
      if (!cfg.paths.kernel.empty()) {
        kernel = pnp::kernel_from_image(pnp::read_imgf64(cfg.paths.kernel));
        kernel_file = cfg.paths.kernel;
      } else {
        kernel = pnp::gaussian_blur_kernel();
        kernel_file = (out_dir / "kernel.imgf64").string();
        pnp::write_imgf64(pnp::kernel_to_image(kernel), kernel_file);
      }
      return {pnp::ForwardModel::blur_downsample(truth.width, truth.height,
                                                 std::move(kernel),
                                                 cfg.forward.decimation,
                                                 truth.channels),
              "", kernel_file, 1.0, 0};
    }
  }
  throw Error("unreachable problem kind");
}

// Model for reconstruct/sweep: rebuilt exactly from the metadata sidecar.
pnp::ForwardModel build_model_from_meta(const json& meta, const fs::path& meta_dir) {
  Problem problem = problem_from_name(meta.at("problem").get<std::string>());
  int w = meta.at("input").at("width").get<int>();
  int h = meta.at("input").at("height").get<int>();
  int c = meta.at("input").at("channels").get<int>();
  switch (problem) {
    case Problem::denoise:
      return pnp::ForwardModel::identity(w, h, c);
    case Problem::fourier: {
      fs::path mask_path = meta.at("mask").get<std::string>();
      if (mask_path.is_relative()) mask_path = meta_dir / mask_path;
      auto mask = pnp::mask_from_image(pnp::read_imgf64(mask_path.string()));
      return pnp::ForwardModel::masked_fourier(std::move(mask), c);
    }
    case Problem::super_resolution: {
      fs::path kernel_path = meta.at("kernel").get<std::string>();
      if (kernel_path.is_relative()) kernel_path = meta_dir / kernel_path;
      auto kernel = pnp::kernel_from_image(pnp::read_imgf64(kernel_path.string()));
      return pnp::ForwardModel::blur_downsample(w, h, std::move(kernel),
                                                meta.at("decimation").get<int>(), c);
    }
  }
  throw Error("unreachable problem kind");
}

struct LoadedProblem {
  pnp::ForwardModel model;
  pnp::MeasurementVector y;
  std::optional<Image> truth;
  json meta;
};

LoadedProblem load_problem(const RunConfig& cfg) {
  if (cfg.paths.measurements.empty())
    throw ConfigError("paths.measurements is required for this command");
  if (!fs::exists(cfg.paths.measurements))
    throw ConfigError("measurements file does not exist: " + cfg.paths.measurements);

  std::string meta_path = cfg.paths.metadata.empty()
                              ? default_meta_path(cfg.paths.measurements)
                              : cfg.paths.metadata;
  if (!fs::exists(meta_path))
    throw ConfigError("metadata file does not exist: " + meta_path);

  json meta = load_json_file(meta_path);
  auto model = build_model_from_meta(meta, fs::path(meta_path).parent_path());

  pnp::Domain domain = meta.at("domain").get<std::string>() == "frequency"
                           ? pnp::Domain::frequency
                           : pnp::Domain::spatial;
  auto y = pnp::measurement_from_image(pnp::read_imgf64(cfg.paths.measurements), domain);
  if (y.size() != model.output_size())
    throw ConfigError("measurements do not match the model described by the metadata");

  LoadedProblem problem{std::move(model), std::move(y), std::nullopt, std::move(meta)};
  if (!cfg.paths.truth.empty()) problem.truth = read_image_any(cfg.paths.truth);
  return problem;
}

pnp::SolverConfig solver_config_with_mu(const RunConfig& cfg) {
  pnp::SolverConfig config = cfg.solver.config;
  config.mu = effective_mu(cfg);
  return config;
}

std::string format_snr(double snr) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", snr);
  return buffer;
}

}  // namespace

void cmd_simulate(const RunConfig& cfg) {
  if (cfg.paths.truth.empty())
    throw ConfigError("simulate needs paths.truth");
  Image truth = read_image_any(cfg.paths.truth);

  fs::path out_dir(cfg.paths.output_dir);
  fs::create_directories(out_dir);

  BuiltProblem built = build_model_for_simulate(cfg, truth, out_dir);
  auto problem = pnp::simulate_problem(truth, built.model, cfg.input_snr_db, cfg.seed);

  std::string measurements_path = cfg.paths.measurements.empty()
                                      ? (out_dir / "measurements.imgf64").string()
                                      : cfg.paths.measurements;
  pnp::write_imgf64(pnp::measurement_to_image(problem.y), measurements_path);

  json meta;
  meta["problem"] = problem_name(cfg.problem);
  meta["input"] = {{"width", truth.width},
                   {"height", truth.height},
                   {"channels", truth.channels}};
  meta["domain"] = problem.y.domain == pnp::Domain::frequency ? "frequency" : "spatial";
  meta["sigma"] = problem.sigma;
  meta["seed"] = cfg.seed;
  meta["requested_input_snr_db"] = cfg.input_snr_db;
  meta["achieved_input_snr_db"] = problem.achieved_input_snr_db;
  meta["truth"] = cfg.paths.truth;
  if (cfg.problem == Problem::fourier) {
    meta["mask"] = fs::path(built.mask_file).filename().string();
    meta["sampling_rate"] = built.achieved_rate;
    meta["line_count"] = built.line_count;
  }
  if (cfg.problem == Problem::super_resolution) {
    meta["kernel"] = fs::path(built.kernel_file).filename().string();
    meta["decimation"] = cfg.forward.decimation;
  }
  std::string meta_path = default_meta_path(measurements_path);
  write_json_file(meta, meta_path);

  std::vector<std::string> artifacts{measurements_path, meta_path};
  if (!built.mask_file.empty()) artifacts.push_back(built.mask_file);
  if (!built.kernel_file.empty()) artifacts.push_back(built.kernel_file);
  write_provenance(cfg, "simulate", artifacts, measurements_path + ".prov.json");

  std::cout << "measurements=" << measurements_path << " sigma=" << problem.sigma
            << " achieved_input_snr_db=" << format_snr(problem.achieved_input_snr_db)
            << "\n";
}

void cmd_reconstruct(const RunConfig& cfg) {
  auto problem = load_problem(cfg);
  auto denoiser = build_denoiser(*cfg.denoiser);
  auto config = solver_config_with_mu(cfg);

  fs::path out_dir(cfg.paths.output_dir);
  fs::create_directories(out_dir);
  const std::string trace_path = (out_dir / "trace.csv").string();

  pnp::SolverResult result;
  try {
    result = pnp::run_solver(cfg.solver.algorithm, problem.model, problem.y, denoiser,
                             config,
                             problem.truth ? &*problem.truth : nullptr);
  } catch (const pnp::DivergenceError& e) {
    std::ofstream trace(trace_path);
    pnp::write_trace_csv(trace, e.partial_result.trace);
    throw Error(std::string(e.what()) + " (trace flushed to " + trace_path + ")");
  }

  const std::string image_path = (out_dir / "reconstruction.imgf64").string();
  const std::string preview_path = (out_dir / "reconstruction.pgm").string();
  pnp::write_imgf64(result.x_final, image_path);
  write_pgm_preview(result.x_final, preview_path);
  {
    std::ofstream trace(trace_path);
    pnp::write_trace_csv(trace, result.trace);
  }

  auto ce = pnp::verify_ce(problem.model, problem.y, denoiser, config.gamma, config.mu,
                           result.x_final);
  json ce_json;
  ce_json["r_prior"] = ce.r_prior;
  ce_json["r_fidelity"] = ce.r_fidelity;
  ce_json["gamma"] = config.gamma;
  ce_json["mu"] = config.mu;
  const std::string ce_path = (out_dir / "ce_report.json").string();
  write_json_file(ce_json, ce_path);

  write_provenance(cfg, "reconstruct",
                   {image_path, preview_path, trace_path, ce_path},
                   image_path + ".prov.json");

  std::cout << "reconstruction=" << image_path << " iterations=" << result.iterations
            << " converged=" << (result.converged ? 1 : 0);
  if (problem.truth)
    std::cout << " final_snr_db=" << format_snr(pnp::snr_db(*problem.truth, result.x_final));
  std::cout << "\n";
}

void cmd_sweep(const RunConfig& cfg) {
  if (!cfg.sweep) throw ConfigError("sweep command needs a sweep block");
  auto problem = load_problem(cfg);
  if (!problem.truth)
    throw ConfigError("sweep needs paths.truth for SNR scoring");

  pnp::SweepSpec spec;
  spec.parameter = cfg.sweep->parameter;
  spec.grid = cfg.sweep->grid;
  spec.algorithm = cfg.solver.algorithm;
  spec.config = solver_config_with_mu(cfg);
  pnp::DenoiserPtr base;
  if (spec.parameter == pnp::SweepParameter::lambda) {
    if (cfg.denoiser->kind != "tv-prox")
      throw ConfigError("lambda sweeps need a tv-prox denoiser");
    spec.tv = cfg.denoiser->tv;
  } else {
    base = build_denoiser(*cfg.denoiser);
  }

  auto curve = pnp::sweep(problem.model, problem.y, *problem.truth, base, spec,
                          cfg.sweep->jobs);

  fs::path out_dir(cfg.paths.output_dir);
  fs::create_directories(out_dir);
  const std::string csv_path = (out_dir / "sweep.csv").string();
  {
    std::ofstream csv(csv_path);
    pnp::write_sweep_csv(csv, curve);
  }

  std::vector<std::string> artifacts{csv_path};
  if (curve.best.has_value()) {
    // Re-run the winning configuration to materialize its reconstruction.
    const auto& best = curve.points[*curve.best];
    pnp::SolverConfig config = spec.config;
    pnp::DenoiserPtr denoiser = base;
    switch (spec.parameter) {
      case pnp::SweepParameter::mu:
        config.mu = best.param;
        break;
      case pnp::SweepParameter::lambda: {
        auto params = spec.tv;
        params.tau = best.param * config.gamma;
        denoiser = pnp::make_tv_prox_denoiser(params);
        break;
      }
      case pnp::SweepParameter::gamma:
        config.gamma = best.param;
        break;
    }
    auto result = pnp::run_solver(spec.algorithm, problem.model, problem.y, denoiser,
                                  config, &*problem.truth);
    const std::string best_path = (out_dir / "best.imgf64").string();
    const std::string best_preview = (out_dir / "best.pgm").string();
    pnp::write_imgf64(result.x_final, best_path);
    write_pgm_preview(result.x_final, best_preview);
    artifacts.push_back(best_path);
    artifacts.push_back(best_preview);
    std::cout << "sweep=" << csv_path << " best_param=" << best.param
              << " best_snr_db=" << format_snr(best.snr_db) << "\n";
  } else {
    std::cout << "sweep=" << csv_path << " best_param=none\n";
  }
  write_provenance(cfg, "sweep", artifacts, csv_path + ".prov.json");
}

void cmd_metrics(const MetricsArgs& args) {
  Image reference = read_image_any(args.reference);
  Image test = read_image_any(args.test);
  if (!reference.same_shape(test))
    throw ConfigError("metrics: image dimensions differ");
  double snr = pnp::snr_db(reference, test);
  std::cout << "SNR_dB=" << format_snr(snr) << "\n";
  if (!args.csv_append.empty()) {
    bool fresh = !fs::exists(args.csv_append);
    std::ofstream csv(args.csv_append, std::ios::app);
    if (!csv) throw Error("cannot open CSV for append: " + args.csv_append);
    if (fresh) csv << "reference,test,snr_db\n";
    csv << args.reference << ',' << args.test << ',' << format_snr(snr) << '\n';
  }
}

void cmd_mask_gen(const MaskGenArgs& args) {
  if (args.width < 2 || args.height < 2)
    throw ConfigError("mask-gen needs --width and --height >= 2");
  if (args.output.empty()) throw ConfigError("mask-gen needs --output");
  auto mask = pnp::make_radial_mask(args.width, args.height, args.rate, args.tolerance);
  pnp::write_imgf64(pnp::mask_to_image(mask), args.output);

  json meta;
  meta["width"] = mask.width;
  meta["height"] = mask.height;
  meta["requested_rate"] = args.rate;
  meta["achieved_rate"] = mask.rate();
  meta["tolerance"] = args.tolerance;
  meta["line_count"] = mask.line_count;
  meta["includes_dc"] = mask.includes_dc;
  write_json_file(meta, args.output + ".meta.json");

  std::cout << "mask=" << args.output << " achieved_rate=" << mask.rate()
            << " line_count=" << mask.line_count << "\n";
}

void cmd_denoise(const DenoiseArgs& args) {
  Image z = pnp::read_imgf64(std::cin);
  auto denoiser = build_denoiser(args.denoiser);
  if (args.mu != 1.0) denoiser = pnp::scale_denoiser(denoiser, args.mu);
  Image out = denoiser->denoise(z);
  pnp::write_imgf64(out, std::cout);
}

}  // namespace pnpcli
