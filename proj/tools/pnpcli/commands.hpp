#pragma once

#include <optional>
#include <string>

#include "config.hpp"

namespace pnpcli {

struct MetricsArgs {
  std::string reference;
  std::string test;
  std::string csv_append;  // optional
};

struct MaskGenArgs {
  int width = 0;
  int height = 0;
  double rate = 1.0 / 3.0;
  double tolerance = 0.02;
  std::string output;
};

struct DenoiseArgs {
  DenoiserConfig denoiser;
  double mu = 1.0;
};

void cmd_simulate(const RunConfig& cfg);
void cmd_reconstruct(const RunConfig& cfg);
void cmd_sweep(const RunConfig& cfg);
void cmd_metrics(const MetricsArgs& args);
void cmd_mask_gen(const MaskGenArgs& args);
void cmd_denoise(const DenoiseArgs& args);

}  // namespace pnpcli
