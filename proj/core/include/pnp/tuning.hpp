#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pnp/denoiser.hpp"
#include "pnp/forward_model.hpp"
#include "pnp/solver.hpp"

namespace pnp {

/// y = H(truth) + AWGN with sigma chosen from |H truth| so that the measured
/// input SNR matches the request in expectation.
struct SimulatedProblem {
  MeasurementVector y;
  double sigma = 0.0;
  double achieved_input_snr_db = 0.0;
};

SimulatedProblem simulate_problem(const Image& truth, const ForwardModel& model,
                                  double input_snr_db, std::uint64_t seed);

enum class SweepParameter { mu, lambda, gamma };

std::vector<double> log_spaced_grid(double lo, double hi, int count);

/// One solver run per grid point. mu is applied through scale_denoiser;
/// lambda rebuilds the TV denoiser with tau = lambda * gamma; gamma replaces
/// the config step size. Grid values must be positive and ascending.
struct SweepSpec {
  SweepParameter parameter = SweepParameter::mu;
  std::vector<double> grid;
  Algorithm algorithm = Algorithm::fista;
  SolverConfig config;
  TvProxParams tv;  // base TV parameters for lambda sweeps

  void validate() const;
};

struct SweepPoint {
  double param = 0.0;
  double snr_db = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string error;  // nonempty when the point failed; point is excluded from best
};

struct SweepCurve {
  std::vector<SweepPoint> points;
  /// Index of the maximal-SNR converged point; ties break toward the smaller
  /// parameter value. Empty when no point converged.
  std::optional<std::size_t> best;
};

/// `denoiser` is the base (unscaled) denoiser for mu and gamma sweeps and is
/// ignored for lambda sweeps. Points are independent; `jobs` > 1 evaluates
/// them concurrently with deterministic result ordering (0 = hardware).
SweepCurve sweep(const ForwardModel& model, const MeasurementVector& y,
                 const Image& truth, const DenoiserPtr& denoiser,
                 const SweepSpec& spec, int jobs = 1);

/// CSV with columns param,snr_db,iters,converged.
void write_sweep_csv(std::ostream& out, const SweepCurve& curve);

/// Checks that scaling a unit-strength TV prox by mu = 1/lambda reproduces
/// the directly-tuned TV prox across a (lambda, mu) grid of reciprocal pairs.
struct TvEquivalencePair {
  double lambda = 0.0;
  double mu = 0.0;
  double rel_discrepancy = 0.0;
  double snr_direct_db = 0.0;
  double snr_scaled_db = 0.0;
};

struct TvEquivalenceReport {
  std::vector<TvEquivalencePair> pairs;
  double max_rel_discrepancy = 0.0;
  double max_snr_discrepancy_db = 0.0;
};

/// For each pair (lambda, mu = 1/lambda): compares tv_prox(tau = lambda *
/// gamma) applied to `noisy` against scale_denoiser(tv_prox(tau = gamma),
/// mu). Throws ConfigError unless mu_grid is the element-wise reciprocal of
/// lambda_grid.
TvEquivalenceReport equivalence_tv(const Image& truth, const Image& noisy,
                                   std::span<const double> lambda_grid,
                                   std::span<const double> mu_grid,
                                   double gamma = 1.0, int max_inner = 2000,
                                   double inner_tol = 1e-9);

}  // namespace pnp
