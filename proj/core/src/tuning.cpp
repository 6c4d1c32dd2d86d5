#include "pnp/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

namespace pnp {

SimulatedProblem simulate_problem(const Image& truth, const ForwardModel& model,
                                  double input_snr_db, std::uint64_t seed) {
  truth.validate();
  MeasurementVector clean = model.apply(truth);
  double clean_norm = norm2(clean);
  if (clean_norm == 0.0) throw ConfigError("simulate_problem: all-zero measurements");

  SimulatedProblem problem;
  if (std::isinf(input_snr_db) && input_snr_db > 0) {
    problem.y = std::move(clean);
    problem.sigma = 0.0;
    problem.achieved_input_snr_db = kSnrCapDb;
    return problem;
  }
  const double m = static_cast<double>(clean.size());
  problem.sigma = clean_norm / (std::sqrt(m) * std::pow(10.0, input_snr_db / 20.0));
  problem.y = add_awgn(clean, NoiseSpec{problem.sigma, seed});
  problem.achieved_input_snr_db = snr_db(clean, problem.y);
  return problem;
}

std::vector<double> log_spaced_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("log grid needs 0 < lo < hi");
  if (count < 2) throw ConfigError("log grid needs at least 2 points");
  std::vector<double> grid(count);
  const double step = (std::log10(hi) - std::log10(lo)) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = std::pow(10.0, std::log10(lo) + i * step);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

void SweepSpec::validate() const {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  for (double v : grid)
    if (!(v > 0.0)) throw ConfigError("sweep grid values must be > 0");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw ConfigError("sweep grid must be ascending");
  config.validate();
}

namespace {

SweepPoint evaluate_point(const ForwardModel& model, const MeasurementVector& y,
                          const Image& truth, const DenoiserPtr& base,
                          const SweepSpec& spec, double value) {
  SweepPoint point;
  point.param = value;
  try {
    SolverConfig config = spec.config;
    DenoiserPtr denoiser = base;
    switch (spec.parameter) {
      case SweepParameter::mu:
        config.mu = value;
        break;
      case SweepParameter::lambda: {
        TvProxParams params = spec.tv;
        params.tau = value * config.gamma;
        denoiser = make_tv_prox_denoiser(params);
        break;
      }
      case SweepParameter::gamma:
        config.gamma = value;
        break;
    }
    SolverResult result = run_solver(spec.algorithm, model, y, denoiser, config);
    point.snr_db = snr_db(truth, result.x_final);
    point.iterations = result.iterations;
    point.converged = result.converged;
  } catch (const std::exception& e) {
    point.converged = false;
    point.error = e.what();
  }
  return point;
}

}  // namespace

SweepCurve sweep(const ForwardModel& model, const MeasurementVector& y,
                 const Image& truth, const DenoiserPtr& denoiser,
                 const SweepSpec& spec, int jobs) {
  spec.validate();
  if (spec.parameter != SweepParameter::lambda && !denoiser)
    throw ConfigError("sweep needs a base denoiser");

  SweepCurve curve;
  curve.points.resize(spec.grid.size());

  if (jobs == 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp<int>(jobs, 1, static_cast<int>(spec.grid.size()));

  if (jobs == 1) {
    for (std::size_t i = 0; i < spec.grid.size(); ++i)
      curve.points[i] = evaluate_point(model, y, truth, denoiser, spec, spec.grid[i]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= spec.grid.size()) return;
        curve.points[i] = evaluate_point(model, y, truth, denoiser, spec, spec.grid[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Argmax over converged points, ties toward the smaller parameter value.
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    if (!p.converged) continue;
    if (!curve.best.has_value() || p.snr_db > curve.points[*curve.best].snr_db)
      curve.best = i;
  }
  return curve;
}

void write_sweep_csv(std::ostream& out, const SweepCurve& curve) {
  out << "param,snr_db,iters,converged\n";
  out.precision(17);
  for (const auto& p : curve.points)
    out << p.param << ',' << p.snr_db << ',' << p.iterations << ','
        << (p.converged ? 1 : 0) << '\n';
}

TvEquivalenceReport equivalence_tv(const Image& truth, const Image& noisy,
                                   std::span<const double> lambda_grid,
                                   std::span<const double> mu_grid, double gamma,
                                   int max_inner, double inner_tol) {
  if (lambda_grid.size() != mu_grid.size() || lambda_grid.empty())
    throw ConfigError("equivalence_tv needs matching nonempty grids");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0)) throw ConfigError("lambda values must be > 0");
    if (std::abs(mu_grid[i] * lambda_grid[i] - 1.0) > 1e-12)
      throw ConfigError("mu grid must be the reciprocal of the lambda grid");
  }

  TvEquivalenceReport report;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double lambda = lambda_grid[i];
    const double mu = mu_grid[i];

    Image direct = tv_prox_denoise(noisy, lambda * gamma, max_inner, inner_tol).image;
    DenoiserPtr scaled =
        scale_denoiser(make_tv_prox_denoiser({gamma, max_inner, inner_tol}), mu);
    Image via_scaling = scaled->denoise(noisy);

    TvEquivalencePair pair;
    pair.lambda = lambda;
    pair.mu = mu;
    double denom = norm2(direct);
    pair.rel_discrepancy = norm2(direct - via_scaling) / (denom > 0.0 ? denom : 1.0);
    pair.snr_direct_db = snr_db(truth, direct);
    pair.snr_scaled_db = snr_db(truth, via_scaling);
    report.max_rel_discrepancy = std::max(report.max_rel_discrepancy, pair.rel_discrepancy);
    report.max_snr_discrepancy_db =
        std::max(report.max_snr_discrepancy_db,
                 std::abs(pair.snr_direct_db - pair.snr_scaled_db));
    report.pairs.push_back(pair);
  }
  return report;
}

}  // namespace pnp
