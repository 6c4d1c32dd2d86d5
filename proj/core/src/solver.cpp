#include "pnp/solver.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace pnp {

double fista_next_q(double q_prev) {
  return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * q_prev * q_prev));
}

void SolverConfig::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("solver gamma must be > 0");
  if (!(mu > 0.0)) throw ConfigError("solver mu must be > 0");
  if (max_iters < 1) throw ConfigError("solver max_iters must be >= 1");
  if (!(fp_tol >= 0.0)) throw ConfigError("solver fp_tol must be >= 0");
  if (x0_policy == X0Policy::supplied && !x0.has_value())
    throw ConfigError("x0 policy 'supplied' needs an x0 image");
}

namespace {

constexpr double kDivergenceGuard = 1e6;

Image initial_iterate(const ForwardModel& model, const MeasurementVector& y,
                      const SolverConfig& config) {
  switch (config.x0_policy) {
    case X0Policy::zeros:
      return Image::zeros(model.input_width(), model.input_height(),
                          model.input_channels());
    case X0Policy::adjoint_of_y:
      return model.adjoint(y);
    case X0Policy::supplied:
      return *config.x0;
  }
  throw Error("unreachable x0 policy");
}

void check_step_bound(const ForwardModel& model, const SolverConfig& config) {
  const bool bounded_operator = model.kind() == ModelKind::identity ||
                                model.kind() == ModelKind::masked_fourier;
  if (bounded_operator && config.gamma > 1.0 && !config.allow_large_gamma)
    throw ConfigError("gamma > 1 exceeds the step bound for this model; set "
                      "allow_large_gamma to override");
}

DenoiserPtr effective_denoiser(const DenoiserPtr& denoiser, const SolverConfig& config) {
  if (!denoiser) throw ConfigError("solver needs a denoiser");
  return scale_denoiser(denoiser, config.mu);
}

class IterationLoop {
 public:
  IterationLoop(const SolverConfig& config, const Image* reference)
      : config_(config),
        reference_(reference),
        start_(std::chrono::steady_clock::now()) {}

  // Records the step, returns true when converged. Throws DivergenceError on
  // blow-up so callers can flush what they have.
  bool record(SolverResult& result, const Image& x_new, const Image& x_prev, int iter) {
    double denom = norm2(x_prev);
    double change = norm2(x_new - x_prev);
    double rel = denom > 0.0 ? change / denom : change;

    TraceRecord rec;
    rec.iter = iter;
    rec.rel_change = rel;
    if (reference_ != nullptr) rec.snr_db = snr_db(*reference_, x_new);
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start_)
                         .count();
    result.trace.push_back(rec);
    result.iterations = iter;

    if (!all_finite(x_new) || rel > kDivergenceGuard) {
      result.x_final = x_new;
      throw DivergenceError("solver diverged at iteration " + std::to_string(iter) +
                                " (relative change " + std::to_string(rel) + ")",
                            result);
    }
    return rel < config_.fp_tol;
  }

 private:
  const SolverConfig& config_;
  const Image* reference_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

SolverResult pnp_admm(const ForwardModel& model, const MeasurementVector& y,
                      const DenoiserPtr& denoiser, const SolverConfig& config,
                      const Image* reference) {
  config.validate();
  DenoiserPtr d = effective_denoiser(denoiser, config);

  SolverResult result;
  IterationLoop loop(config, reference);

  Image x = initial_iterate(model, y, config);
  Image s = Image::zeros(x.width, x.height, x.channels);
  Image z_prev;  // warm start for the CG-based prox

  for (int k = 1; k <= config.max_iters; ++k) {
    Image z = model.prox_g(x + s, config.gamma, y,
                           z_prev.size() > 0 ? &z_prev : nullptr);
    Image x_new = d->denoise(z - s);
    s += x_new - z;

    bool converged = loop.record(result, x_new, x, k);
    x = std::move(x_new);
    z_prev = std::move(z);
    if (converged) {
      result.converged = true;
      break;
    }
  }

  result.x_final = std::move(x);
  result.s_final = std::move(s);
  return result;
}

SolverResult pnp_ista(const ForwardModel& model, const MeasurementVector& y,
                      const DenoiserPtr& denoiser, const SolverConfig& config,
                      const Image* reference) {
  config.validate();
  check_step_bound(model, config);
  DenoiserPtr d = effective_denoiser(denoiser, config);

  SolverResult result;
  IterationLoop loop(config, reference);

  Image x = initial_iterate(model, y, config);
  Image s = x;
  double q = 1.0;

  for (int k = 1; k <= config.max_iters; ++k) {
    Image z = s - config.gamma * model.grad_g(s, y);
    Image x_new = d->denoise(z);

    double q_next = config.schedule == Schedule::fista ? fista_next_q(q) : 1.0;
    double beta = (q - 1.0) / q_next;
    s = x_new + beta * (x_new - x);
    q = q_next;

    bool converged = loop.record(result, x_new, x, k);
    x = std::move(x_new);
    if (converged) {
      result.converged = true;
      break;
    }
  }

  result.x_final = std::move(x);
  result.s_final = std::move(s);
  return result;
}

SolverResult run_solver(Algorithm algorithm, const ForwardModel& model,
                        const MeasurementVector& y, const DenoiserPtr& denoiser,
                        SolverConfig config, const Image* reference) {
  switch (algorithm) {
    case Algorithm::admm:
      return pnp_admm(model, y, denoiser, config, reference);
    case Algorithm::ista:
      config.schedule = Schedule::ista;
      return pnp_ista(model, y, denoiser, config, reference);
    case Algorithm::fista:
      config.schedule = Schedule::fista;
      return pnp_ista(model, y, denoiser, config, reference);
  }
  throw Error("unreachable algorithm");
}

CeReport verify_ce(const ForwardModel& model, const MeasurementVector& y,
                   const DenoiserPtr& denoiser_unscaled, double gamma, double mu,
                   const Image& x_star) {
  if (!(gamma > 0.0) || !(mu > 0.0)) throw ConfigError("verify_ce needs gamma, mu > 0");
  if (!denoiser_unscaled) throw ConfigError("verify_ce needs a denoiser");

  CeReport report;
  report.s_tilde = (gamma * mu) * model.grad_g(x_star, y);

  const double x_norm = mu * norm2(x_star);
  const double denom = x_norm > 0.0 ? x_norm : 1.0;

  Image mu_x = mu * x_star;
  Image prior_out = denoiser_unscaled->denoise(mu_x - report.s_tilde);
  report.r_prior = norm2(mu_x - prior_out) / denom;

  Image fidelity_out =
      model.prox_g(x_star + (1.0 / mu) * report.s_tilde, gamma, y);
  const double xs_norm = norm2(x_star);
  report.r_fidelity = norm2(x_star - fidelity_out) / (xs_norm > 0.0 ? xs_norm : 1.0);
  return report;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "iter,rel_change,snr_db,elapsed_ms\n";
  for (const auto& rec : trace) {
    out << rec.iter << ',';
    out.precision(17);
    out << rec.rel_change << ',';
    if (rec.snr_db.has_value()) out << *rec.snr_db;
    out << ',' << rec.elapsed_ms << '\n';
  }
}

}  // namespace pnp
