#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "pnp/denoiser.hpp"
#include "pnp/forward_model.hpp"
#include "pnp/image.hpp"

namespace pnp {

enum class Algorithm { admm, ista, fista };
enum class Schedule { ista, fista };
enum class X0Policy { zeros, adjoint_of_y, supplied };

/// q_k = (1 + sqrt(1 + 4 q_{k-1}^2)) / 2, the accelerated momentum schedule;
/// q_0 = 1 and q_k = 1 for all k gives the plain (unaccelerated) iteration.
double fista_next_q(double q_prev);

struct SolverConfig {
  double gamma = 1.0;
  double mu = 1.0;  // applied by wrapping the denoiser with scale_denoiser
  int max_iters = 200;
  double fp_tol = 1e-6;  // stop when |x_k - x_{k-1}| / |x_{k-1}| < fp_tol
  Schedule schedule = Schedule::fista;
  X0Policy x0_policy = X0Policy::adjoint_of_y;
  std::optional<Image> x0;
  /// The gradient step bound gamma <= 1 is enforced for the ista family on
  /// identity / masked-fourier models (|H|_2 <= 1) unless this is set.
  bool allow_large_gamma = false;

  void validate() const;
};

struct TraceRecord {
  int iter = 0;
  double rel_change = 0.0;
  std::optional<double> snr_db;  // only when a reference image is supplied
  double elapsed_ms = 0.0;       // wall time since solver start
};

struct SolverResult {
  Image x_final;
  Image s_final;  // ADMM dual / ista-family momentum state
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRecord> trace;
};

/// Consensus residuals of a candidate fixed point (see verify_ce).
struct CeReport {
  double r_prior = 0.0;
  double r_fidelity = 0.0;
  Image s_tilde;
};

/// Iterates z = prox_{gamma g}(x + s); x = D(z - s); s += x - z, with s0 = 0.
/// config.mu != 1 wraps the denoiser with scale_denoiser first. Throws
/// DivergenceError when iterates blow up.
SolverResult pnp_admm(const ForwardModel& model, const MeasurementVector& y,
                      const DenoiserPtr& denoiser, const SolverConfig& config,
                      const Image* reference = nullptr);

/// Iterates z = s - gamma grad g(s); x = D(z); s = x + ((q_{k-1}-1)/q_k)(x -
/// x_prev) with the schedule switching between plain and accelerated steps.
SolverResult pnp_ista(const ForwardModel& model, const MeasurementVector& y,
                      const DenoiserPtr& denoiser, const SolverConfig& config,
                      const Image* reference = nullptr);

/// Dispatch by algorithm; admm ignores the schedule, ista/fista set it.
SolverResult run_solver(Algorithm algorithm, const ForwardModel& model,
                        const MeasurementVector& y, const DenoiserPtr& denoiser,
                        SolverConfig config, const Image* reference = nullptr);

/// Consensus check of a converged iterate x*: with s~ = gamma*mu*grad g(x*),
/// reports the relative residuals of the prior equation
/// mu x* = D(mu x* - s~) (D unscaled) and of the fidelity equation
/// x* = prox_{gamma g}(x* + s~/mu). Residuals are absolute when |x*| = 0.
CeReport verify_ce(const ForwardModel& model, const MeasurementVector& y,
                   const DenoiserPtr& denoiser_unscaled, double gamma, double mu,
                   const Image& x_star);

/// CSV with columns iter,rel_change,snr_db,elapsed_ms (snr_db empty when no
/// reference was supplied).
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

/// Thrown when the relative change exceeds the divergence guard or iterates
/// become non-finite; carries the partial result so traces can be flushed.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, SolverResult partial)
      : Error(what), partial_result(std::move(partial)) {}
  SolverResult partial_result;
};

}  // namespace pnp
