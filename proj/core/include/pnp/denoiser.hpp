#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pnp/image.hpp"

namespace pnp {

/// An image denoiser D. Implementations are pure: denoise() may be called
/// concurrently and never mutates shared state.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Image denoise(const Image& z) const = 0;
  virtual std::string describe() const = 0;
};

using DenoiserPtr = std::shared_ptr<const Denoiser>;

/// Isotropic total variation with forward differences and replicate
/// (Neumann) boundaries: sum over pixels of the l2 norm of the two spatial
/// differences, channels independent.
double tv_value(const Image& x);

struct TvProxParams {
  double tau = 1.0;
  int max_inner = 200;
  double inner_tol = 1e-9;
};

struct TvProxResult {
  Image image;
  bool converged = false;
  int iterations = 0;
};

/// prox_{tau*TV}(z) by accelerated dual projected gradient (dual step 1/8,
/// stop on relative dual change < inner_tol). Non-convergence within
/// max_inner returns the best iterate with converged=false.
TvProxResult tv_prox_denoise(const Image& z, double tau, int max_inner = 200,
                             double inner_tol = 1e-9);

/// Scalar i.i.d. Gaussian-mixture prior over pixel intensities.
struct GmmPrior {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;

  std::size_t components() const { return weights.size(); }
  void validate() const;  // weights >= 0 summing to 1 (1e-12), variances > 0
};

/// Per-sample posterior mean under the mixture prior and N(0, noise_var)
/// noise. Responsibilities are computed in the log domain.
Image gmm_mmse_denoise(const Image& z, const GmmPrior& prior, double noise_var);
double gmm_mmse_point(double z, const GmmPrior& prior, double noise_var);

DenoiserPtr make_tv_prox_denoiser(TvProxParams params = {});
DenoiserPtr make_gmm_mmse_denoiser(GmmPrior prior, double noise_var);

/// The scaling wrapper: scaled denoiser evaluates (1/mu) * inner(mu * z).
/// Wrapping an already-scaled denoiser composes multiplicatively into a
/// single wrapper around the original inner denoiser.
DenoiserPtr scale_denoiser(DenoiserPtr inner, double mu);

/// Scaling factor of a wrapped denoiser (1 when unwrapped); the inner
/// denoiser behind any scaling wrapper.
double denoiser_scale(const DenoiserPtr& d);
DenoiserPtr unscaled_inner(const DenoiserPtr& d);

/// Runs `command` as a child process, feeding z as IMGF64 on its stdin and
/// reading one IMGF64 (same dimensions) from its stdout. One process per
/// call; the child is killed after timeout_sec and always reaped. Nonzero
/// exit maps to an Error carrying the captured stderr.
Image external_denoise(const std::vector<std::string>& command, const Image& z,
                       double timeout_sec = 60.0);

DenoiserPtr make_external_denoiser(std::vector<std::string> command,
                                   double timeout_sec = 60.0);

}  // namespace pnp
