#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "pnp/denoiser.hpp"
#include "pnp/image.hpp"

namespace pnp::oracles {

/// Composite-Simpson quadrature settings. The default range covers the prior
/// mass 8 standard deviations past the extreme means and the query point.
struct QuadratureSpec {
  double lo = 0.0;
  double hi = 0.0;
  int nodes = 2001;  // odd, >= 101

  static QuadratureSpec auto_for(const GmmPrior& prior, double noise_var, double z,
                                 int nodes = 2001);
  void validate() const;
};

/// Posterior mean  ∫ x φ_ν(x−z) p(x) dx / ∫ φ_ν(x−z) p(x) dx  by composite
/// Simpson (error O(h^4)). Independent of gmm_mmse_denoise: integrates the
/// densities directly. Throws Error when the denominator underflows (range
/// misconfigured).
double quadrature_mmse(const GmmPrior& prior, double noise_var, double z,
                       const QuadratureSpec& spec);
double quadrature_mmse(const GmmPrior& prior, double noise_var, double z);

/// First-order prox residual for a smooth regularizer:
/// |x - z + tau*grad_h(x)| / (1 + |z|).
double prox_optimality_residual(const std::function<Image(const Image&)>& grad_h,
                                const Image& z, const Image& x, double tau);

/// Zero-order certificate for nonsmooth regularizers: compares the prox
/// objective F(v) = 1/2|v-z|^2 + tau*h(v) at x against random perturbations
/// of geometrically decreasing radius (plus, at each radius, a smoothed-
/// gradient direction so descent directions of TV-like terms are found
/// deterministically). Returns the largest relative improvement seen;
/// a prox-optimal x yields ~0.
struct PerturbationCertificate {
  double best_improvement = 0.0;  // relative to max(1, |F(x)|)
  double objective_at_x = 0.0;
  bool passed(double tol) const { return best_improvement <= tol; }
};

PerturbationCertificate prox_perturbation_certificate(
    const std::function<double(const Image&)>& h, const Image& z, const Image& x,
    double tau, int num_perturbations = 100, std::uint64_t seed = 0x5eed);

inline constexpr double kDefaultFdStepsArray[] = {1e-4, 1e-5, 1e-6};
inline constexpr std::span<const double> kDefaultFdSteps{kDefaultFdStepsArray};

/// Max relative deviation between central finite differences of f along
/// `direction` (at the given step sizes) and the supplied analytic
/// directional derivative. A zero direction returns 0 by convention.
double fd_gradient_check(const std::function<double(const Image&)>& f,
                         double analytic_directional_derivative, const Image& point,
                         const Image& direction,
                         std::span<const double> step_sizes = kDefaultFdSteps);

}  // namespace pnp::oracles
