#include "pnp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace pnp::oracles {

QuadratureSpec QuadratureSpec::auto_for(const GmmPrior& prior, double noise_var,
                                        double z, int nodes) {
  prior.validate();
  double mean_lo = *std::min_element(prior.means.begin(), prior.means.end());
  double mean_hi = *std::max_element(prior.means.begin(), prior.means.end());
  double max_var = *std::max_element(prior.variances.begin(), prior.variances.end());
  double pad = 8.0 * std::sqrt(max_var + noise_var);
  QuadratureSpec spec;
  spec.lo = std::min(mean_lo, z) - pad;
  spec.hi = std::max(mean_hi, z) + pad;
  spec.nodes = nodes;
  spec.validate();
  return spec;
}

void QuadratureSpec::validate() const {
  if (!(hi > lo)) throw ConfigError("quadrature range needs hi > lo");
  if (nodes < 101 || nodes % 2 == 0)
    throw ConfigError("quadrature node count must be odd and >= 101");
}

double quadrature_mmse(const GmmPrior& prior, double noise_var, double z,
                       const QuadratureSpec& spec) {
  prior.validate();
  spec.validate();
  if (!(noise_var > 0.0)) throw ConfigError("quadrature needs noise_var > 0");

  auto prior_pdf = [&](double x) {
    double acc = 0.0;
    for (std::size_t k = 0; k < prior.components(); ++k) {
      double d = x - prior.means[k];
      acc += prior.weights[k] *
             std::exp(-0.5 * d * d / prior.variances[k]) /
             std::sqrt(2.0 * std::numbers::pi * prior.variances[k]);
    }
    return acc;
  };
  auto noise_pdf = [&](double d) {
    return std::exp(-0.5 * d * d / noise_var) /
           std::sqrt(2.0 * std::numbers::pi * noise_var);
  };

  const int n = spec.nodes;
  const double h = (spec.hi - spec.lo) / (n - 1);
  double numer = 0.0, denom = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = spec.lo + i * h;
    double f = noise_pdf(x - z) * prior_pdf(x);
    double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    denom += w * f;
    numer += w * x * f;
  }
  numer *= h / 3.0;
  denom *= h / 3.0;
  if (denom < std::numeric_limits<double>::min() * 1e6)
    throw Error("quadrature denominator underflow; integration range misconfigured");
  return numer / denom;
}

double quadrature_mmse(const GmmPrior& prior, double noise_var, double z) {
  return quadrature_mmse(prior, noise_var, z,
                         QuadratureSpec::auto_for(prior, noise_var, z));
}

double prox_optimality_residual(const std::function<Image(const Image&)>& grad_h,
                                const Image& z, const Image& x, double tau) {
  Image residual = x - z + tau * grad_h(x);
  return norm2(residual) / (1.0 + norm2(z));
}

PerturbationCertificate prox_perturbation_certificate(
    const std::function<double(const Image&)>& h, const Image& z, const Image& x,
    double tau, int num_perturbations, std::uint64_t seed) {
  auto objective = [&](const Image& v) {
    double d = norm2(v - z);
    return 0.5 * d * d + tau * h(v);
  };

  PerturbationCertificate cert;
  cert.objective_at_x = objective(x);
  const double scale = std::max(1.0, std::abs(cert.objective_at_x));

  // Two deterministic probe directions alongside the random ones: toward the
  // data-term minimizer (z - x), and toward a locally averaged copy of x,
  // which decreases TV-like regularizers. The latter catches candidates such
  // as x = z where the first direction vanishes.
  Image toward_z = z - x;
  Image toward_smooth = x;
  for (int c = 0; c < x.channels; ++c) {
    auto src = x.plane(c);
    auto dst = toward_smooth.plane(c);
    for (int i = 0; i < x.height; ++i)
      for (int j = 0; j < x.width; ++j) {
        double acc = 0.0;
        int count = 0;
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            int yi = i + di, xj = j + dj;
            if (yi < 0 || yi >= x.height || xj < 0 || xj >= x.width) continue;
            acc += src[static_cast<std::size_t>(yi) * x.width + xj];
            ++count;
          }
        dst[static_cast<std::size_t>(i) * x.width + j] = acc / count;
      }
  }
  toward_smooth -= x;

  std::mt19937_64 engine(seed);
  auto normal = [&]() {
    double u1 = (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };

  const double base_radius = std::max(norm2(x), 1.0) * 1e-1;
  const int radii = 5;
  const int per_radius = std::max(1, num_perturbations / radii);
  for (int level = 0; level < radii; ++level) {
    double radius = base_radius * std::pow(10.0, -level);
    for (int trial = 0; trial < per_radius; ++trial) {
      Image direction = x;
      for (double& v : direction.data) v = normal();
      double dn = norm2(direction);
      if (dn == 0.0) continue;
      Image candidate = x + (radius / dn) * direction;
      cert.best_improvement = std::max(
          cert.best_improvement, (cert.objective_at_x - objective(candidate)) / scale);
    }
    for (const Image* dir : {&toward_z, &toward_smooth}) {
      double dn = norm2(*dir);
      if (dn == 0.0) continue;
      Image candidate = x + (radius / dn) * (*dir);
      cert.best_improvement = std::max(
          cert.best_improvement, (cert.objective_at_x - objective(candidate)) / scale);
    }
  }
  return cert;
}

double fd_gradient_check(const std::function<double(const Image&)>& f,
                         double analytic_directional_derivative, const Image& point,
                         const Image& direction, std::span<const double> step_sizes) {
  if (norm2(direction) == 0.0) return 0.0;
  double worst = 0.0;
  for (double h : step_sizes) {
    double fd = (f(point + h * direction) - f(point - h * direction)) / (2.0 * h);
    double denom = std::max(1.0, std::abs(analytic_directional_derivative));
    worst = std::max(worst, std::abs(fd - analytic_directional_derivative) / denom);
  }
  return worst;
}

}  // namespace pnp::oracles
