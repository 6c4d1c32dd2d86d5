#include <cmath>
#include <limits>
#include <numbers>

#include "pnp/denoiser.hpp"

namespace pnp {

void GmmPrior::validate() const {
  if (weights.empty() || weights.size() != means.size() ||
      weights.size() != variances.size())
    throw ConfigError("GMM prior component arrays must be nonempty and equal length");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("GMM weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("GMM weights must sum to 1");
  for (double v : variances)
    if (!(v > 0.0)) throw ConfigError("GMM variances must be > 0");
  for (double m : means)
    if (!std::isfinite(m)) throw ConfigError("GMM means must be finite");
}

double gmm_mmse_point(double z, const GmmPrior& prior, double noise_var) {
  const std::size_t k = prior.components();
  // log responsibilities: log w_k + log N(z; m_k, v_k + nu), stabilized by
  // subtracting the max before exponentiating.
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(k);
  for (std::size_t i = 0; i < k; ++i) {
    double s = prior.variances[i] + noise_var;
    double d = z - prior.means[i];
    logs[i] = (prior.weights[i] > 0.0 ? std::log(prior.weights[i])
                                      : -std::numeric_limits<double>::infinity()) -
              0.5 * std::log(2.0 * std::numbers::pi * s) - 0.5 * d * d / s;
    max_log = std::max(max_log, logs[i]);
  }
  double denom = 0.0, numer = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double r = std::exp(logs[i] - max_log);
    double s = prior.variances[i] + noise_var;
    double post_mean = (prior.means[i] * noise_var + z * prior.variances[i]) / s;
    denom += r;
    numer += r * post_mean;
  }
  return numer / denom;
}

Image gmm_mmse_denoise(const Image& z, const GmmPrior& prior, double noise_var) {
  z.validate();
  prior.validate();
  if (!(noise_var > 0.0)) throw ConfigError("gmm mmse needs noise_var > 0");
  Image out = z;
  for (double& v : out.data) v = gmm_mmse_point(v, prior, noise_var);
  return out;
}

namespace {

class GmmMmseDenoiser final : public Denoiser {
 public:
  GmmMmseDenoiser(GmmPrior prior, double noise_var)
      : prior_(std::move(prior)), noise_var_(noise_var) {
    prior_.validate();
    if (!(noise_var_ > 0.0)) throw ConfigError("gmm mmse needs noise_var > 0");
  }

  Image denoise(const Image& z) const override {
    return gmm_mmse_denoise(z, prior_, noise_var_);
  }

  std::string describe() const override {
    return "gmm-mmse(k=" + std::to_string(prior_.components()) +
           ", noise_var=" + std::to_string(noise_var_) + ")";
  }

 private:
  GmmPrior prior_;
  double noise_var_;
};

class ScaledDenoiser final : public Denoiser {
 public:
  ScaledDenoiser(DenoiserPtr inner, double mu) : inner_(std::move(inner)), mu_(mu) {
    if (!(mu_ > 0.0)) throw ConfigError("scale_denoiser needs mu > 0");
    if (!inner_) throw ConfigError("scale_denoiser needs a denoiser");
  }

  Image denoise(const Image& z) const override {
    Image scaled = z * mu_;
    Image out = inner_->denoise(scaled);
    out *= 1.0 / mu_;
    return out;
  }

  std::string describe() const override {
    return "scaled(mu=" + std::to_string(mu_) + ", " + inner_->describe() + ")";
  }

  const DenoiserPtr& inner() const { return inner_; }
  double mu() const { return mu_; }

 private:
  DenoiserPtr inner_;
  double mu_;
};

}  // namespace

DenoiserPtr make_gmm_mmse_denoiser(GmmPrior prior, double noise_var) {
  return std::make_shared<GmmMmseDenoiser>(std::move(prior), noise_var);
}

DenoiserPtr scale_denoiser(DenoiserPtr inner, double mu) {
  if (!(mu > 0.0)) throw ConfigError("scale_denoiser needs mu > 0");
  // Nested wrappers compose multiplicatively into one.
  if (auto scaled = std::dynamic_pointer_cast<const ScaledDenoiser>(inner))
    return std::make_shared<ScaledDenoiser>(scaled->inner(), scaled->mu() * mu);
  return std::make_shared<ScaledDenoiser>(std::move(inner), mu);
}

double denoiser_scale(const DenoiserPtr& d) {
  if (auto scaled = std::dynamic_pointer_cast<const ScaledDenoiser>(d))
    return scaled->mu();
  return 1.0;
}

DenoiserPtr unscaled_inner(const DenoiserPtr& d) {
  if (auto scaled = std::dynamic_pointer_cast<const ScaledDenoiser>(d))
    return scaled->inner();
  return d;
}

}  // namespace pnp
