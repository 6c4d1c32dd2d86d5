#include <algorithm>
#include <cmath>

#include "pnp/denoiser.hpp"

namespace pnp {

double tv_value(const Image& x) {
  double acc = 0.0;
  for (int c = 0; c < x.channels; ++c) {
    auto plane = x.plane(c);
    const int w = x.width, h = x.height;
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        double dv = i + 1 < h ? plane[(i + 1) * static_cast<std::size_t>(w) + j] -
                                    plane[i * static_cast<std::size_t>(w) + j]
                              : 0.0;
        double dh = j + 1 < w ? plane[i * static_cast<std::size_t>(w) + j + 1] -
                                    plane[i * static_cast<std::size_t>(w) + j]
                              : 0.0;
        acc += std::sqrt(dv * dv + dh * dh);
      }
  }
  return acc;
}

namespace {

// Negative divergence: adjoint of the forward-difference gradient. The dual
// fields carry structural zeros on their last row (p) / column (q).
void apply_div_adjoint(int h, int w, const std::vector<double>& p,
                       const std::vector<double>& q, std::vector<double>& out) {
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * w + j;
      double v = 0.0;
      if (i > 0) v += p[idx - w];
      if (i < h - 1) v -= p[idx];
      if (j > 0) v += q[idx - 1];
      if (j < w - 1) v -= q[idx];
      out[idx] = v;
    }
}

struct PlaneProxResult {
  bool converged = false;
  int iterations = 0;
};

// Accelerated projected gradient on the dual of min 1/2|x-b|^2 + tau*TV(x):
// x = b - tau * div^T(p,q), dual step 1/(8 tau), isotropic unit-ball
// projection per pixel.
PlaneProxResult tv_prox_plane(std::span<const double> b, std::span<double> x_out,
                              int h, int w, double tau, int max_inner,
                              double inner_tol) {
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<double> p(n, 0.0), q(n, 0.0);        // dual iterate
  std::vector<double> rp(n, 0.0), rq(n, 0.0);      // momentum point
  std::vector<double> p_prev(n, 0.0), q_prev(n, 0.0);
  std::vector<double> div(n, 0.0);
  double t = 1.0;
  const double step = 1.0 / (8.0 * tau);

  PlaneProxResult result;
  for (int it = 1; it <= max_inner; ++it) {
    result.iterations = it;
    // x = b - tau * div^T(r)
    apply_div_adjoint(h, w, rp, rq, div);
    for (std::size_t i = 0; i < n; ++i) div[i] = b[i] - tau * div[i];

    // Gradient ascent step on the dual at the momentum point, then project.
    double change_sq = 0.0, norm_sq = 0.0;
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        std::size_t idx = static_cast<std::size_t>(i) * w + j;
        double gv = i < h - 1 ? div[idx + w] - div[idx] : 0.0;
        double gh = j < w - 1 ? div[idx + 1] - div[idx] : 0.0;
        double pv = rp[idx] + step * gv;
        double qv = rq[idx] + step * gh;
        double mag = std::sqrt(pv * pv + qv * qv);
        if (mag > 1.0) {
          pv /= mag;
          qv /= mag;
        }
        double dp = pv - p_prev[idx];
        double dq = qv - q_prev[idx];
        change_sq += dp * dp + dq * dq;
        norm_sq += pv * pv + qv * qv;
        p[idx] = pv;
        q[idx] = qv;
      }

    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double beta = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < n; ++i) {
      rp[i] = p[i] + beta * (p[i] - p_prev[i]);
      rq[i] = q[i] + beta * (q[i] - q_prev[i]);
    }
    t = t_next;
    std::swap(p_prev, p);
    std::swap(q_prev, q);

    if (std::sqrt(change_sq) <= inner_tol * std::max(std::sqrt(norm_sq), 1.0)) {
      result.converged = true;
      break;
    }
  }

  // Primal from the last dual iterate (p_prev/q_prev after the swap).
  apply_div_adjoint(h, w, p_prev, q_prev, div);
  for (std::size_t i = 0; i < n; ++i) x_out[i] = b[i] - tau * div[i];
  return result;
}

}  // namespace

TvProxResult tv_prox_denoise(const Image& z, double tau, int max_inner,
                             double inner_tol) {
  z.validate();
  if (tau < 0.0) throw ConfigError("tv prox needs tau >= 0");
  if (max_inner < 1) throw ConfigError("tv prox needs max_inner >= 1");

  TvProxResult result;
  result.image = z;
  if (tau == 0.0) {
    result.converged = true;
    return result;
  }

  result.converged = true;
  for (int c = 0; c < z.channels; ++c) {
    auto r = tv_prox_plane(z.plane(c), result.image.plane(c), z.height, z.width,
                           tau, max_inner, inner_tol);
    result.converged = result.converged && r.converged;
    result.iterations = std::max(result.iterations, r.iterations);
  }
  return result;
}

namespace {

class TvProxDenoiser final : public Denoiser {
 public:
  explicit TvProxDenoiser(TvProxParams params) : params_(params) {
    if (params_.tau < 0.0) throw ConfigError("tv prox needs tau >= 0");
  }

  Image denoise(const Image& z) const override {
    return tv_prox_denoise(z, params_.tau, params_.max_inner, params_.inner_tol).image;
  }

  std::string describe() const override {
    return "tv-prox(tau=" + std::to_string(params_.tau) + ")";
  }

 private:
  TvProxParams params_;
};

}  // namespace

DenoiserPtr make_tv_prox_denoiser(TvProxParams params) {
  return std::make_shared<TvProxDenoiser>(params);
}

}  // namespace pnp
