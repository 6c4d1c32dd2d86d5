#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "pnp/denoiser.hpp"
#include "pnp/image.hpp"

namespace pnp::testing {

/// Piecewise-constant phantom: flat background with a disc, a rectangle and a
/// smaller dark disc. Deterministic, intensities in [0, 255].
inline Image phantom_shapes(int w, int h) {
  Image img = Image::constant(w, h, 1, 40.0);
  const double cx = 0.42 * w, cy = 0.47 * h, r = 0.27 * std::min(w, h);
  const double cx2 = 0.70 * w, cy2 = 0.30 * h, r2 = 0.10 * std::min(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double d1 = std::hypot(x - cx, y - cy);
      double d2 = std::hypot(x - cx2, y - cy2);
      if (d1 < r) img.at(0, y, x) = 190.0;
      if (x > 0.62 * w && x < 0.88 * w && y > 0.55 * h && y < 0.82 * h)
        img.at(0, y, x) = 230.0;
      if (d2 < r2) img.at(0, y, x) = 95.0;
    }
  return img;
}

/// Smooth phantom: offset + oriented gradient + two low-frequency waves.
inline Image phantom_smooth(int w, int h) {
  Image img = Image::zeros(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double u = static_cast<double>(x) / w, v = static_cast<double>(y) / h;
      double value = 90.0 + 70.0 * u + 30.0 * v +
                     45.0 * std::sin(2.0 * M_PI * 1.5 * u) * std::cos(2.0 * M_PI * v);
      img.at(0, y, x) = std::min(255.0, std::max(0.0, value));
    }
  return img;
}

/// Shapes over a gradient background.
inline Image phantom_mixed(int w, int h) {
  Image img = phantom_smooth(w, h);
  const double cx = 0.55 * w, cy = 0.60 * h, r = 0.22 * std::min(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (std::hypot(x - cx, y - cy) < r) img.at(0, y, x) = 205.0;
      if (x > 0.12 * w && x < 0.30 * w && y > 0.15 * h && y < 0.40 * h)
        img.at(0, y, x) = 25.0;
    }
  return img;
}

inline Image random_image(int w, int h, int c, std::uint64_t seed, double lo = 0.0,
                          double hi = 255.0) {
  std::mt19937_64 engine(seed);
  Image img = Image::zeros(w, h, c);
  for (double& v : img.data) {
    double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    v = lo + (hi - lo) * u;
  }
  return img;
}

/// Test-only denoiser wrapping an arbitrary function.
class FunctionDenoiser final : public Denoiser {
 public:
  explicit FunctionDenoiser(std::function<Image(const Image&)> fn,
                            std::string name = "function")
      : fn_(std::move(fn)), name_(std::move(name)) {}
  Image denoise(const Image& z) const override { return fn_(z); }
  std::string describe() const override { return name_; }

 private:
  std::function<Image(const Image&)> fn_;
  std::string name_;
};

inline DenoiserPtr make_linear_denoiser(double alpha) {
  return std::make_shared<FunctionDenoiser>(
      [alpha](const Image& z) { return z * alpha; }, "linear");
}

inline DenoiserPtr make_identity_denoiser() { return make_linear_denoiser(1.0); }

/// Test-only denoiser that records every post-denoise iterate (used to count
/// iterations-to-tolerance on explicit objectives).
class RecordingDenoiser final : public Denoiser {
 public:
  RecordingDenoiser(DenoiserPtr inner, std::shared_ptr<std::vector<Image>> log)
      : inner_(std::move(inner)), log_(std::move(log)) {}
  Image denoise(const Image& z) const override {
    Image out = inner_->denoise(z);
    log_->push_back(out);
    return out;
  }
  std::string describe() const override { return "recording"; }

 private:
  DenoiserPtr inner_;
  std::shared_ptr<std::vector<Image>> log_;
};

}  // namespace pnp::testing
