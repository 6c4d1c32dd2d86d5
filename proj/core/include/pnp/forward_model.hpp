#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "pnp/image.hpp"

namespace pnp {

enum class ModelKind { identity, masked_fourier, blur_downsample };

/// Boolean grid over the 2-D DFT frequencies, built from equally-angled
/// digital lines through DC and symmetrized so that conjugate frequency pairs
/// are kept together (real images stay consistent).
struct RadialMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> kept;  // h x w, row-major, DFT index order
  int line_count = 0;
  bool includes_dc = false;

  std::size_t kept_count() const;
  double rate() const { return static_cast<double>(kept_count()) / kept.size(); }
  bool is_conjugate_symmetric() const;
  void validate() const;
};

/// Builds a mask whose sampling rate lands within `tolerance` (relative) of
/// `target_rate`. Line count is chosen by bisection; if the closest line
/// count still misses, the outermost kept frequencies are trimmed in
/// conjugate pairs until the rate fits.
RadialMask make_radial_mask(int width, int height, double target_rate,
                            double tolerance = 0.02);

Image mask_to_image(const RadialMask& mask);
RadialMask mask_from_image(const Image& img);

/// 2-D convolution taps, odd dimensions, normalized to sum 1.
struct BlurKernel {
  int rows = 0;
  int cols = 0;
  std::vector<double> taps;

  void validate() const;
};

/// Separable truncated Gaussian, the default kernel when none is supplied.
BlurKernel gaussian_blur_kernel(int size = 19, double sigma = 1.6);
BlurKernel kernel_from_image(const Image& img);
Image kernel_to_image(const BlurKernel& kernel);

/// The measurement operator H together with the data-fidelity term
/// g(x) = 1/2 |y - Hx|^2, its gradient and its proximal operator.
///
/// Conventions: the Fourier transform is unitary and the blur kernel sums to
/// one, so |H|_2 <= 1 for every built-in model. Blur uses circular
/// (periodic) boundaries; decimation keeps indices that are 0 mod factor.
class ForwardModel {
 public:
  static ForwardModel identity(int width, int height, int channels = 1);
  static ForwardModel masked_fourier(RadialMask mask, int channels = 1);
  static ForwardModel blur_downsample(int width, int height, BlurKernel kernel,
                                      int factor, int channels = 1);

  ModelKind kind() const { return kind_; }
  int input_width() const { return width_; }
  int input_height() const { return height_; }
  int input_channels() const { return channels_; }
  std::size_t input_size() const {
    return static_cast<std::size_t>(width_) * height_ * channels_;
  }
  /// Number of measurement samples m (complex samples counted once).
  std::size_t output_size() const { return output_size_; }
  const RadialMask& mask() const;
  const BlurKernel& kernel() const;
  int decimation_factor() const { return factor_; }

  MeasurementVector apply(const Image& x) const;
  Image adjoint(const MeasurementVector& v) const;

  /// H^T (Hx - y).
  Image grad_g(const Image& x, const MeasurementVector& y) const;

  /// g(x) = 1/2 |y - Hx|^2.
  double data_fidelity(const Image& x, const MeasurementVector& y) const;

  /// argmin_x 1/2 |x-z|^2 + gamma/2 |y-Hx|^2. Closed form for identity and
  /// masked Fourier; conjugate gradients on (I + gamma H^T H) for blur.
  /// `x0_hint` warm-starts the CG solve (ignored by the closed forms).
  Image prox_g(const Image& z, double gamma, const MeasurementVector& y,
               const Image* x0_hint = nullptr) const;

 private:
  ForwardModel() = default;
  void check_input(const Image& x) const;
  void check_output(const MeasurementVector& v) const;
  std::size_t plane_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  ModelKind kind_ = ModelKind::identity;
  int width_ = 0, height_ = 0, channels_ = 1;
  std::size_t output_size_ = 0;

  // masked-fourier payload
  std::shared_ptr<const RadialMask> mask_;
  std::vector<std::size_t> kept_indices_;  // scan-order positions of kept frequencies

  // blur-downsample payload
  std::shared_ptr<const BlurKernel> kernel_;
  int factor_ = 1;
  std::vector<std::complex<double>> kernel_freq_;  // unnormalized DFT of padded taps
};

/// CG solve of the prox normal equations, usable for any model. This is the
/// iterative counterpart to the closed-form paths and the implementation
/// behind the blur-downsample prox. Throws Error when the relative residual
/// has not reached `tol` after `max_iters`.
Image prox_g_via_cg(const ForwardModel& model, const Image& z, double gamma,
                    const MeasurementVector& y, double tol = 1e-8,
                    int max_iters = 500, const Image* x0_hint = nullptr);

}  // namespace pnp
