#include "pnp/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fft.hpp"

namespace pnp {

std::size_t RadialMask::kept_count() const {
  return static_cast<std::size_t>(std::count(kept.begin(), kept.end(), std::uint8_t{1}));
}

bool RadialMask::is_conjugate_symmetric() const {
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      int ym = (height - y) % height;
      int xm = (width - x) % width;
      if (kept[static_cast<std::size_t>(y) * width + x] !=
          kept[static_cast<std::size_t>(ym) * width + xm])
        return false;
    }
  return true;
}

void RadialMask::validate() const {
  if (width < 1 || height < 1) throw ConfigError("mask dimensions must be >= 1");
  if (kept.size() != static_cast<std::size_t>(width) * height)
    throw ConfigError("mask grid size mismatch");
  for (std::uint8_t v : kept)
    if (v > 1) throw ConfigError("mask entries must be 0 or 1");
  if (kept_count() == 0) throw ConfigError("mask keeps no frequencies");
  if (!is_conjugate_symmetric())
    throw ConfigError("mask is not conjugate-symmetric");
}

namespace {

// Digital line at angle theta through the centered-grid origin, rasterized by
// stepping one sample per unit along the dominant axis.
void rasterize_line(std::vector<std::uint8_t>& kept_centered, int w, int h,
                    double theta) {
  const double dx = std::cos(theta);
  const double dy = std::sin(theta);
  const int cx = w / 2;
  const int cy = h / 2;
  const int reach = w + h;  // covers the full grid from the center
  for (int t = -reach; t <= reach; ++t) {
    int x, y;
    if (std::abs(dx) >= std::abs(dy)) {
      x = cx + t;
      y = cy + static_cast<int>(std::lround(t * dy / dx));
    } else {
      y = cy + t;
      x = cx + static_cast<int>(std::lround(t * dx / dy));
    }
    if (x >= 0 && x < w && y >= 0 && y < h)
      kept_centered[static_cast<std::size_t>(y) * w + x] = 1;
  }
}

RadialMask build_mask_with_lines(int width, int height, int line_count) {
  std::vector<std::uint8_t> centered(static_cast<std::size_t>(width) * height, 0);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < line_count; ++i)
    rasterize_line(centered, width, height, pi * i / line_count);

  // ifftshift back to DFT index order, then force conjugate symmetry.
  RadialMask mask;
  mask.width = width;
  mask.height = height;
  mask.line_count = line_count;
  mask.kept.assign(centered.size(), 0);
  const int cx = width / 2;
  const int cy = height / 2;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      int ys = (y + cy) % height;  // centered row for DFT row y
      int xs = (x + cx) % width;
      mask.kept[static_cast<std::size_t>(y) * width + x] =
          centered[static_cast<std::size_t>(ys) * width + xs];
    }
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      int ym = (height - y) % height;
      int xm = (width - x) % width;
      if (mask.kept[static_cast<std::size_t>(y) * width + x])
        mask.kept[static_cast<std::size_t>(ym) * width + xm] = 1;
    }
  mask.includes_dc = mask.kept[0] != 0;
  return mask;
}

// Distance of DFT index (x, y) from DC in centered frequency coordinates.
double freq_radius(int x, int y, int w, int h) {
  int fx = x <= w / 2 ? x : x - w;
  int fy = y <= h / 2 ? y : y - h;
  return std::hypot(static_cast<double>(fx), static_cast<double>(fy));
}

}  // namespace

RadialMask make_radial_mask(int width, int height, double target_rate,
                            double tolerance) {
  if (width < 2 || height < 2) throw ConfigError("mask grid too small");
  if (!(target_rate > 0.0) || target_rate > 1.0)
    throw ConfigError("target sampling rate must be in (0, 1]");

  const std::size_t total = static_cast<std::size_t>(width) * height;
  const double target_kept = target_rate * static_cast<double>(total);

  // Bisection on the line count; kept count grows with it (monotone enough
  // for a crossing search, with a linear fix-up afterwards).
  int lo = 1, hi = 2 * (width + height);
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    RadialMask m = build_mask_with_lines(width, height, mid);
    if (static_cast<double>(m.kept_count()) < target_kept)
      lo = mid + 1;
    else
      hi = mid;
  }
  RadialMask mask = build_mask_with_lines(width, height, lo);
  while (static_cast<double>(mask.kept_count()) < target_kept &&
         mask.line_count < 4 * (width + height))
    mask = build_mask_with_lines(width, height, mask.line_count + 1);

  // Trim outermost kept frequencies in conjugate pairs while that brings the
  // count strictly closer to the target (final count within 1 of it).
  if (static_cast<double>(mask.kept_count()) - target_kept > 1.0) {
    std::vector<std::pair<double, std::size_t>> by_radius;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        std::size_t idx = static_cast<std::size_t>(y) * width + x;
        if (mask.kept[idx]) by_radius.emplace_back(freq_radius(x, y, width, height), idx);
      }
    std::sort(by_radius.begin(), by_radius.end(),
              [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
              });
    std::size_t count = mask.kept_count();
    for (const auto& [radius, idx] : by_radius) {
      if (static_cast<double>(count) - target_kept <= 1.0) break;
      if (!mask.kept[idx]) continue;  // already removed as a partner
      int y = static_cast<int>(idx) / width;
      int x = static_cast<int>(idx) % width;
      std::size_t mirror = static_cast<std::size_t>((height - y) % height) * width +
                           (width - x) % width;
      mask.kept[idx] = 0;
      mask.kept[mirror] = 0;
      count -= (mirror == idx) ? 1 : 2;
    }
    mask.includes_dc = mask.kept[0] != 0;
  }

  mask.validate();
  const double achieved = mask.rate();
  if (std::abs(achieved - target_rate) > tolerance * target_rate)
    throw Error("radial mask rate " + std::to_string(achieved) +
                " misses target " + std::to_string(target_rate));
  return mask;
}

Image mask_to_image(const RadialMask& mask) {
  mask.validate();
  Image img = Image::zeros(mask.width, mask.height, 1);
  for (std::size_t i = 0; i < mask.kept.size(); ++i)
    img.data[i] = mask.kept[i] ? 1.0 : 0.0;
  return img;
}

RadialMask mask_from_image(const Image& img) {
  img.validate();
  if (img.channels != 1) throw ConfigError("mask image must have one channel");
  RadialMask mask;
  mask.width = img.width;
  mask.height = img.height;
  mask.kept.resize(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (img.data[i] != 0.0 && img.data[i] != 1.0)
      throw ConfigError("mask image entries must be exactly 0 or 1");
    mask.kept[i] = img.data[i] == 1.0 ? 1 : 0;
  }
  mask.includes_dc = mask.kept[0] != 0;
  mask.validate();
  return mask;
}

void BlurKernel::validate() const {
  if (rows < 1 || cols < 1 || rows % 2 == 0 || cols % 2 == 0)
    throw ConfigError("blur kernel dimensions must be odd and >= 1");
  if (taps.size() != static_cast<std::size_t>(rows) * cols)
    throw ConfigError("blur kernel tap count mismatch");
  double sum = 0.0;
  for (double t : taps) {
    if (!std::isfinite(t)) throw ConfigError("blur kernel has non-finite taps");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ConfigError("blur kernel taps must sum to 1");
}

BlurKernel gaussian_blur_kernel(int size, double sigma) {
  if (size < 1 || size % 2 == 0) throw ConfigError("kernel size must be odd");
  std::vector<double> line(size);
  const int r = size / 2;
  double line_sum = 0.0;
  for (int i = 0; i < size; ++i) {
    double d = i - r;
    line[i] = std::exp(-0.5 * d * d / (sigma * sigma));
    line_sum += line[i];
  }
  for (double& v : line) v /= line_sum;
  BlurKernel k;
  k.rows = k.cols = size;
  k.taps.resize(static_cast<std::size_t>(size) * size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) k.taps[static_cast<std::size_t>(i) * size + j] = line[i] * line[j];
  // Renormalize exactly; separable product already sums to ~1.
  double sum = std::accumulate(k.taps.begin(), k.taps.end(), 0.0);
  for (double& v : k.taps) v /= sum;
  k.validate();
  return k;
}

BlurKernel kernel_from_image(const Image& img) {
  img.validate();
  if (img.channels != 1) throw ConfigError("kernel image must have one channel");
  BlurKernel k;
  k.rows = img.height;
  k.cols = img.width;
  k.taps = img.data;
  k.validate();
  return k;
}

Image kernel_to_image(const BlurKernel& kernel) {
  kernel.validate();
  return Image(kernel.cols, kernel.rows, 1, kernel.taps);
}

ForwardModel ForwardModel::identity(int width, int height, int channels) {
  ForwardModel m;
  m.kind_ = ModelKind::identity;
  m.width_ = width;
  m.height_ = height;
  m.channels_ = channels;
  m.output_size_ = m.input_size();
  if (m.output_size_ == 0) throw ConfigError("identity model needs positive dims");
  return m;
}

ForwardModel ForwardModel::masked_fourier(RadialMask mask, int channels) {
  mask.validate();
  ForwardModel m;
  m.kind_ = ModelKind::masked_fourier;
  m.width_ = mask.width;
  m.height_ = mask.height;
  m.channels_ = channels;
  for (std::size_t i = 0; i < mask.kept.size(); ++i)
    if (mask.kept[i]) m.kept_indices_.push_back(i);
  m.output_size_ = m.kept_indices_.size() * channels;
  m.mask_ = std::make_shared<RadialMask>(std::move(mask));
  return m;
}

ForwardModel ForwardModel::blur_downsample(int width, int height, BlurKernel kernel,
                                           int factor, int channels) {
  kernel.validate();
  if (factor < 1) throw ConfigError("decimation factor must be >= 1");
  if (width % factor != 0 || height % factor != 0)
    throw ConfigError("decimation factor must divide width and height");
  if (kernel.rows > height || kernel.cols > width)
    throw ConfigError("blur kernel larger than image");
  ForwardModel m;
  m.kind_ = ModelKind::blur_downsample;
  m.width_ = width;
  m.height_ = height;
  m.channels_ = channels;
  m.factor_ = factor;
  m.output_size_ = static_cast<std::size_t>(width / factor) * (height / factor) * channels;

  // Unnormalized DFT of the taps laid out circularly around (0, 0); with the
  // unitary transform, conv(k, x) = IDFT(kernel_freq .* DFT(x)).
  std::vector<std::complex<double>> padded(static_cast<std::size_t>(width) * height, 0.0);
  const int rr = kernel.rows / 2, rc = kernel.cols / 2;
  for (int i = 0; i < kernel.rows; ++i)
    for (int j = 0; j < kernel.cols; ++j) {
      int y = ((i - rr) % height + height) % height;
      int x = ((j - rc) % width + width) % width;
      padded[static_cast<std::size_t>(y) * width + x] +=
          kernel.taps[static_cast<std::size_t>(i) * kernel.cols + j];
    }
  m.kernel_freq_.resize(padded.size());
  detail::dft2(height, width, padded.data(), m.kernel_freq_.data(), false);
  const double root_n = std::sqrt(static_cast<double>(width) * height);
  for (auto& v : m.kernel_freq_) v *= root_n;  // undo unitary scaling

  m.kernel_ = std::make_shared<BlurKernel>(std::move(kernel));
  return m;
}

const RadialMask& ForwardModel::mask() const {
  if (!mask_) throw ConfigError("model has no mask payload");
  return *mask_;
}

const BlurKernel& ForwardModel::kernel() const {
  if (!kernel_) throw ConfigError("model has no kernel payload");
  return *kernel_;
}

void ForwardModel::check_input(const Image& x) const {
  if (x.width != width_ || x.height != height_ || x.channels != channels_)
    throw ConfigError("image dimensions do not match the forward model");
}

void ForwardModel::check_output(const MeasurementVector& v) const {
  if (v.size() != output_size_)
    throw ConfigError("measurement length does not match the forward model");
}

MeasurementVector ForwardModel::apply(const Image& x) const {
  check_input(x);
  switch (kind_) {
    case ModelKind::identity:
      return MeasurementVector::spatial(x);
    case ModelKind::masked_fourier: {
      std::vector<double> re, im;
      re.reserve(output_size_);
      im.reserve(output_size_);
      for (int c = 0; c < channels_; ++c) {
        auto spectrum = detail::dft2_real(height_, width_, x.plane(c));
        for (std::size_t idx : kept_indices_) {
          re.push_back(spectrum[idx].real());
          im.push_back(spectrum[idx].imag());
        }
      }
      return MeasurementVector::frequency(std::move(re), std::move(im));
    }
    case ModelKind::blur_downsample: {
      const int ow = width_ / factor_, oh = height_ / factor_;
      Image out = Image::zeros(ow, oh, channels_);
      std::vector<std::complex<double>> buf(plane_count());
      for (int c = 0; c < channels_; ++c) {
        auto spectrum = detail::dft2_real(height_, width_, x.plane(c));
        for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= kernel_freq_[i];
        detail::dft2(height_, width_, spectrum.data(), buf.data(), true);
        auto plane = out.plane(c);
        for (int y = 0; y < oh; ++y)
          for (int xo = 0; xo < ow; ++xo)
            plane[static_cast<std::size_t>(y) * ow + xo] =
                buf[static_cast<std::size_t>(y) * factor_ * width_ + xo * factor_].real();
      }
      return MeasurementVector::spatial(out);
    }
  }
  throw Error("unreachable model kind");
}

Image ForwardModel::adjoint(const MeasurementVector& v) const {
  check_output(v);
  switch (kind_) {
    case ModelKind::identity:
      return Image(width_, height_, channels_, v.re);
    case ModelKind::masked_fourier: {
      // Zero-fill, inverse unitary DFT, real part: the adjoint of
      // restriction-after-DFT under the real inner product.
      Image out = Image::zeros(width_, height_, channels_);
      const std::size_t kept = kept_indices_.size();
      std::vector<std::complex<double>> spectrum(plane_count());
      std::vector<std::complex<double>> buf(plane_count());
      for (int c = 0; c < channels_; ++c) {
        std::fill(spectrum.begin(), spectrum.end(), std::complex<double>{0.0, 0.0});
        for (std::size_t k = 0; k < kept; ++k)
          spectrum[kept_indices_[k]] = {v.re[c * kept + k], v.im[c * kept + k]};
        detail::dft2(height_, width_, spectrum.data(), buf.data(), true);
        auto plane = out.plane(c);
        for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = buf[i].real();
      }
      return out;
    }
    case ModelKind::blur_downsample: {
      // Zero-upsample, then correlate (conjugate spectrum multiply).
      Image out = Image::zeros(width_, height_, channels_);
      const int ow = width_ / factor_, oh = height_ / factor_;
      std::vector<std::complex<double>> up(plane_count());
      std::vector<std::complex<double>> spectrum(plane_count());
      for (int c = 0; c < channels_; ++c) {
        std::fill(up.begin(), up.end(), std::complex<double>{0.0, 0.0});
        for (int y = 0; y < oh; ++y)
          for (int xo = 0; xo < ow; ++xo)
            up[static_cast<std::size_t>(y) * factor_ * width_ + xo * factor_] =
                v.re[static_cast<std::size_t>(c) * oh * ow + static_cast<std::size_t>(y) * ow + xo];
        detail::dft2(height_, width_, up.data(), spectrum.data(), false);
        for (std::size_t i = 0; i < spectrum.size(); ++i)
          spectrum[i] *= std::conj(kernel_freq_[i]);
        detail::dft2(height_, width_, spectrum.data(), up.data(), true);
        auto plane = out.plane(c);
        for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = up[i].real();
      }
      return out;
    }
  }
  throw Error("unreachable model kind");
}

Image ForwardModel::grad_g(const Image& x, const MeasurementVector& y) const {
  check_input(x);
  check_output(y);
  return adjoint(apply(x) - y);
}

double ForwardModel::data_fidelity(const Image& x, const MeasurementVector& y) const {
  check_input(x);
  check_output(y);
  double r = norm2(apply(x) - y);
  return 0.5 * r * r;
}

namespace {

// Conjugate-symmetrized zero-filled spectrum of the measurements; for a
// symmetric mask this is the frequency-domain image of H^T y up to the mask.
std::vector<std::complex<double>> symmetrized_spectrum(
    const RadialMask& mask, const std::vector<std::size_t>& kept_indices,
    const MeasurementVector& y, int channel) {
  const std::size_t kept = kept_indices.size();
  std::vector<std::complex<double>> full(static_cast<std::size_t>(mask.width) * mask.height,
                                         std::complex<double>{0.0, 0.0});
  for (std::size_t k = 0; k < kept; ++k)
    full[kept_indices[k]] = {y.re[channel * kept + k], y.im[channel * kept + k]};
  std::vector<std::complex<double>> sym(full.size());
  for (int yy = 0; yy < mask.height; ++yy)
    for (int xx = 0; xx < mask.width; ++xx) {
      std::size_t idx = static_cast<std::size_t>(yy) * mask.width + xx;
      std::size_t mirror =
          static_cast<std::size_t>((mask.height - yy) % mask.height) * mask.width +
          (mask.width - xx) % mask.width;
      sym[idx] = 0.5 * (full[idx] + std::conj(full[mirror]));
    }
  return sym;
}

}  // namespace

Image ForwardModel::prox_g(const Image& z, double gamma, const MeasurementVector& y,
                           const Image* x0_hint) const {
  check_input(z);
  check_output(y);
  if (!(gamma > 0.0)) throw ConfigError("prox_g needs gamma > 0");
  switch (kind_) {
    case ModelKind::identity: {
      Image out = z;
      for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = (z.data[i] + gamma * y.re[i]) / (1.0 + gamma);
      return out;
    }
    case ModelKind::masked_fourier: {
      // Per kept frequency: x_hat = (z_hat + gamma*y_hat) / (1 + gamma); the
      // measurements are symmetrized first so the solution stays real.
      Image out = Image::zeros(width_, height_, channels_);
      std::vector<std::complex<double>> buf(plane_count());
      for (int c = 0; c < channels_; ++c) {
        auto z_hat = detail::dft2_real(height_, width_, z.plane(c));
        auto y_sym = symmetrized_spectrum(*mask_, kept_indices_, y, c);
        for (std::size_t i = 0; i < z_hat.size(); ++i) {
          const double kept = mask_->kept[i] ? 1.0 : 0.0;
          z_hat[i] = (z_hat[i] + gamma * kept * y_sym[i]) / (1.0 + gamma * kept);
        }
        detail::dft2(height_, width_, z_hat.data(), buf.data(), true);
        auto plane = out.plane(c);
        for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = buf[i].real();
      }
      return out;
    }
    case ModelKind::blur_downsample:
      return prox_g_via_cg(*this, z, gamma, y, 1e-8, 500, x0_hint);
  }
  throw Error("unreachable model kind");
}

Image prox_g_via_cg(const ForwardModel& model, const Image& z, double gamma,
                    const MeasurementVector& y, double tol, int max_iters,
                    const Image* x0_hint) {
  // Solve (I + gamma H^T H) x = z + gamma H^T y.
  Image rhs = model.adjoint(y);
  rhs *= gamma;
  rhs += z;

  auto apply_op = [&](const Image& v) {
    Image out = model.adjoint(model.apply(v));
    out *= gamma;
    out += v;
    return out;
  };

  Image x = x0_hint != nullptr ? *x0_hint : Image::zeros(z.width, z.height, z.channels);
  Image r = rhs - apply_op(x);
  Image p = r;
  double rr = dot(r, r);
  const double rhs_norm = norm2(rhs);
  const double stop = tol * (rhs_norm > 0 ? rhs_norm : 1.0);

  for (int it = 0; it < max_iters; ++it) {
    if (std::sqrt(rr) <= stop) return x;
    Image ap = apply_op(p);
    double alpha = rr / dot(p, ap);
    x += alpha * p;
    r -= alpha * ap;
    double rr_new = dot(r, r);
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  if (std::sqrt(rr) <= stop) return x;
  throw Error("prox_g CG did not converge; final relative residual " +
              std::to_string(std::sqrt(rr) / (rhs_norm > 0 ? rhs_norm : 1.0)));
}

}  // namespace pnp
