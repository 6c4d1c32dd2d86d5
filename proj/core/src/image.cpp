#include "pnp/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pnp {

Image::Image(int width, int height, int channels, std::vector<double> samples)
    : width(width), height(height), channels(channels), data(std::move(samples)) {
  validate();
}

Image Image::zeros(int width, int height, int channels) {
  return constant(width, height, channels, 0.0);
}

Image Image::constant(int width, int height, int channels, double value) {
  if (width < 1 || height < 1 || channels < 1)
    throw ConfigError("image dimensions must be >= 1");
  Image img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.data.assign(static_cast<std::size_t>(width) * height * channels, value);
  return img;
}

void Image::validate() const {
  if (width < 1 || height < 1 || channels < 1)
    throw ConfigError("image dimensions must be >= 1");
  if (data.size() != static_cast<std::size_t>(width) * height * channels)
    throw ConfigError("image sample count does not match width*height*channels");
  if (!all_finite(*this)) throw ConfigError("image contains non-finite samples");
}

namespace {

void require_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ConfigError("image shape mismatch");
}

}  // namespace

Image& Image::operator+=(const Image& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] += rhs.data[i];
  return *this;
}

Image& Image::operator-=(const Image& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] -= rhs.data[i];
  return *this;
}

Image& Image::operator*=(double s) {
  for (double& v : data) v *= s;
  return *this;
}

Image operator+(Image lhs, const Image& rhs) { return lhs += rhs; }
Image operator-(Image lhs, const Image& rhs) { return lhs -= rhs; }
Image operator*(Image img, double s) { return img *= s; }
Image operator*(double s, Image img) { return img *= s; }

double norm2(const Image& img) {
  double acc = 0.0;
  for (double v : img.data) acc += v * v;
  return std::sqrt(acc);
}

double dot(const Image& a, const Image& b) {
  require_same_shape(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
  return acc;
}

double max_abs_diff(const Image& a, const Image& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

bool all_finite(const Image& img) {
  for (double v : img.data)
    if (!std::isfinite(v)) return false;
  return true;
}

MeasurementVector MeasurementVector::spatial(const Image& img) {
  MeasurementVector v;
  v.domain = Domain::spatial;
  v.width = img.width;
  v.height = img.height;
  v.channels = img.channels;
  v.re = img.data;
  return v;
}

MeasurementVector MeasurementVector::frequency(std::vector<double> re,
                                               std::vector<double> im) {
  if (re.size() != im.size())
    throw ConfigError("frequency measurement needs matching re/im lengths");
  MeasurementVector v;
  v.domain = Domain::frequency;
  v.width = static_cast<int>(re.size());
  v.height = 1;
  v.channels = 1;
  v.re = std::move(re);
  v.im = std::move(im);
  return v;
}

Image MeasurementVector::as_image() const {
  if (domain != Domain::spatial)
    throw ConfigError("only spatial measurements have an image view");
  return Image(width, height, channels, re);
}

void MeasurementVector::validate() const {
  if (re.empty()) throw ConfigError("empty measurement vector");
  if (!im.empty() && im.size() != re.size())
    throw ConfigError("re/im length mismatch in measurement vector");
  auto finite = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  if (!finite(re) || !finite(im))
    throw ConfigError("measurement vector contains non-finite samples");
  if (domain == Domain::spatial &&
      re.size() != static_cast<std::size_t>(width) * height * channels)
    throw ConfigError("spatial measurement shape mismatch");
}

MeasurementVector& MeasurementVector::operator-=(const MeasurementVector& rhs) {
  if (re.size() != rhs.re.size() || im.size() != rhs.im.size())
    throw ConfigError("measurement vector shape mismatch");
  for (std::size_t i = 0; i < re.size(); ++i) re[i] -= rhs.re[i];
  for (std::size_t i = 0; i < im.size(); ++i) im[i] -= rhs.im[i];
  return *this;
}

MeasurementVector operator-(MeasurementVector lhs, const MeasurementVector& rhs) {
  return lhs -= rhs;
}

double norm2(const MeasurementVector& v) {
  double acc = 0.0;
  for (double x : v.re) acc += x * x;
  for (double x : v.im) acc += x * x;
  return std::sqrt(acc);
}

double dot_real(const MeasurementVector& a, const MeasurementVector& b) {
  if (a.re.size() != b.re.size() || a.im.size() != b.im.size())
    throw ConfigError("measurement vector shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.re.size(); ++i) acc += a.re[i] * b.re[i];
  for (std::size_t i = 0; i < a.im.size(); ++i) acc += a.im[i] * b.im[i];
  return acc;
}

namespace {

double snr_from_norms(double ref_norm, double err_norm) {
  if (err_norm == 0.0) return kSnrCapDb;
  double value = 20.0 * std::log10(ref_norm / err_norm);
  return std::min(value, kSnrCapDb);
}

}  // namespace

double snr_db(const Image& reference, const Image& test) {
  require_same_shape(reference, test);
  double ref_norm = norm2(reference);
  if (ref_norm == 0.0) throw ConfigError("snr_db: all-zero reference");
  return snr_from_norms(ref_norm, norm2(reference - test));
}

double snr_db(const MeasurementVector& reference, const MeasurementVector& test) {
  double ref_norm = norm2(reference);
  if (ref_norm == 0.0) throw ConfigError("snr_db: all-zero reference");
  return snr_from_norms(ref_norm, norm2(reference - test));
}

namespace detail {

double GaussianSampler::next(double sigma) {
  if (has_spare_) {
    has_spare_ = false;
    return spare_ * sigma;
  }
  // Box-Muller on two 53-bit uniforms; u1 in (0,1], u2 in [0,1).
  double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta) * sigma;
}

}  // namespace detail

Image add_awgn(const Image& x, const NoiseSpec& noise) {
  if (noise.sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
  if (noise.sigma == 0.0) return x;
  detail::GaussianSampler gauss(noise.seed);
  Image out = x;
  for (double& v : out.data) v += gauss.next(noise.sigma);
  return out;
}

MeasurementVector add_awgn(const MeasurementVector& v, const NoiseSpec& noise) {
  if (noise.sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
  if (noise.sigma == 0.0) return v;
  detail::GaussianSampler gauss(noise.seed);
  MeasurementVector out = v;
  if (out.is_complex()) {
    // sigma/sqrt(2) per component keeps per-sample noise energy at sigma^2.
    const double s = noise.sigma / std::sqrt(2.0);
    for (std::size_t i = 0; i < out.re.size(); ++i) {
      out.re[i] += gauss.next(s);
      out.im[i] += gauss.next(s);
    }
  } else {
    for (double& x : out.re) x += gauss.next(noise.sigma);
  }
  return out;
}

double sigma_for_input_snr(const Image& x, double target_snr_db) {
  double ref_norm = norm2(x);
  if (ref_norm == 0.0) throw ConfigError("sigma_for_input_snr: all-zero image");
  if (std::isinf(target_snr_db) && target_snr_db > 0) return 0.0;
  double n = static_cast<double>(x.size());
  return ref_norm / (std::sqrt(n) * std::pow(10.0, target_snr_db / 20.0));
}

}  // namespace pnp
