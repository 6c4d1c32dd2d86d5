#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pnp/errors.hpp"

namespace pnp {

/// Real-valued multi-channel raster. Samples are stored planar
/// (channel-major), row-major inside each plane, double precision, nominal
/// intensity range [0, 255]. Immutable by convention once constructed; all
/// operations in this toolkit take images by const reference and return new
/// values.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  Image() = default;
  Image(int width, int height, int channels, std::vector<double> samples);

  static Image zeros(int width, int height, int channels = 1);
  static Image constant(int width, int height, int channels, double value);

  std::size_t size() const { return data.size(); }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  double& at(int c, int y, int x) {
    return data[static_cast<std::size_t>(c) * plane_size() +
                static_cast<std::size_t>(y) * width + x];
  }
  double at(int c, int y, int x) const {
    return data[static_cast<std::size_t>(c) * plane_size() +
                static_cast<std::size_t>(y) * width + x];
  }

  std::span<double> plane(int c) {
    return std::span<double>(data).subspan(c * plane_size(), plane_size());
  }
  std::span<const double> plane(int c) const {
    return std::span<const double>(data).subspan(c * plane_size(), plane_size());
  }

  bool same_shape(const Image& other) const {
    return width == other.width && height == other.height &&
           channels == other.channels;
  }

  /// Throws ConfigError if dimensions are non-positive, the sample count does
  /// not match, or any sample is non-finite.
  void validate() const;

  Image& operator+=(const Image& rhs);
  Image& operator-=(const Image& rhs);
  Image& operator*=(double s);
};

Image operator+(Image lhs, const Image& rhs);
Image operator-(Image lhs, const Image& rhs);
Image operator*(Image img, double s);
Image operator*(double s, Image img);

/// l2 norm over all samples.
double norm2(const Image& img);
double dot(const Image& a, const Image& b);
/// Largest |sample| difference; shapes must match.
double max_abs_diff(const Image& a, const Image& b);
bool all_finite(const Image& img);

/// Measurement-domain tag. Frequency-domain vectors hold complex samples.
enum class Domain { spatial, frequency };

/// The measurement side of y = Hx + e. Real (spatial) measurements keep the
/// image shape so they can round-trip through files; frequency measurements
/// are flat complex vectors ordered by the owning model.
struct MeasurementVector {
  Domain domain = Domain::spatial;
  int width = 0;    // spatial shape (width = m, height = channels = 1 for frequency)
  int height = 0;
  int channels = 0;
  std::vector<double> re;
  std::vector<double> im;  // empty for real-valued measurements

  static MeasurementVector spatial(const Image& img);
  static MeasurementVector frequency(std::vector<double> re, std::vector<double> im);

  bool is_complex() const { return !im.empty(); }
  std::size_t size() const { return re.size(); }
  /// View of a spatial measurement as an Image; throws for frequency domain.
  Image as_image() const;
  void validate() const;

  MeasurementVector& operator-=(const MeasurementVector& rhs);
};

MeasurementVector operator-(MeasurementVector lhs, const MeasurementVector& rhs);

double norm2(const MeasurementVector& v);
/// Real inner product: Re<a, b> (sum of re*re + im*im).
double dot_real(const MeasurementVector& a, const MeasurementVector& b);

/// Additive white Gaussian noise parameters. Deterministic for a fixed seed.
struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// SNR sentinel used when test == reference exactly, and the cap applied to
/// any larger value so CSV outputs stay finite.
inline constexpr double kSnrCapDb = 300.0;

/// 20*log10(|ref| / |ref - test|). Returns kSnrCapDb when the error is zero
/// or the value exceeds the cap. Throws ConfigError on shape mismatch or an
/// all-zero reference.
double snr_db(const Image& reference, const Image& test);
double snr_db(const MeasurementVector& reference, const MeasurementVector& test);

/// input + i.i.d. N(0, sigma^2) noise. Complex measurements receive
/// independent noise of std sigma/sqrt(2) on each of the real and imaginary
/// parts, so the per-sample noise energy is sigma^2 in both domains.
Image add_awgn(const Image& x, const NoiseSpec& noise);
MeasurementVector add_awgn(const MeasurementVector& v, const NoiseSpec& noise);

/// Noise level that yields the requested input SNR in expectation:
/// sigma = |x|_2 / (sqrt(n) * 10^(target/20)). An infinite target gives 0.
double sigma_for_input_snr(const Image& x, double target_snr_db);

namespace detail {

/// Deterministic, portable Gaussian stream: mt19937_64 + Box-Muller.
/// std::normal_distribution is implementation-defined across standard
/// libraries, this is not.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}
  double next(double sigma);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace detail

}  // namespace pnp
