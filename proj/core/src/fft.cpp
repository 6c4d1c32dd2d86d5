#include "fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace pnp::detail {

namespace {

// FFTW planning is not thread-safe; execution via fftw_execute_dft on
// distinct arrays is. Plans are cached per (h, w, sign) and created with
// FFTW_UNALIGNED so they may run on any buffer.
class PlanCache {
 public:
  fftw_plan get(int h, int w, int sign) {
    std::scoped_lock lock(mutex_);
    auto key = std::tuple{h, w, sign};
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<fftw_complex> scratch_in(static_cast<std::size_t>(h) * w);
    std::vector<fftw_complex> scratch_out(scratch_in.size());
    fftw_plan plan = fftw_plan_dft_2d(h, w, scratch_in.data(), scratch_out.data(),
                                      sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void dft2(int height, int width, const std::complex<double>* in,
          std::complex<double>* out, bool inverse) {
  const int sign = inverse ? FFTW_BACKWARD : FFTW_FORWARD;
  fftw_plan plan = cache().get(height, width, sign);
  // fftw_complex and std::complex<double> share layout.
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  const double scale = 1.0 / std::sqrt(static_cast<double>(height) * width);
  const std::size_t n = static_cast<std::size_t>(height) * width;
  for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
}

std::vector<std::complex<double>> dft2_real(int height, int width,
                                            std::span<const double> plane) {
  std::vector<std::complex<double>> in(plane.size());
  for (std::size_t i = 0; i < plane.size(); ++i) in[i] = plane[i];
  std::vector<std::complex<double>> out(plane.size());
  dft2(height, width, in.data(), out.data(), false);
  return out;
}

}  // namespace pnp::detail
