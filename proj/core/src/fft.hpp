#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pnp::detail {

/// Unitary 2-D DFT of a row-major h x w grid (scale 1/sqrt(h*w) in both
/// directions). Out-of-place; in and out must not alias. Thread-safe.
void dft2(int height, int width, const std::complex<double>* in,
          std::complex<double>* out, bool inverse);

/// Forward unitary DFT of a real plane.
std::vector<std::complex<double>> dft2_real(int height, int width,
                                            std::span<const double> plane);

}  // namespace pnp::detail
