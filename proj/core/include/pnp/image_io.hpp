#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pnp/image.hpp"

namespace pnp {

/// Binary PGM ("P5"), maxval 255, whitespace/comment-tolerant header.
/// Reading yields a single-channel image; writing requires one channel,
/// clamps to [0,255], then rounds half-away-from-zero.
Image read_pgm(const std::string& path);
void write_pgm(const Image& img, const std::string& path);

/// IMGF64 interchange: magic "IMF8", three u32 little-endian (width, height,
/// channels), then width*height*channels IEEE-754 binary64 little-endian
/// samples, row-major inside each channel plane, plane 0 first. Bit-exact
/// round trip for any finite doubles; also the external-denoiser wire format.
Image read_imgf64(const std::string& path);
void write_imgf64(const Image& img, const std::string& path);

Image read_imgf64(std::istream& in);
void write_imgf64(const Image& img, std::ostream& out);

std::vector<std::uint8_t> encode_imgf64(const Image& img);
Image decode_imgf64(const std::uint8_t* bytes, std::size_t size);

/// File packing for measurement vectors: spatial measurements are stored with
/// their image shape; frequency (complex) measurements as an m x 1 x 2 image
/// holding the real plane then the imaginary plane.
Image measurement_to_image(const MeasurementVector& v);
MeasurementVector measurement_from_image(const Image& img, Domain domain);

}  // namespace pnp
