#include "pnp/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>

namespace pnp {

namespace {

// Skips whitespace and '#' comments (which run to end of line).
void skip_pgm_filler(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

long read_pgm_int(std::istream& in, const char* what) {
  skip_pgm_filler(in);
  long value = -1;
  if (!(in >> value) || value < 0)
    throw Error(std::string("malformed PGM header: bad ") + what);
  return value;
}

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open PGM file: " + path);

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5')
    throw Error("not a binary PGM (missing P5 magic): " + path);

  long width = read_pgm_int(in, "width");
  long height = read_pgm_int(in, "height");
  long maxval = read_pgm_int(in, "maxval");
  if (width < 1 || height < 1) throw Error("malformed PGM header: bad size");
  if (maxval != 255) throw Error("unsupported PGM maxval (must be 255)");
  in.get();  // single whitespace byte separating header and payload

  std::vector<std::uint8_t> raw(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw Error("truncated PGM payload: " + path);

  Image img = Image::zeros(static_cast<int>(width), static_cast<int>(height), 1);
  for (std::size_t i = 0; i < raw.size(); ++i) img.data[i] = raw[i];
  return img;
}

void write_pgm(const Image& img, const std::string& path) {
  img.validate();
  if (img.channels != 1) throw ConfigError("write_pgm requires a single channel");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<std::uint8_t> raw(img.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double v = std::clamp(img.data[i], 0.0, 255.0);
    raw[i] = static_cast<std::uint8_t>(std::lround(v));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error("failed writing PGM payload: " + path);
}

std::vector<std::uint8_t> encode_imgf64(const Image& img) {
  img.validate();
  std::vector<std::uint8_t> out;
  out.reserve(16 + img.size() * 8);
  for (char c : {'I', 'M', 'F', '8'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u32_le(out, static_cast<std::uint32_t>(img.width));
  put_u32_le(out, static_cast<std::uint32_t>(img.height));
  put_u32_le(out, static_cast<std::uint32_t>(img.channels));
  for (double v : img.data) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int b = 0; b < 8; ++b)
      out.push_back(static_cast<std::uint8_t>((bits >> (8 * b)) & 0xff));
  }
  return out;
}

Image decode_imgf64(const std::uint8_t* bytes, std::size_t size) {
  if (size < 16 || std::memcmp(bytes, "IMF8", 4) != 0)
    throw Error("bad IMGF64 magic");
  std::uint32_t w = get_u32_le(bytes + 4);
  std::uint32_t h = get_u32_le(bytes + 8);
  std::uint32_t c = get_u32_le(bytes + 12);
  if (w == 0 || h == 0 || c == 0) throw Error("IMGF64 header declares empty image");
  std::uint64_t count = static_cast<std::uint64_t>(w) * h * c;
  if (size != 16 + count * 8)
    throw Error("IMGF64 size mismatch between header and payload");
  std::vector<double> samples(count);
  const std::uint8_t* p = bytes + 16;
  for (std::uint64_t i = 0; i < count; ++i, p += 8) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    std::memcpy(&samples[i], &bits, 8);
  }
  Image img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.channels = static_cast<int>(c);
  img.data = std::move(samples);
  img.validate();
  return img;
}

Image read_imgf64(std::istream& in) {
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_imgf64(bytes.data(), bytes.size());
}

void write_imgf64(const Image& img, std::ostream& out) {
  auto bytes = encode_imgf64(img);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing IMGF64 stream");
}

Image read_imgf64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open IMGF64 file: " + path);
  return read_imgf64(in);
}

void write_imgf64(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  write_imgf64(img, out);
}

Image measurement_to_image(const MeasurementVector& v) {
  v.validate();
  if (v.domain == Domain::spatial) return v.as_image();
  Image img = Image::zeros(static_cast<int>(v.size()), 1, 2);
  std::copy(v.re.begin(), v.re.end(), img.data.begin());
  std::copy(v.im.begin(), v.im.end(), img.data.begin() + v.size());
  return img;
}

MeasurementVector measurement_from_image(const Image& img, Domain domain) {
  img.validate();
  if (domain == Domain::spatial) return MeasurementVector::spatial(img);
  if (img.channels != 2 || img.height != 1)
    throw Error("frequency measurement file must be m x 1 x 2");
  std::vector<double> re(img.data.begin(), img.data.begin() + img.plane_size());
  std::vector<double> im(img.data.begin() + img.plane_size(), img.data.end());
  return MeasurementVector::frequency(std::move(re), std::move(im));
}

}  // namespace pnp
