#include <chrono>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pnp/denoiser.hpp"
#include "pnp/image_io.hpp"
#include "test_images.hpp"

using namespace pnp;
namespace fs = std::filesystem;

TEST_SUITE("external_denoiser") {

TEST_CASE("byte-copy utility acts as the identity denoiser, bitwise") {
  Image z = testing::random_image(13, 9, 2, 71, -1e6, 1e6);
  Image out = external_denoise({"/bin/cat"}, z, 30.0);
  CHECK(out.data == z.data);
  CHECK(out.same_shape(z));
}

TEST_CASE("truncated output is reported as malformed") {
  Image z = testing::random_image(4, 4, 1, 72);
  CHECK_THROWS_WITH_AS(external_denoise({"/bin/sh", "-c", "printf abc"}, z, 30.0),
                       doctest::Contains("malformed"), Error);
}

TEST_CASE("nonzero exit carries captured stderr") {
  Image z = testing::random_image(4, 4, 1, 73);
  try {
    external_denoise({"/bin/sh", "-c", "echo boom >&2; exit 3"}, z, 30.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    std::string what = e.what();
    CHECK(what.find("code 3") != std::string::npos);
    CHECK(what.find("boom") != std::string::npos);
  }
}

TEST_CASE("dimension change is rejected") {
  auto dir = fs::temp_directory_path() / "pnp_ext_tests";
  fs::create_directories(dir);
  auto fixed = dir / "one_pixel.imgf64";
  write_imgf64(Image::constant(1, 1, 1, 5.0), fixed.string());
  Image z = testing::random_image(4, 4, 1, 74);
  CHECK_THROWS_WITH_AS(
      external_denoise({"/bin/sh", "-c", "cat " + fixed.string()}, z, 30.0),
      doctest::Contains("dimensions"), Error);
}

TEST_CASE("timeout kills the child and reports it") {
  Image z = testing::random_image(4, 4, 1, 75);
  auto start = std::chrono::steady_clock::now();
  CHECK_THROWS_WITH_AS(
      external_denoise({"/bin/sh", "-c", "sleep 30"}, z, 0.25),
      doctest::Contains("timed out"), Error);
  auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(std::chrono::duration<double>(elapsed).count() < 5.0);
}

TEST_CASE("spawn failure surfaces as an error") {
  Image z = testing::random_image(4, 4, 1, 76);
  // exec fails in the child, which exits 127 with a message on stderr.
  CHECK_THROWS_AS(external_denoise({"/nonexistent/denoiser"}, z, 10.0), Error);
}

TEST_CASE("stdin is consumed even when the child writes a lot first") {
  // Child that emits its own valid payload irrespective of input ordering;
  // exercises the interleaved pipe pump with a large image.
  Image z = testing::random_image(256, 256, 1, 77);
  Image out = external_denoise({"/bin/cat"}, z, 30.0);
  CHECK(out.data == z.data);
}

}  // TEST_SUITE
