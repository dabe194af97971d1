#include <doctest.h>

#include <string>

#include "fixtures.hpp"
#include "splatpack/ply_io.hpp"
#include "splatpack/rng.hpp"
#include "splatpack/sh.hpp"

using namespace splatpack;

namespace {

// Attribute planes snapped to float32, which is all the format can hold.
GaussianCloud snapped_cloud(std::int64_t n, int degree, std::uint64_t seed) {
  GaussianCloud cloud = fixtures::smooth_random_cloud(n, degree, seed);
  auto snap = [](double v) { return double(float(v)); };
  for (std::int64_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      cloud.positions(i, c) = snap(cloud.positions(i, c));
      cloud.sh_dc(i, c) = snap(cloud.sh_dc(i, c));
      cloud.raw_scale(i, c) = snap(cloud.raw_scale(i, c));
    }
    for (std::int64_t c = 0; c < cloud.sh_rest.cols(); ++c) {
      cloud.sh_rest(i, c) = snap(cloud.sh_rest(i, c));
    }
    cloud.raw_opacity(i) = snap(cloud.raw_opacity(i));
    for (int c = 0; c < 4; ++c) cloud.rotation(i, c) = snap(cloud.rotation(i, c));
  }
  return cloud;
}

std::string header_of(const std::vector<std::uint8_t>& bytes) {
  const std::string all(bytes.begin(), bytes.end());
  return all.substr(0, all.find("end_header\n") + 11);
}

}  // namespace

TEST_SUITE("ply") {
  TEST_CASE("one-vertex degree-3 file round-trips byte identical") {
    const GaussianCloud cloud = snapped_cloud(1, 3, 41);
    const auto bytes = write_ply(cloud);
    CHECK(header_of(bytes).find("element vertex 1") != std::string::npos);
    // 62 float properties per vertex.
    CHECK(bytes.size() == header_of(bytes).size() + 62 * 4);
    const auto again = write_ply(read_ply(bytes));
    CHECK(again == bytes);
  }

  TEST_CASE("empty cloud") {
    const GaussianCloud cloud = GaussianCloud::zeros(0, 3);
    const auto bytes = write_ply(cloud);
    CHECK(header_of(bytes).find("element vertex 0") != std::string::npos);
    CHECK(bytes.size() == header_of(bytes).size());
    const GaussianCloud back = read_ply(bytes);
    CHECK(back.count() == 0);
    CHECK(back.sh_degree == 3);
  }

  TEST_CASE("100-Gaussian round trip is bit exact") {
    const GaussianCloud cloud = snapped_cloud(100, 3, 42);
    const GaussianCloud back = read_ply(write_ply(cloud));
    CHECK(back.positions == cloud.positions);
    CHECK(back.sh_dc == cloud.sh_dc);
    CHECK(back.sh_rest == cloud.sh_rest);
    CHECK(back.raw_opacity == cloud.raw_opacity);
    CHECK(back.raw_scale == cloud.raw_scale);
    CHECK(back.rotation == cloud.rotation);
    CHECK(back.sh_degree == cloud.sh_degree);
  }

  TEST_CASE("degree-2 layout carries 41 properties") {
    const GaussianCloud cloud = snapped_cloud(3, 2, 43);
    const auto bytes = write_ply(cloud);
    const std::string header = header_of(bytes);
    std::size_t props = 0;
    for (std::size_t pos = header.find("property"); pos != std::string::npos;
         pos = header.find("property", pos + 1)) {
      ++props;
    }
    CHECK(props == 41);
    CHECK(read_ply(bytes).sh_degree == 2);
  }

  TEST_CASE("write after read is the identity on conforming files") {
    for (int degree : {0, 1, 2, 3}) {
      const auto golden = write_ply(snapped_cloud(17, degree, 44 + degree));
      CHECK(write_ply(read_ply(golden)) == golden);
    }
  }

  TEST_CASE("malformed inputs raise structured errors") {
    const std::string ascii = "ply\nformat ascii 1.0\nelement vertex 0\nend_header\n";
    CHECK_THROWS_AS(read_ply(std::vector<std::uint8_t>(ascii.begin(), ascii.end())),
                    ParseError);

    const std::string bad_magic = "plz\nformat binary_little_endian 1.0\nend_header\n";
    CHECK_THROWS_AS(read_ply(std::vector<std::uint8_t>(bad_magic.begin(), bad_magic.end())),
                    ParseError);

    // f_rest count that matches no degree.
    std::string odd_layout = "ply\nformat binary_little_endian 1.0\nelement vertex 0\n";
    const char* fixed[] = {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"};
    for (const char* name : fixed) odd_layout += std::string("property float ") + name + "\n";
    for (int i = 0; i < 10; ++i) {
      odd_layout += "property float f_rest_" + std::to_string(i) + "\n";
    }
    odd_layout += "property float opacity\n";
    for (int i = 0; i < 3; ++i) odd_layout += "property float scale_" + std::to_string(i) + "\n";
    for (int i = 0; i < 4; ++i) odd_layout += "property float rot_" + std::to_string(i) + "\n";
    odd_layout += "end_header\n";
    CHECK_THROWS_WITH_AS(
        read_ply(std::vector<std::uint8_t>(odd_layout.begin(), odd_layout.end())),
        doctest::Contains("does not match any SH degree"), Error);

    // Unknown extra property is rejected, not skipped.
    auto golden = write_ply(snapped_cloud(1, 0, 45));
    std::string text(golden.begin(), golden.end());
    const auto at = text.find("property float opacity");
    text.insert(at, "property float mystery\n");
    CHECK_THROWS_WITH_AS(read_ply(std::vector<std::uint8_t>(text.begin(), text.end())),
                         doctest::Contains("mystery"), Error);

    // Truncated body.
    auto truncated = write_ply(snapped_cloud(4, 1, 46));
    truncated.resize(truncated.size() - 5);
    CHECK_THROWS_AS(read_ply(truncated), ParseError);
  }

  TEST_CASE("rest coefficients are de-interleaved from channel-major order") {
    GaussianCloud cloud = GaussianCloud::zeros(1, 1);
    // Internal layout: [c1_r c1_g c1_b c2_r ...]; file layout groups channels.
    for (int k = 0; k < 3; ++k) {
      for (int ch = 0; ch < 3; ++ch) {
        cloud.sh_rest(0, 3 * k + ch) = double(float(100 * ch + k));
      }
    }
    const auto bytes = write_ply(cloud);
    const std::size_t header = header_of(bytes).size();
    // f_rest starts after x,y,z,nx,ny,nz,f_dc_0..2 = 9 floats.
    for (int j = 0; j < 9; ++j) {
      float v;
      std::memcpy(&v, bytes.data() + header + (9 + j) * 4, 4);
      const int ch = j / 3, k = j % 3;
      CHECK(v == float(100 * ch + k));
    }
    CHECK(read_ply(bytes).sh_rest == cloud.sh_rest);
  }
}
