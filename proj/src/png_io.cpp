#include "splatpack/png_io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>

namespace splatpack {

namespace {

void append_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
  append_u32be(out, std::uint32_t(payload.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const auto crc =
      ::crc32(0, out.data() + crc_start, uInt(out.size() - crc_start));
  append_u32be(out, std::uint32_t(crc));
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.width < 1 || image.height < 1) {
    throw Error("cannot encode an empty image");
  }
  // Raw scanlines, filter byte 0 per row.
  std::vector<std::uint8_t> raw;
  raw.reserve(std::size_t(image.height) * (1 + std::size_t(image.width) * 3));
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        raw.push_back(std::uint8_t(std::floor(clamp01(image.at(y, x, c)) * 255.0 + 0.5)));
      }
    }
  }

  uLongf compressed_size = ::compressBound(uLong(raw.size()));
  std::vector<std::uint8_t> compressed(compressed_size);
  if (::compress2(compressed.data(), &compressed_size, raw.data(), uLong(raw.size()), 6) !=
      Z_OK) {
    throw Error("deflate failure while encoding PNG");
  }
  compressed.resize(compressed_size);

  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  append_u32be(ihdr, std::uint32_t(image.width));
  append_u32be(ihdr, std::uint32_t(image.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", compressed);
  append_chunk(out, "IEND", {});
  return out;
}

void save_png(const Image& image, const std::string& path) {
  const auto bytes = encode_png(image);
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot write " + path);
  }
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

}  // namespace splatpack
