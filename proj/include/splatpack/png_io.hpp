#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splatpack/types.hpp"

namespace splatpack {

/// 8-bit RGB PNG; linear values are clamped to [0,1] then rounded half-up.
std::vector<std::uint8_t> encode_png(const Image& image);
void save_png(const Image& image, const std::string& path);

}  // namespace splatpack
