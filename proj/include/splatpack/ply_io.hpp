#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splatpack/gaussian_cloud.hpp"

namespace splatpack {

// Binary little-endian PLY in the layout Gaussian-splat trainers export:
// x y z nx ny nz f_dc_0..2 f_rest_0..(3K-1) opacity scale_0..2 rot_0..3,
// all float32, with f_rest channel-major in the file (all K coefficients of
// R, then G, then B). The degree is inferred from the f_rest count and must
// land exactly on a valid degree.

GaussianCloud read_ply(const std::uint8_t* data, std::size_t size);
GaussianCloud read_ply(const std::vector<std::uint8_t>& bytes);
GaussianCloud load_ply(const std::string& path);

std::vector<std::uint8_t> write_ply(const GaussianCloud& cloud);
void save_ply(const GaussianCloud& cloud, const std::string& path);

}  // namespace splatpack
