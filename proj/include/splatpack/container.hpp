#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splatpack/gaussian_cloud.hpp"
#include "splatpack/vq.hpp"

namespace splatpack {

// Compact container layout (all integers and FP16 little-endian), version 1:
//   header: magic "LGSC", version u16, count u64, sh_degree u8,
//           codebook_k u32, codebook_dim u32, vq_member_count u64
//   planes: positions (N x 3 f16), sh_dc (N x 3 f16), raw_opacity (N f16),
//           raw_scale (N x 3 f16), rotation (N x 4 f16),
//           non-member sh_rest ((N - M) x dim f16, ascending index order),
//           membership bitmap (1 bit per Gaussian, LSB-first, byte padded),
//           code indices (M x u16, ascending member order),
//           codebook (k x dim f16).

inline constexpr std::size_t kContainerHeaderSize = 31;
inline constexpr std::uint16_t kContainerVersion = 1;

/// Total byte length implied by the header fields.
std::size_t container_size(std::uint64_t count, int sh_degree, std::uint32_t codebook_k,
                           std::uint32_t codebook_dim, std::uint64_t member_count);

std::vector<std::uint8_t> encode(const GaussianCloud& cloud, const Codebook& codebook,
                                 const AssignmentVector& assignments);

/// FP16-only container with no quantized members.
std::vector<std::uint8_t> encode(const GaussianCloud& cloud);

struct Decoded {
  GaussianCloud cloud;  // member SH-rest materialized from the codebook
  Codebook codebook;
  AssignmentVector assignments;
};

Decoded decode(const std::uint8_t* data, std::size_t size);
Decoded decode(const std::vector<std::uint8_t>& bytes);
Decoded load_container(const std::string& path);
void save_container(const std::vector<std::uint8_t>& bytes, const std::string& path);

}  // namespace splatpack
