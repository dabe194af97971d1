#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace splatpack {

// IEEE 754 binary16 via Eigen::half: narrowing rounds to nearest-even,
// widening back is exact.

inline std::uint16_t fp16_bits(double v) {
  return Eigen::numext::bit_cast<std::uint16_t>(Eigen::half(float(v)));
}

inline double fp16_value(std::uint16_t bits) {
  return double(float(Eigen::numext::bit_cast<Eigen::half>(bits)));
}

/// Round-trips a double through binary16.
inline double fp16_round(double v) { return fp16_value(fp16_bits(v)); }

}  // namespace splatpack
