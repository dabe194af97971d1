#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "splatpack/sh.hpp"
#include "splatpack/types.hpp"

namespace splatpack {

/// Columnar store of N Gaussians. Raw attributes keep the stored parameterization:
/// opacity is pre-sigmoid, scale is log-space, rotation is a (w,x,y,z) quaternion
/// normalized on use. sh_rest rows are coefficient-major with RGB interleaved:
/// [c1_r c1_g c1_b c2_r ...].
struct GaussianCloud {
  MatX3 positions;
  MatX3 sh_dc;
  MatXR sh_rest;
  VecX raw_opacity;
  MatX3 raw_scale;
  MatX4 rotation;
  int sh_degree = 0;

  std::int64_t count() const { return positions.rows(); }

  static GaussianCloud zeros(std::int64_t n, int degree) {
    GaussianCloud c;
    c.positions = MatX3::Zero(n, 3);
    c.sh_dc = MatX3::Zero(n, 3);
    c.sh_rest = MatXR::Zero(n, sh::rest_width(degree));
    c.raw_opacity = VecX::Zero(n);
    c.raw_scale = MatX3::Zero(n, 3);
    c.rotation = MatX4::Zero(n, 4);
    c.rotation.col(0).setOnes();
    c.sh_degree = degree;
    return c;
  }

  /// Activated opacity of Gaussian i, in (0,1).
  double opacity(std::int64_t i) const { return sigmoid(raw_opacity(i)); }

  /// Activated scale of Gaussian i, componentwise positive.
  Vec3 scale(std::int64_t i) const { return raw_scale.row(i).array().exp(); }

  void validate() const {
    const std::int64_t n = count();
    if (sh_degree < 0 || sh_degree > 3) {
      throw Error("unsupported SH degree " + std::to_string(sh_degree));
    }
    if (sh_dc.rows() != n || raw_opacity.size() != n || raw_scale.rows() != n ||
        rotation.rows() != n || sh_rest.rows() != n) {
      throw Error("inconsistent attribute plane row counts");
    }
    if (sh_rest.cols() != sh::rest_width(sh_degree)) {
      throw Error("sh_rest width " + std::to_string(sh_rest.cols()) +
                  " does not match degree " + std::to_string(sh_degree));
    }
  }
};

/// Drops SH bands above `to_degree`, keeping the leading coefficient columns.
/// All other attributes are copied unchanged.
inline GaussianCloud sh_truncate(const GaussianCloud& cloud, int to_degree) {
  if (to_degree > cloud.sh_degree || to_degree < 0) {
    throw Error("invalid truncation: degree " + std::to_string(cloud.sh_degree) + " -> " +
                std::to_string(to_degree));
  }
  GaussianCloud out = cloud;
  out.sh_rest = cloud.sh_rest.leftCols(sh::rest_width(to_degree)).eval();
  out.sh_degree = to_degree;
  return out;
}

}  // namespace splatpack
