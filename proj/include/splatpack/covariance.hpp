#pragma once

#include <Eigen/Core>
#include <cmath>

#include "splatpack/types.hpp"

namespace splatpack {

/// Rotation matrix of a quaternion given as (w, x, y, z). Normalizes internally;
/// a zero-norm quaternion is invalid.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> rotation_from_quat(const Eigen::Matrix<Scalar, 4, 1>& q) {
  const Scalar n = q.norm();
  if (!(n > Scalar(0))) {
    throw Error("invalid rotation: zero-norm quaternion");
  }
  const Scalar w = q[0] / n, x = q[1] / n, y = q[2] / n, z = q[3] / n;
  Eigen::Matrix<Scalar, 3, 3> r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

/// World-space covariance Sigma = R * S * S^T * R^T with S = diag(exp(raw_scale)).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> covariance_from(const Eigen::Matrix<Scalar, 3, 1>& raw_scale,
                                            const Eigen::Matrix<Scalar, 4, 1>& rotation) {
  const Eigen::Matrix<Scalar, 3, 3> r = rotation_from_quat(rotation);
  const Eigen::Matrix<Scalar, 3, 1> s = raw_scale.array().exp();
  Eigen::Matrix<Scalar, 3, 3> m = r * s.asDiagonal();
  return m * m.transpose();
}

inline Mat3 covariance_from(const Vec3& raw_scale, const Vec4& rotation) {
  return covariance_from<double>(raw_scale, rotation);
}

}  // namespace splatpack
