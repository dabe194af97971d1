#pragma once

#include <Eigen/Core>

#include "splatpack/types.hpp"

namespace splatpack {

// Real spherical-harmonic basis constants, degree 0..3, in the sign convention
// used by Gaussian-splat color storage. 17 significant digits.
namespace sh {

inline constexpr double kC0 = 0.28209479177387814;
inline constexpr double kC1 = 0.4886025119029199;
inline constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                                  -1.0925484305920792, 0.5462742152960396};
inline constexpr double kC3[7] = {-0.5900435899266435, 2.890611442640554,  -0.4570457994644658,
                                  0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                                  -0.5900435899266435};

/// Number of non-DC coefficients per channel at a given degree.
inline constexpr int rest_coeff_count(int degree) { return (degree + 1) * (degree + 1) - 1; }

/// Width of the sh_rest plane (all three channels interleaved per coefficient).
inline constexpr int rest_width(int degree) { return 3 * rest_coeff_count(degree); }

/// Fills basis[0..n-1] with the non-DC basis function values at a unit direction,
/// n = rest_coeff_count(degree). Coefficient order matches the sh_rest layout.
template <typename Scalar>
void eval_rest_basis(int degree, const Eigen::Matrix<Scalar, 3, 1>& dir, Scalar* basis) {
  const Scalar x = dir.x(), y = dir.y(), z = dir.z();
  if (degree >= 1) {
    basis[0] = Scalar(-kC1) * y;
    basis[1] = Scalar(kC1) * z;
    basis[2] = Scalar(-kC1) * x;
  }
  if (degree >= 2) {
    const Scalar xx = x * x, yy = y * y, zz = z * z;
    basis[3] = Scalar(kC2[0]) * x * y;
    basis[4] = Scalar(kC2[1]) * y * z;
    basis[5] = Scalar(kC2[2]) * (Scalar(2) * zz - xx - yy);
    basis[6] = Scalar(kC2[3]) * x * z;
    basis[7] = Scalar(kC2[4]) * (xx - yy);
    if (degree >= 3) {
      basis[8] = Scalar(kC3[0]) * y * (Scalar(3) * xx - yy);
      basis[9] = Scalar(kC3[1]) * x * y * z;
      basis[10] = Scalar(kC3[2]) * y * (Scalar(4) * zz - xx - yy);
      basis[11] = Scalar(kC3[3]) * z * (Scalar(2) * zz - Scalar(3) * xx - Scalar(3) * yy);
      basis[12] = Scalar(kC3[4]) * x * (Scalar(4) * zz - xx - yy);
      basis[13] = Scalar(kC3[5]) * z * (xx - yy);
      basis[14] = Scalar(kC3[6]) * x * (xx - Scalar(3) * yy);
    }
  }
}

}  // namespace sh

/// View-dependent color: clamp_low(0.5 + C0*dc + sum c_lm Y_lm(dir), 0) per channel.
/// `rest` is one sh_rest row (coefficient-major, RGB interleaved); `dir` must be unit length.
inline Vec3 eval_sh(const Vec3& dc, Eigen::Ref<const Eigen::RowVectorXd> rest, int degree,
                    const Vec3& dir) {
  if (degree < 0 || degree > 3) {
    throw Error("unsupported SH degree " + std::to_string(degree));
  }
  Vec3 rgb = Vec3::Constant(0.5) + sh::kC0 * dc;
  double basis[15];
  sh::eval_rest_basis(degree, dir, basis);
  const int n = sh::rest_coeff_count(degree);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      rgb[c] += basis[i] * rest[3 * i + c];
    }
  }
  return rgb.cwiseMax(0.0);
}

}  // namespace splatpack
