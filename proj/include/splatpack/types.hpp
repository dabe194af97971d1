#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace splatpack {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;

// Attribute planes are row-major so one Gaussian's attributes are contiguous.
using MatX3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using MatX4 = Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor>;
using MatXR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input bytes; `offset` points at the offending position.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " (byte offset " + std::to_string(offset) + ")"), offset(offset) {}
  std::size_t offset;
};

/// Linear RGB image, values nominally in [0,1]. Pixel (x, y) lives in row y*width + x.
struct Image {
  int width = 0;
  int height = 0;
  MatX3 data;

  Image() = default;
  Image(int w, int h) : width(w), height(h), data(MatX3::Zero(std::int64_t(w) * h, 3)) {}

  std::int64_t pixel_count() const { return std::int64_t(width) * height; }
  double& at(int y, int x, int c) { return data(std::int64_t(y) * width + x, c); }
  double at(int y, int x, int c) const { return data(std::int64_t(y) * width + x, c); }
};

inline double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace splatpack
