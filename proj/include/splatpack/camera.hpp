#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "splatpack/types.hpp"

namespace splatpack {

/// Pinhole camera. `rotation` maps world to camera coordinates (+z forward,
/// +y down in the image), `translation` is the t of [R|t]: x_cam = R x_world + t.
struct Camera {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double fx = 1.0, fy = 1.0;
  double cx = 0.0, cy = 0.0;
  int width = 1, height = 1;

  Vec3 center() const { return -(rotation.transpose() * translation); }

  void validate() const {
    if (width < 1 || height < 1) {
      throw Error("camera viewport must be at least 1x1");
    }
    if (((rotation.transpose() * rotation) - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6) {
      throw Error("camera rotation is not orthonormal");
    }
  }
};

/// A calibrated view: camera plus its target image.
struct View {
  Camera camera;
  Image image;
};

/// Camera looking from `eye` toward `target`, world up = +z.
inline Camera look_at(const Vec3& eye, const Vec3& target, double fx, double fy, int width,
                      int height) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(Vec3::UnitZ());
  if (right.norm() < 1e-9) {
    right = forward.cross(Vec3::UnitY());
  }
  right.normalize();
  const Vec3 down = forward.cross(right).normalized();

  Camera cam;
  cam.rotation.row(0) = right;
  cam.rotation.row(1) = down;
  cam.rotation.row(2) = forward;
  cam.translation = -(cam.rotation * eye);
  cam.fx = fx;
  cam.fy = fy;
  cam.width = width;
  cam.height = height;
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  return cam;
}

}  // namespace splatpack
