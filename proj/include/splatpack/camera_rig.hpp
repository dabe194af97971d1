#pragma once

#include <string>
#include <vector>

#include "splatpack/camera.hpp"

namespace splatpack {

/// Train/test camera sets as stored in the rig JSON file. Each view is an
/// object {fx, fy, cx, cy, width, height, R (9 row-major floats), t (3 floats)}
/// under the top-level "train" and "test" arrays.
struct CameraRig {
  std::vector<Camera> train;
  std::vector<Camera> test;
};

CameraRig load_camera_rig(const std::string& path);
void save_camera_rig(const CameraRig& rig, const std::string& path);

}  // namespace splatpack
