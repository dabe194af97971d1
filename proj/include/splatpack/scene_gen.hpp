#pragma once

#include <cstdint>
#include <vector>

#include "splatpack/camera.hpp"
#include "splatpack/gaussian_cloud.hpp"
#include "splatpack/types.hpp"

namespace splatpack {

/// Procedural scene recipe. Ground truth is the scene's own render, so every
/// quality delta measured downstream is attributable to compression alone.
struct SceneSpec {
  std::int64_t n_gaussians = 2000;
  int sh_degree = 3;
  Vec3 extent = Vec3(1.0, 1.0, 1.0);  // half-extent of the position box
  double opacity_min = -4.0;          // raw (pre-sigmoid)
  double opacity_max = 4.0;
  double log_scale_min = -4.5;
  double log_scale_max = -2.8;
  double specular_strength = 0.1;  // magnitude of the view-dependent SH bands
  int n_train_views = 8;
  int n_test_views = 4;
  int width = 64;
  int height = 64;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_gaussians < 0 || n_train_views < 0 || n_test_views < 0) {
      throw Error("scene counts must be non-negative");
    }
    if (width < 1 || height < 1) {
      throw Error("image size must be at least 1x1");
    }
    if (opacity_max < opacity_min || log_scale_max < log_scale_min) {
      throw Error("degenerate sampling range");
    }
  }
};

struct Scene {
  GaussianCloud cloud;
  std::vector<Camera> train_views;
  std::vector<Image> train_images;
  std::vector<Camera> test_views;
  std::vector<Image> test_images;
};

/// Deterministic given spec.seed. Cameras orbit the cloud centroid with look-at
/// orientation; images are renders of the generated cloud.
Scene generate_scene(const SceneSpec& spec);

}  // namespace splatpack
