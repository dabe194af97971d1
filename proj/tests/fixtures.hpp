// Shared test scenes. The "standard" fixture models the usual compression
// input: a trained model that fits its training images well but not exactly.
// We get that by perturbing the generated cloud's appearance attributes while
// keeping the clean renders as ground truth, so recovery stages have real
// signal to recover.
#pragma once

#include <cstdint>
#include <vector>

#include "splatpack/camera.hpp"
#include "splatpack/gaussian_cloud.hpp"
#include "splatpack/rng.hpp"
#include "splatpack/scene_gen.hpp"

namespace fixtures {

using splatpack::Camera;
using splatpack::GaussianCloud;
using splatpack::Image;
using splatpack::Scene;
using splatpack::SceneSpec;
using splatpack::View;

/// Seeded appearance noise on SH and opacity; geometry untouched, so the
/// appearance-only fine-tuning stages can in principle undo it fully.
inline GaussianCloud perturb_appearance(const GaussianCloud& cloud, double amplitude,
                                        std::uint64_t seed) {
  splatpack::Rng rng(seed);
  GaussianCloud out = cloud;
  for (std::int64_t i = 0; i < out.count(); ++i) {
    for (int c = 0; c < 3; ++c) {
      out.sh_dc(i, c) += rng.normal(0.0, amplitude);
    }
    for (std::int64_t c = 0; c < out.sh_rest.cols(); ++c) {
      out.sh_rest(i, c) += rng.normal(0.0, 0.25 * amplitude);
    }
    out.raw_opacity(i) += rng.normal(0.0, 2.0 * amplitude);
  }
  return out;
}

struct Fixture {
  GaussianCloud input;              // the model the pipeline compresses
  std::vector<View> train;          // ground-truth training views
  std::vector<Camera> test_cams;
  std::vector<Image> test_images;   // ground-truth held-out views
};

inline Fixture make_fixture(const Scene& scene, double noise_amplitude,
                            std::uint64_t noise_seed) {
  Fixture f;
  f.input = noise_amplitude > 0.0
                ? perturb_appearance(scene.cloud, noise_amplitude, noise_seed)
                : scene.cloud;
  for (std::size_t v = 0; v < scene.train_views.size(); ++v) {
    f.train.push_back({scene.train_views[v], scene.train_images[v]});
  }
  f.test_cams = scene.test_views;
  f.test_images = scene.test_images;
  return f;
}

inline SceneSpec standard_spec(std::uint64_t seed) {
  SceneSpec spec;
  spec.n_gaussians = 2000;
  spec.sh_degree = 3;
  spec.extent = splatpack::Vec3(1.0, 1.0, 1.0);
  spec.opacity_min = -7.0;
  spec.opacity_max = 6.0;
  spec.log_scale_min = -4.2;
  spec.log_scale_max = -2.6;
  spec.specular_strength = 0.08;
  spec.n_train_views = 8;
  spec.n_test_views = 4;
  spec.width = 64;
  spec.height = 64;
  spec.seed = seed;
  return spec;
}

/// The 2,000-Gaussian fixture used by the recovery and end-to-end tests.
inline Fixture standard_fixture(std::uint64_t seed = 7) {
  return make_fixture(splatpack::generate_scene(standard_spec(seed)), 0.08, seed ^ 0xF1A57EED);
}

inline SceneSpec specular_spec(std::uint64_t seed) {
  SceneSpec spec;
  spec.n_gaussians = 400;
  spec.sh_degree = 3;
  spec.extent = splatpack::Vec3(0.8, 0.8, 0.8);
  spec.opacity_min = -2.0;
  spec.opacity_max = 5.0;
  spec.log_scale_min = -3.6;
  spec.log_scale_max = -2.4;
  spec.specular_strength = 0.55;  // strong band-3 signal
  spec.n_train_views = 6;
  spec.n_test_views = 6;
  spec.width = 48;
  spec.height = 48;
  spec.seed = seed;
  return spec;
}

/// High view-dependence fixture for the distillation tests; no noise, the
/// truncation loss itself is the signal.
inline Fixture specular_fixture(std::uint64_t seed = 21) {
  return make_fixture(splatpack::generate_scene(specular_spec(seed)), 0.0, 0);
}

/// Small random cloud for gradient checks: opacities and colors kept away
/// from the alpha cap and the color clamp so the loss stays smooth.
inline GaussianCloud smooth_random_cloud(std::int64_t n, int degree, std::uint64_t seed) {
  splatpack::Rng rng(seed);
  GaussianCloud cloud = GaussianCloud::zeros(n, degree);
  for (std::int64_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      cloud.positions(i, c) = rng.uniform(-0.8, 0.8);
      cloud.sh_dc(i, c) = rng.uniform(-0.5, 0.5);
      cloud.raw_scale(i, c) = rng.uniform(-3.5, -2.2);
    }
    for (std::int64_t c = 0; c < cloud.sh_rest.cols(); ++c) {
      cloud.sh_rest(i, c) = rng.uniform(-0.05, 0.05);
    }
    cloud.raw_opacity(i) = rng.uniform(-3.0, -0.5);
    splatpack::Vec4 q;
    for (int c = 0; c < 4; ++c) q[c] = rng.normal();
    q.normalize();
    for (int c = 0; c < 4; ++c) cloud.rotation(i, c) = q[c];
  }
  return cloud;
}

inline Camera default_orbit_camera(int width, int height, double azimuth = 0.6,
                                   double radius = 4.0) {
  const splatpack::Vec3 eye(radius * std::cos(azimuth), radius * std::sin(azimuth), 1.4);
  return splatpack::look_at(eye, splatpack::Vec3::Zero(), 1.1 * std::min(width, height),
                            1.1 * std::min(width, height), width, height);
}

}  // namespace fixtures
