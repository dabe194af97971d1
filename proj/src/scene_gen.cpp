#include "splatpack/scene_gen.hpp"

#include <cmath>

#include "splatpack/renderer.hpp"
#include "splatpack/rng.hpp"
#include "splatpack/sh.hpp"

namespace splatpack {

namespace {

// Snap to float32 so the cloud survives PLY round trips bit-for-bit.
double snap(double v) { return double(float(v)); }

// Per-band coefficient magnitude relative to specular_strength; the lowest band
// stays subtle so truncation tests isolate the high-band signal.
double band_scale(int band, double strength) {
  switch (band) {
    case 1:
      return 0.25 * strength;
    case 2:
      return 0.5 * strength;
    default:
      return strength;
  }
}

int band_of_coeff(int coeff_index) {
  // coeff_index counts non-DC coefficients from 0: band 1 holds 3, band 2
  // holds 5, band 3 holds 7.
  if (coeff_index < 3) return 1;
  if (coeff_index < 8) return 2;
  return 3;
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  Scene scene;
  GaussianCloud& cloud = scene.cloud;
  cloud = GaussianCloud::zeros(spec.n_gaussians, spec.sh_degree);

  const int rest_n = sh::rest_coeff_count(spec.sh_degree);
  for (std::int64_t i = 0; i < spec.n_gaussians; ++i) {
    for (int c = 0; c < 3; ++c) {
      cloud.positions(i, c) = snap(rng.uniform(-spec.extent[c], spec.extent[c]));
    }
    for (int c = 0; c < 3; ++c) {
      cloud.sh_dc(i, c) = snap(rng.uniform(-1.0, 1.0));
    }
    for (int k = 0; k < rest_n; ++k) {
      const double s = band_scale(band_of_coeff(k), spec.specular_strength);
      for (int c = 0; c < 3; ++c) {
        cloud.sh_rest(i, 3 * k + c) = snap(rng.normal(0.0, s));
      }
    }
    cloud.raw_opacity(i) = snap(rng.uniform(spec.opacity_min, spec.opacity_max));
    for (int c = 0; c < 3; ++c) {
      cloud.raw_scale(i, c) = snap(rng.uniform(spec.log_scale_min, spec.log_scale_max));
    }
    Vec4 q;
    for (int c = 0; c < 4; ++c) q[c] = rng.normal();
    if (q.norm() < 1e-9) q = Vec4(1, 0, 0, 0);
    q.normalize();
    for (int c = 0; c < 4; ++c) cloud.rotation(i, c) = snap(q[c]);
  }

  const Vec3 centroid =
      spec.n_gaussians > 0 ? Vec3(cloud.positions.colwise().mean()) : Vec3::Zero();
  const double radius = 2.8 * spec.extent.norm() + 0.5;
  const double elevation = 0.35;  // radians above the orbit plane
  const double focal = 1.1 * std::min(spec.width, spec.height);

  auto orbit_camera = [&](double azimuth) {
    const Vec3 eye = centroid + radius * Vec3(std::cos(azimuth) * std::cos(elevation),
                                              std::sin(azimuth) * std::cos(elevation),
                                              std::sin(elevation));
    return look_at(eye, centroid, focal, focal, spec.width, spec.height);
  };

  for (int v = 0; v < spec.n_train_views; ++v) {
    scene.train_views.push_back(orbit_camera(2.0 * M_PI * v / std::max(1, spec.n_train_views)));
  }
  for (int v = 0; v < spec.n_test_views; ++v) {
    // Test azimuths sit between training azimuths.
    const double offset = M_PI / std::max(1, spec.n_train_views);
    scene.test_views.push_back(
        orbit_camera(offset + 2.0 * M_PI * v / std::max(1, spec.n_test_views)));
  }

  for (const Camera& cam : scene.train_views) {
    scene.train_images.push_back(render(cloud, cam).image);
  }
  for (const Camera& cam : scene.test_views) {
    scene.test_images.push_back(render(cloud, cam).image);
  }
  return scene;
}

}  // namespace splatpack
