#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "splatpack/renderer.hpp"
#include "splatpack/rng.hpp"
#include "splatpack/scene_gen.hpp"

using namespace splatpack;

TEST_SUITE("projection") {
  TEST_CASE("on-axis Gaussian projects to the principal point") {
    Camera cam;
    cam.fx = cam.fy = 50.0;
    cam.cx = 32.0;
    cam.cy = 24.0;
    cam.width = 64;
    cam.height = 48;
    const GaussianCloud cloud = GaussianCloud::zeros(1, 0);
    auto splat = project_gaussian(cloud, 0, cam);
    // Position (0,0,0) sits on the camera plane; push it forward instead.
    GaussianCloud ahead = cloud;
    ahead.positions(0, 2) = 1.0;
    splat = project_gaussian(ahead, 0, cam);
    REQUIRE(splat.has_value());
    CHECK(splat->mean2d.x() == doctest::Approx(32.0));
    CHECK(splat->mean2d.y() == doctest::Approx(24.0));
    CHECK(splat->view_depth == doctest::Approx(1.0));
  }

  TEST_CASE("Gaussian behind the camera is culled") {
    Camera cam = fixtures::default_orbit_camera(32, 32);
    GaussianCloud cloud = GaussianCloud::zeros(1, 0);
    // Behind the camera: along the back-projected axis past the center.
    const Vec3 center = cam.center();
    cloud.positions.row(0) = (center + cam.rotation.row(2).transpose() * -1.0).transpose();
    CHECK_FALSE(project_gaussian(cloud, 0, cam).has_value());
  }

  TEST_CASE("2D covariance matches the dense-matrix oracle") {
    Rng rng(55);
    const Camera cam = fixtures::default_orbit_camera(64, 64);
    const GaussianCloud cloud = fixtures::smooth_random_cloud(100, 2, 56);
    const RenderOptions opts;
    int checked = 0;
    for (std::int64_t i = 0; i < cloud.count(); ++i) {
      const auto got = project_gaussian(cloud, i, cam, opts);
      const auto want = oracle::project(cloud.positions.row(i), cloud.raw_scale.row(i),
                                        cloud.rotation.row(i), cam, opts);
      REQUIRE(got.has_value() == !want.culled);
      if (!got) {
        continue;
      }
      ++checked;
      CHECK((got->cov2d - want.cov2d).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((got->mean2d - want.mean2d).norm() < 1e-9);
    }
    CHECK(checked > 50);
  }
}

TEST_SUITE("renderer forward") {
  TEST_CASE("empty cloud renders black with zero stats") {
    const GaussianCloud cloud = GaussianCloud::zeros(0, 3);
    const Camera cam = fixtures::default_orbit_camera(16, 16);
    const RenderOutput out = render(cloud, cam, {}, true);
    CHECK(out.image.data.cwiseAbs().maxCoeff() == 0.0);
    CHECK(out.stats->hit_count.size() == 0);
    CHECK((out.transmittance.array() == 1.0).all());
  }

  TEST_CASE("single saturated on-axis splat peaks at the alpha cap") {
    Camera cam;
    cam.fx = cam.fy = 64.0;
    cam.cx = cam.cy = 32.0;
    cam.width = cam.height = 64;
    GaussianCloud cloud = GaussianCloud::zeros(1, 0);
    cloud.positions(0, 2) = 1.0;
    cloud.raw_opacity(0) = 30.0;                    // sigmoid -> ~1
    cloud.sh_dc.row(0).setConstant(0.5 / sh::kC0);  // color exactly 1
    const Image img = render(cloud, cam).image;
    double peak = 0.0;
    for (std::int64_t p = 0; p < img.pixel_count(); ++p) peak = std::max(peak, img.data(p, 0));
    CHECK(peak == doctest::Approx(0.99).epsilon(1e-6));
  }

  TEST_CASE("matches the brute-force oracle with thresholds disabled") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      SceneSpec spec;
      spec.n_gaussians = 10;
      spec.sh_degree = 3;
      spec.n_train_views = 1;
      spec.n_test_views = 0;
      spec.width = spec.height = 64;
      spec.seed = seed;
      const Scene scene = generate_scene(spec);
      const RenderOptions opts = RenderOptions::exhaustive();
      const Image got = render(scene.cloud, scene.train_views[0], opts).image;
      const auto want = oracle::brute_render(scene.cloud, scene.train_views[0], opts);
      CHECK((got.data - want.image.data).cwiseAbs().maxCoeff() < 1e-6);
    }
  }

  TEST_CASE("matches the brute-force oracle with default thresholds") {
    SceneSpec spec;
    spec.n_gaussians = 60;
    spec.seed = 99;
    spec.n_train_views = 2;
    spec.n_test_views = 0;
    const Scene scene = generate_scene(spec);
    RenderOptions opts;
    opts.stat_mode = StatMode::literal;
    for (const Camera& cam : scene.train_views) {
      const RenderOutput got = render(scene.cloud, cam, opts, true);
      const auto want = oracle::brute_render(scene.cloud, cam, opts);
      CHECK((got.image.data - want.image.data).cwiseAbs().maxCoeff() < 1e-9);
      for (std::int64_t i = 0; i < scene.cloud.count(); ++i) {
        CHECK(got.stats->hit_count(i) == want.hit_count[std::size_t(i)]);
        CHECK(got.stats->weight_sum(i) ==
              doctest::Approx(want.weight_sum[std::size_t(i)]).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("tiling is bit-equal to a single-tile pass") {
    const fixtures::Fixture fx = fixtures::specular_fixture(5);
    RenderOptions tiled;
    tiled.tile_size = 16;
    RenderOptions whole;
    whole.tile_size = 1 << 20;
    const Image a = render(fx.input, fx.train[0].camera, tiled).image;
    const Image b = render(fx.input, fx.train[0].camera, whole).image;
    CHECK(a.data == b.data);
  }

  TEST_CASE("input order does not matter") {
    const GaussianCloud cloud = fixtures::smooth_random_cloud(50, 2, 77);
    const Camera cam = fixtures::default_orbit_camera(48, 48);
    const Image base = render(cloud, cam).image;

    Rng rng(78);
    std::vector<std::int64_t> perm(50);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::int64_t i = 49; i > 0; --i) {
      std::swap(perm[i], perm[std::int64_t(rng.uniform_index(std::uint64_t(i + 1)))]);
    }
    GaussianCloud shuffled = GaussianCloud::zeros(50, 2);
    for (std::int64_t j = 0; j < 50; ++j) {
      shuffled.positions.row(j) = cloud.positions.row(perm[j]);
      shuffled.sh_dc.row(j) = cloud.sh_dc.row(perm[j]);
      shuffled.sh_rest.row(j) = cloud.sh_rest.row(perm[j]);
      shuffled.raw_opacity(j) = cloud.raw_opacity(perm[j]);
      shuffled.raw_scale.row(j) = cloud.raw_scale.row(perm[j]);
      shuffled.rotation.row(j) = cloud.rotation.row(perm[j]);
    }
    const Image permuted = render(shuffled, cam).image;
    CHECK((base.data - permuted.data).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("vanishing opacity blacks out the image and the stats") {
    GaussianCloud cloud = fixtures::smooth_random_cloud(30, 1, 79);
    cloud.raw_opacity.setConstant(-40.0);
    const Camera cam = fixtures::default_orbit_camera(32, 32);
    const RenderOutput out = render(cloud, cam, {}, true);
    CHECK(out.image.data.cwiseAbs().maxCoeff() == 0.0);
    CHECK(out.stats->weight_sum.cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::uint64_t(out.stats->hit_count.maxCoeff()) == 0);
  }

  TEST_CASE("transmittance stays in [0,1]") {
    const fixtures::Fixture fx = fixtures::standard_fixture(3);
    const RenderOutput out = render(fx.input, fx.train[0].camera);
    CHECK(out.transmittance.minCoeff() >= 0.0);
    CHECK(out.transmittance.maxCoeff() <= 1.0);
  }
}
