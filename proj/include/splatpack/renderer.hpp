#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "splatpack/camera.hpp"
#include "splatpack/gaussian_cloud.hpp"
#include "splatpack/types.hpp"

namespace splatpack {

/// Per-ray contribution term accumulated into weight_sum when stats are collected.
enum class StatMode {
  literal,       // sigma_j * T: the Gaussian's 3D opacity times transmittance before it
  blend_weight,  // alpha_ij * T_ij: the actual compositing weight
};

struct RenderOptions {
  double alpha_cap = 0.99;           // per-splat alpha ceiling
  double alpha_skip = 1.0 / 255.0;   // splats below this alpha at a pixel are not hits
  double min_transmittance = 1e-4;   // blending stops once T drops below this
  double near_depth = 0.2;           // splats at or before this camera-space z are culled
  double lowpass = 0.3;              // isotropic floor added to the 2D covariance
  int tile_size = 16;
  StatMode stat_mode = StatMode::literal;

  /// Thresholds off: every projected splat contributes at every pixel.
  static RenderOptions exhaustive() {
    RenderOptions o;
    o.alpha_skip = 0.0;
    o.min_transmittance = 0.0;
    return o;
  }
};

struct Splat2D {
  Vec2 mean2d;
  Mat2 cov2d;         // after the low-pass floor
  double view_depth;  // camera-space z
  Vec3 rgb;           // SH evaluated along the center-to-Gaussian direction
  double alpha_base;  // activated opacity
};

struct GaussianStats {
  Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1> hit_count;
  VecX weight_sum;
};

struct RenderOutput {
  Image image;
  VecX transmittance;  // per pixel, remaining T after blending
  std::optional<GaussianStats> stats;
};

struct AppearanceGradients {
  MatX3 sh_dc;
  MatXR sh_rest;
  VecX raw_opacity;
};

/// EWA projection of one Gaussian; nullopt when culled (behind the near plane or
/// the 3-sigma screen extent misses the viewport).
std::optional<Splat2D> project_gaussian(const Vec3& position, const Vec3& raw_scale,
                                        const Vec4& rotation, const Vec3& sh_dc,
                                        Eigen::Ref<const Eigen::RowVectorXd> sh_rest,
                                        int sh_degree, double raw_opacity, const Camera& cam,
                                        const RenderOptions& opts = {});

std::optional<Splat2D> project_gaussian(const GaussianCloud& cloud, std::int64_t index,
                                        const Camera& cam, const RenderOptions& opts = {});

/// Tile-based front-to-back splatting. Deterministic: splats are depth-sorted with
/// stable index order and pixels blend sequentially.
RenderOutput render(const GaussianCloud& cloud, const Camera& cam,
                    const RenderOptions& opts = {}, bool collect_stats = false);

/// Analytic gradients of the forward blend with respect to SH coefficients and raw
/// opacity. Geometry receives no gradient.
AppearanceGradients render_backward(const GaussianCloud& cloud, const Camera& cam,
                                    const Image& dL_dimage, const RenderOptions& opts = {});

}  // namespace splatpack
