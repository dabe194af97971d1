#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splatpack/camera.hpp"
#include "splatpack/gaussian_cloud.hpp"
#include "splatpack/renderer.hpp"
#include "splatpack/types.hpp"

namespace splatpack {

/// Per-Gaussian global significance: accumulated ray-hit contribution weighted
/// by the volume factor gamma = min(V/V_max90, 1)^beta.
struct SignificanceVector {
  VecX scores;
  double beta = 0.1;
  double v_max90 = 0.0;
  StatMode mode = StatMode::literal;
};

/// Ellipsoid volume (4/3)pi*abc over the activated scale.
double gaussian_volume(const Vec3& raw_scale);

/// 90th-percentile volume (ascending, linear interpolation).
double volume_percentile90(const GaussianCloud& cloud);

SignificanceVector compute_global_significance(const GaussianCloud& cloud,
                                               const std::vector<Camera>& views,
                                               double beta = 0.1,
                                               StatMode mode = StatMode::literal,
                                               const RenderOptions& opts = {});

inline SignificanceVector compute_global_significance(const GaussianCloud& cloud,
                                                      const std::vector<View>& views,
                                                      double beta = 0.1,
                                                      StatMode mode = StatMode::literal,
                                                      const RenderOptions& opts = {}) {
  std::vector<Camera> cams;
  cams.reserve(views.size());
  for (const auto& v : views) cams.push_back(v.camera);
  return compute_global_significance(cloud, cams, beta, mode, opts);
}

struct PruneResult {
  GaussianCloud cloud;
  std::vector<std::int64_t> old_to_new;  // -1 for removed Gaussians
  std::vector<std::int64_t> kept;        // old indices of survivors, ascending
};

/// Removes exactly floor(ratio*N) Gaussians with the smallest scores; on ties
/// the lower index is kept. Survivors keep their attribute values and order.
PruneResult prune(const GaussianCloud& cloud, const SignificanceVector& scores, double ratio);

/// Post-prune recovery: Adam descent on SH coefficients and raw opacity against
/// the photometric loss, views cycled round-robin. Geometry never moves and the
/// final mean loss never exceeds the initial one.
GaussianCloud co_adapt(const GaussianCloud& cloud, const std::vector<View>& views,
                       int iterations, double step_size = 1.0, const RenderOptions& opts = {});

// Scores sidecar: magic "GSSC", u64 count, little-endian f32 scores.
void save_scores(const SignificanceVector& sv, const std::string& path);
SignificanceVector load_scores(const std::string& path);

}  // namespace splatpack
