#pragma once

#include <cstdint>
#include <vector>

#include "splatpack/camera.hpp"
#include "splatpack/gaussian_cloud.hpp"
#include "splatpack/renderer.hpp"

namespace splatpack {

struct PseudoViewConfig {
  double sigma = 0.1;      // std-dev of the translation jitter, world units
  int count_per_view = 1;  // pseudo cameras emitted per training view
  std::uint64_t seed = 0;

  void validate() const {
    if (sigma < 0.0 || count_per_view < 0) {
      throw Error("pseudo-view config must be non-negative");
    }
  }
};

/// For each training view, count_per_view copies with translation jittered by
/// componentwise N(0, sigma^2); rotation and intrinsics are copied unchanged.
std::vector<Camera> sample_pseudo_views(const std::vector<Camera>& train_views,
                                        const PseudoViewConfig& cfg);

/// Truncates the teacher to `to_degree` and fits the student's remaining SH and
/// opacity to the teacher's renders over training plus pseudo views, minimizing
/// the mean squared pixel difference. Count and geometry stay the teacher's.
GaussianCloud distill(const GaussianCloud& teacher, int to_degree,
                      const std::vector<Camera>& train_views, const PseudoViewConfig& cfg,
                      int iterations, double step_size = 1.0, const RenderOptions& opts = {});

}  // namespace splatpack
