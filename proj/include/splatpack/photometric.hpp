#pragma once

#include "splatpack/types.hpp"

namespace splatpack {

struct LossResult {
  double value = 0.0;
  Image grad;  // d value / d first-image
};

/// Training loss: (1-lambda)*L1 + lambda*(1-SSIM), with gradient w.r.t. `rendered`.
LossResult photometric_loss(const Image& rendered, const Image& target, double lambda = 0.2);

/// Mean over pixels of the squared RGB difference (channel squares summed),
/// with gradient w.r.t. `a`. The distillation objective.
LossResult pixel_mse_loss(const Image& a, const Image& b);

}  // namespace splatpack
