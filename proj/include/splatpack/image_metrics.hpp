#pragma once

#include <Eigen/Core>

#include "splatpack/types.hpp"

namespace splatpack {

/// 10*log10(1/MSE) for images in [0,1]; +infinity when the images are identical.
double psnr(const Image& a, const Image& b);

/// Mean local SSIM: 11x11 Gaussian window (sigma 1.5, zero-padded), C1=0.01^2,
/// C2=0.03^2, computed per channel and averaged.
double ssim(const Image& a, const Image& b);

/// SSIM plus its gradient with respect to the first image.
double ssim_with_grad(const Image& a, const Image& b, Image* grad_a);

}  // namespace splatpack
