#include "splatpack/photometric.hpp"

#include <cmath>

#include "splatpack/image_metrics.hpp"

namespace splatpack {

LossResult photometric_loss(const Image& rendered, const Image& target, double lambda) {
  if (rendered.width != target.width || rendered.height != target.height) {
    throw Error("image dimensions do not match");
  }
  LossResult out;
  const double n = double(rendered.pixel_count()) * 3.0;
  const MatX3 diff = rendered.data - target.data;
  const double l1 = diff.array().abs().mean();

  Image ssim_grad;
  const double s = ssim_with_grad(rendered, target, &ssim_grad);

  out.value = (1.0 - lambda) * l1 + lambda * (1.0 - s);
  out.grad = Image(rendered.width, rendered.height);
  out.grad.data = (1.0 - lambda) / n * diff.array().sign().matrix() - lambda * ssim_grad.data;
  return out;
}

LossResult pixel_mse_loss(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error("image dimensions do not match");
  }
  LossResult out;
  const double n = double(a.pixel_count());
  const MatX3 diff = a.data - b.data;
  out.value = diff.array().square().sum() / n;
  out.grad = Image(a.width, a.height);
  out.grad.data = (2.0 / n) * diff;
  return out;
}

}  // namespace splatpack
