#include "splatpack/image_metrics.hpp"

#include <cmath>
#include <limits>

namespace splatpack {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

using Map2D = Eigen::MatrixXd;  // height rows x width cols

Eigen::Matrix<double, kWindow, 1> gaussian_kernel() {
  Eigen::Matrix<double, kWindow, 1> k;
  const int r = kWindow / 2;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - r;
    k(i) = std::exp(-d * d / (2.0 * kSigma * kSigma));
  }
  return k / k.sum();
}

// Separable same-size convolution with zero padding. The kernel is symmetric,
// so this is its own adjoint.
Map2D filter_same(const Map2D& m) {
  static const auto kernel = gaussian_kernel();
  const int h = int(m.rows()), w = int(m.cols());
  const int r = kWindow / 2;
  Map2D tmp = Map2D::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      const int t0 = std::max(0, r - x), t1 = std::min(kWindow - 1, w - 1 + r - x);
      for (int t = t0; t <= t1; ++t) {
        acc += kernel(t) * m(y, x + t - r);
      }
      tmp(y, x) = acc;
    }
  }
  Map2D out = Map2D::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      const int t0 = std::max(0, r - y), t1 = std::min(kWindow - 1, h - 1 + r - y);
      for (int t = t0; t <= t1; ++t) {
        acc += kernel(t) * tmp(y + t - r, x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

Map2D channel(const Image& im, int c) {
  Map2D m(im.height, im.width);
  for (int y = 0; y < im.height; ++y) {
    for (int x = 0; x < im.width; ++x) {
      m(y, x) = im.at(y, x, c);
    }
  }
  return m;
}

void check_dims(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error("image dimensions do not match");
  }
}

double ssim_channel(const Map2D& x, const Map2D& y, Map2D* grad_x) {
  const Map2D mu_x = filter_same(x);
  const Map2D mu_y = filter_same(y);
  const Map2D e_x2 = filter_same((x.array() * x.array()).matrix());
  const Map2D e_y2 = filter_same((y.array() * y.array()).matrix());
  const Map2D e_xy = filter_same((x.array() * y.array()).matrix());

  const auto var_x = e_x2.array() - mu_x.array().square();
  const auto var_y = e_y2.array() - mu_y.array().square();
  const auto cov_xy = e_xy.array() - mu_x.array() * mu_y.array();

  const auto a1 = 2.0 * mu_x.array() * mu_y.array() + kC1;
  const auto a2 = 2.0 * cov_xy + kC2;
  const auto b1 = mu_x.array().square() + mu_y.array().square() + kC1;
  const auto b2 = var_x + var_y + kC2;
  const Eigen::ArrayXXd s = (a1 * a2) / (b1 * b2);

  if (grad_x) {
    const Eigen::ArrayXXd inv_bb = 1.0 / (b1 * b2);
    const Eigen::ArrayXXd ds_da1 = a2 * inv_bb;
    const Eigen::ArrayXXd ds_da2 = a1 * inv_bb;
    const Eigen::ArrayXXd ds_db1 = -s / b1;
    const Eigen::ArrayXXd ds_db2 = -s / b2;
    // var_x and cov_xy unfold as E[x^2]-mu_x^2 and E[xy]-mu_x*mu_y.
    const Map2D d_mu = (ds_da1 * 2.0 * mu_y.array() + ds_db1 * 2.0 * mu_x.array() +
                        ds_da2 * 2.0 * (-mu_y.array()) + ds_db2 * (-2.0 * mu_x.array()))
                           .matrix();
    const Map2D d_ex2 = ds_db2.matrix();
    const Map2D d_exy = (2.0 * ds_da2).matrix();
    *grad_x = filter_same(d_mu) + (2.0 * x.array() * filter_same(d_ex2).array()).matrix() +
              (y.array() * filter_same(d_exy).array()).matrix();
  }
  return s.mean();
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  check_dims(a, b);
  const double mse = (a.data - b.data).array().square().mean();
  if (mse == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) { return ssim_with_grad(a, b, nullptr); }

double ssim_with_grad(const Image& a, const Image& b, Image* grad_a) {
  check_dims(a, b);
  if (grad_a) {
    *grad_a = Image(a.width, a.height);
  }
  double total = 0.0;
  const double pixel_norm = double(a.pixel_count());
  for (int c = 0; c < 3; ++c) {
    Map2D gx;
    total += ssim_channel(channel(a, c), channel(b, c), grad_a ? &gx : nullptr);
    if (grad_a) {
      // The channel mean contributes 1/(3*P) per pixel to the overall score.
      for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
          grad_a->at(y, x, c) = gx(y, x) / (3.0 * pixel_norm);
        }
      }
    }
  }
  return total / 3.0;
}

}  // namespace splatpack
