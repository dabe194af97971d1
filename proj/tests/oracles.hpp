// Independent reference implementations the unit and acceptance suites check
// against. Everything here is written from first principles (tabulated
// formulas, dense matrix products, per-pixel loops) and must stay decoupled
// from the library's fast paths.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "splatpack/camera.hpp"
#include "splatpack/gaussian_cloud.hpp"
#include "splatpack/renderer.hpp"
#include "splatpack/types.hpp"

namespace oracle {

using splatpack::Camera;
using splatpack::GaussianCloud;
using splatpack::Image;
using splatpack::Mat2;
using splatpack::Mat3;
using splatpack::RenderOptions;
using splatpack::Vec2;
using splatpack::Vec3;
using splatpack::Vec4;

// ---------------------------------------------------------------------------
// Real spherical harmonics from the tabulated Cartesian polynomials, constants
// computed at runtime, Condon-Shortley phase on odd |m|.
inline double sh_basis(int l, int m, const Vec3& d) {
  const double x = d.x(), y = d.y(), z = d.z();
  const double pi = M_PI;
  switch (l) {
    case 0:
      return std::sqrt(1.0 / (4.0 * pi));
    case 1:
      switch (m) {
        case -1: return -std::sqrt(3.0 / (4.0 * pi)) * y;
        case 0: return std::sqrt(3.0 / (4.0 * pi)) * z;
        case 1: return -std::sqrt(3.0 / (4.0 * pi)) * x;
      }
      break;
    case 2:
      switch (m) {
        case -2: return 0.5 * std::sqrt(15.0 / pi) * x * y;
        case -1: return -0.5 * std::sqrt(15.0 / pi) * y * z;
        case 0: return 0.25 * std::sqrt(5.0 / pi) * (3.0 * z * z - 1.0);
        case 1: return -0.5 * std::sqrt(15.0 / pi) * x * z;
        case 2: return 0.25 * std::sqrt(15.0 / pi) * (x * x - y * y);
      }
      break;
    case 3:
      switch (m) {
        case -3: return -0.25 * std::sqrt(35.0 / (2.0 * pi)) * y * (3.0 * x * x - y * y);
        case -2: return 0.5 * std::sqrt(105.0 / pi) * x * y * z;
        case -1: return -0.125 * std::sqrt(42.0 / pi) * y * (5.0 * z * z - 1.0);
        case 0: return 0.25 * std::sqrt(7.0 / pi) * z * (5.0 * z * z - 3.0);
        case 1: return -0.125 * std::sqrt(42.0 / pi) * x * (5.0 * z * z - 1.0);
        case 2: return 0.25 * std::sqrt(105.0 / pi) * z * (x * x - y * y);
        case 3: return -0.25 * std::sqrt(35.0 / (2.0 * pi)) * x * (x * x - 3.0 * y * y);
      }
      break;
  }
  return 0.0;
}

/// Color the way the renderer defines it, built from the tabulated basis.
inline Vec3 sh_color(const Vec3& dc, Eigen::Ref<const Eigen::RowVectorXd> rest, int degree,
                     const Vec3& dir) {
  Vec3 rgb = Vec3::Constant(0.5) + sh_basis(0, 0, dir) * dc;
  int idx = 0;
  for (int l = 1; l <= degree; ++l) {
    for (int m = -l; m <= l; ++m, ++idx) {
      const double b = sh_basis(l, m, dir);
      for (int c = 0; c < 3; ++c) {
        rgb[c] += b * rest[3 * idx + c];
      }
    }
  }
  return rgb.cwiseMax(0.0);
}

// ---------------------------------------------------------------------------
// Dense-matrix geometry, independent of the library (Eigen::Quaterniond).
inline Mat3 covariance(const Vec3& raw_scale, const Vec4& quat_wxyz) {
  const Eigen::Quaterniond q(quat_wxyz[0], quat_wxyz[1], quat_wxyz[2], quat_wxyz[3]);
  const Mat3 r = q.normalized().toRotationMatrix();
  Mat3 s = Mat3::Zero();
  for (int i = 0; i < 3; ++i) s(i, i) = std::exp(raw_scale[i]);
  const Mat3 m = r * s;
  return m * m.transpose();
}

struct ProjectedOracle {
  bool culled = true;
  Vec2 mean2d = Vec2::Zero();
  Mat2 cov2d = Mat2::Zero();
  double depth = 0.0;
};

inline ProjectedOracle project(const Vec3& position, const Vec3& raw_scale, const Vec4& quat,
                               const Camera& cam, const RenderOptions& opts) {
  ProjectedOracle out;
  const Mat3 w = cam.rotation;
  const Vec3 p_cam = w * position + cam.translation;
  out.depth = p_cam.z();
  if (out.depth <= opts.near_depth) {
    return out;
  }
  out.mean2d = Vec2(cam.fx * p_cam.x() / p_cam.z() + cam.cx,
                    cam.fy * p_cam.y() / p_cam.z() + cam.cy);
  Eigen::Matrix<double, 2, 3> jac = Eigen::Matrix<double, 2, 3>::Zero();
  jac(0, 0) = cam.fx / p_cam.z();
  jac(0, 2) = -cam.fx * p_cam.x() / (p_cam.z() * p_cam.z());
  jac(1, 1) = cam.fy / p_cam.z();
  jac(1, 2) = -cam.fy * p_cam.y() / (p_cam.z() * p_cam.z());

  const Mat3 world_cov = covariance(raw_scale, quat);
  const Mat3 cam_cov = w * world_cov * w.transpose();
  out.cov2d = jac * cam_cov * jac.transpose() + opts.lowpass * Mat2::Identity();

  Eigen::SelfAdjointEigenSolver<Mat2> es(out.cov2d);
  const double radius = 3.0 * std::sqrt(es.eigenvalues().maxCoeff());
  if (out.mean2d.x() + radius < 0.0 || out.mean2d.x() - radius > cam.width ||
      out.mean2d.y() + radius < 0.0 || out.mean2d.y() - radius > cam.height) {
    return out;
  }
  out.culled = false;
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force splatting: every surviving splat evaluated at every pixel in
// depth order, no tiles, no support rectangles.
struct BruteSplat {
  std::int64_t index;
  Vec2 mean2d;
  Mat2 cov2d;
  double depth;
  Vec3 rgb;
  double alpha_base;
};

struct BruteResult {
  Image image;
  std::vector<std::uint64_t> hit_count;
  std::vector<double> weight_sum;
};

inline BruteResult brute_render(const GaussianCloud& cloud, const Camera& cam,
                                const RenderOptions& opts) {
  std::vector<BruteSplat> splats;
  const Vec3 center = -(cam.rotation.transpose() * cam.translation);
  for (std::int64_t i = 0; i < cloud.count(); ++i) {
    const auto p = project(cloud.positions.row(i), cloud.raw_scale.row(i),
                           cloud.rotation.row(i), cam, opts);
    if (p.culled) {
      continue;
    }
    BruteSplat s;
    s.index = i;
    s.mean2d = p.mean2d;
    s.cov2d = p.cov2d;
    s.depth = p.depth;
    Vec3 dir = Vec3(cloud.positions.row(i)) - center;
    dir = dir.norm() > 1e-12 ? Vec3(dir.normalized()) : Vec3(0, 0, 1);
    s.rgb = sh_color(cloud.sh_dc.row(i), cloud.sh_rest.row(i), cloud.sh_degree, dir);
    const double raw = cloud.raw_opacity(i);
    s.alpha_base = raw >= 0 ? 1.0 / (1.0 + std::exp(-raw)) : std::exp(raw) / (1.0 + std::exp(raw));
    splats.push_back(s);
  }
  std::stable_sort(splats.begin(), splats.end(),
                   [](const BruteSplat& a, const BruteSplat& b) { return a.depth < b.depth; });

  BruteResult res;
  res.image = Image(cam.width, cam.height);
  res.hit_count.assign(std::size_t(cloud.count()), 0);
  res.weight_sum.assign(std::size_t(cloud.count()), 0.0);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      double T = 1.0;
      Vec3 c = Vec3::Zero();
      for (const BruteSplat& s : splats) {
        if (T < opts.min_transmittance) {
          break;
        }
        const Vec2 d(x + 0.5 - s.mean2d.x(), y + 0.5 - s.mean2d.y());
        const Mat2 inv = s.cov2d.inverse();
        const double power = -0.5 * d.dot(inv * d);
        if (power > 0.0) {
          continue;
        }
        const double alpha = std::min(opts.alpha_cap, s.alpha_base * std::exp(power));
        if (alpha < opts.alpha_skip || alpha <= 0.0) {
          continue;
        }
        c += s.rgb * (alpha * T);
        res.hit_count[std::size_t(s.index)] += 1;
        res.weight_sum[std::size_t(s.index)] +=
            opts.stat_mode == splatpack::StatMode::literal ? s.alpha_base * T : alpha * T;
        T *= 1.0 - alpha;
      }
      for (int ch = 0; ch < 3; ++ch) {
        res.image.at(y, x, ch) = std::clamp(c[ch], 0.0, 1.0);
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Per-ray significance accumulation with its own volume normalization.
inline std::vector<double> significance(const GaussianCloud& cloud,
                                        const std::vector<Camera>& views, double beta,
                                        const RenderOptions& opts) {
  std::vector<double> acc(std::size_t(cloud.count()), 0.0);
  for (const Camera& cam : views) {
    const BruteResult r = brute_render(cloud, cam, opts);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      acc[i] += r.weight_sum[i];
    }
  }
  std::vector<double> volumes(std::size_t(cloud.count()));
  for (std::int64_t i = 0; i < cloud.count(); ++i) {
    volumes[std::size_t(i)] = 4.0 / 3.0 * M_PI * std::exp(cloud.raw_scale(i, 0)) *
                              std::exp(cloud.raw_scale(i, 1)) * std::exp(cloud.raw_scale(i, 2));
  }
  std::vector<double> sorted = volumes;
  std::sort(sorted.begin(), sorted.end());
  const double pos = 0.9 * double(sorted.size() - 1);
  const auto lo = std::size_t(pos);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double v90 = sorted[lo] + (pos - double(lo)) * (sorted[hi] - sorted[lo]);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double vn = v90 > 0.0 ? std::min(volumes[i] / v90, 1.0) : 1.0;
    acc[i] *= std::pow(vn, beta);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Direct windowed SSIM (zero-padded 11x11 Gaussian window, sigma 1.5).
inline double ssim_direct(const Image& a, const Image& b) {
  constexpr int W = 11;
  constexpr double sigma = 1.5;
  double k1[W];
  double ksum = 0.0;
  for (int i = 0; i < W; ++i) {
    const double d = i - W / 2;
    k1[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    ksum += k1[i];
  }
  for (double& v : k1) v /= ksum;

  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    double channel_sum = 0.0;
    for (int y = 0; y < a.height; ++y) {
      for (int x = 0; x < a.width; ++x) {
        double mx = 0, my = 0, ex2 = 0, ey2 = 0, exy = 0;
        for (int dy = -W / 2; dy <= W / 2; ++dy) {
          for (int dx = -W / 2; dx <= W / 2; ++dx) {
            const int yy = y + dy, xx = x + dx;
            if (yy < 0 || yy >= a.height || xx < 0 || xx >= a.width) {
              continue;  // zero padding contributes nothing
            }
            const double w = k1[dy + W / 2] * k1[dx + W / 2];
            const double av = a.at(yy, xx, ch), bv = b.at(yy, xx, ch);
            mx += w * av;
            my += w * bv;
            ex2 += w * av * av;
            ey2 += w * bv * bv;
            exy += w * av * bv;
          }
        }
        const double vx = ex2 - mx * mx, vy = ey2 - my * my, vxy = exy - mx * my;
        channel_sum += ((2 * mx * my + c1) * (2 * vxy + c2)) /
                       ((mx * mx + my * my + c1) * (vx + vy + c2));
      }
    }
    total += channel_sum / double(a.pixel_count());
  }
  return total / 3.0;
}

inline double psnr_direct(const Image& a, const Image& b) {
  double sum = 0.0;
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double d = a.at(y, x, c) - b.at(y, x, c);
        sum += d * d;
      }
    }
  }
  const double mse = sum / (double(a.pixel_count()) * 3.0);
  return 10.0 * std::log10(1.0 / mse);
}

// ---------------------------------------------------------------------------
// Naive Lloyd k-means (random init) for SSE comparisons.
inline double lloyd_sse(const splatpack::MatXR& vectors, std::int64_t k, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  const std::int64_t n = vectors.rows();
  std::vector<std::int64_t> perm(std::size_t(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), engine);
  splatpack::MatXR centers(k, vectors.cols());
  for (std::int64_t c = 0; c < k; ++c) {
    centers.row(c) = vectors.row(perm[std::size_t(c) % std::size_t(n)]);
  }
  std::vector<std::int64_t> labels(std::size_t(n), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::int64_t i = 0; i < n; ++i) {
      std::int64_t best = 0;
      double best_d = (vectors.row(i) - centers.row(0)).squaredNorm();
      for (std::int64_t c = 1; c < k; ++c) {
        const double d = (vectors.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[std::size_t(i)] != best) {
        labels[std::size_t(i)] = best;
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
    splatpack::MatXR sums = splatpack::MatXR::Zero(k, vectors.cols());
    std::vector<std::int64_t> counts(std::size_t(k), 0);
    for (std::int64_t i = 0; i < n; ++i) {
      sums.row(labels[std::size_t(i)]) += vectors.row(i);
      counts[std::size_t(labels[std::size_t(i)])]++;
    }
    for (std::int64_t c = 0; c < k; ++c) {
      if (counts[std::size_t(c)] > 0) {
        centers.row(c) = sums.row(c) / double(counts[std::size_t(c)]);
      }
    }
  }
  double sse = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    sse += (vectors.row(i) - centers.row(labels[std::size_t(i)])).squaredNorm();
  }
  return sse;
}

inline double sse_of(const splatpack::MatXR& vectors, const splatpack::MatXR& centers) {
  double sse = 0.0;
  for (std::int64_t i = 0; i < vectors.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t c = 0; c < centers.rows(); ++c) {
      best = std::min(best, (vectors.row(i) - centers.row(c)).squaredNorm());
    }
    sse += best;
  }
  return sse;
}

}  // namespace oracle
