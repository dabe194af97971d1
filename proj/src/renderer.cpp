#include "splatpack/renderer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "splatpack/covariance.hpp"
#include "splatpack/sh.hpp"

namespace splatpack {

namespace {

struct ProjCore {
  bool culled = true;
  Vec2 mean2d = Vec2::Zero();
  Mat2 cov2d = Mat2::Zero();
  double depth = 0.0;
};

double max_eigenvalue_2x2(const Mat2& m) {
  const double mid = 0.5 * (m(0, 0) + m(1, 1));
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return mid + std::sqrt(std::max(0.0, mid * mid - det));
}

ProjCore project_core(const Vec3& position, const Vec3& raw_scale, const Vec4& rotation,
                      const Camera& cam, const RenderOptions& opts) {
  ProjCore out;
  const Vec3 p_cam = cam.rotation * position + cam.translation;
  out.depth = p_cam.z();
  if (out.depth <= opts.near_depth) {
    return out;
  }
  const double inv_z = 1.0 / p_cam.z();
  out.mean2d = Vec2(cam.fx * p_cam.x() * inv_z + cam.cx, cam.fy * p_cam.y() * inv_z + cam.cy);

  Eigen::Matrix<double, 2, 3> jacobian;
  jacobian << cam.fx * inv_z, 0.0, -cam.fx * p_cam.x() * inv_z * inv_z,
              0.0, cam.fy * inv_z, -cam.fy * p_cam.y() * inv_z * inv_z;
  const Eigen::Matrix<double, 2, 3> m = jacobian * cam.rotation;
  out.cov2d = m * covariance_from(raw_scale, rotation) * m.transpose();
  out.cov2d += opts.lowpass * Mat2::Identity();

  const double radius3 = 3.0 * std::sqrt(max_eigenvalue_2x2(out.cov2d));
  if (out.mean2d.x() + radius3 < 0.0 || out.mean2d.x() - radius3 > cam.width ||
      out.mean2d.y() + radius3 < 0.0 || out.mean2d.y() - radius3 > cam.height) {
    return out;
  }
  out.culled = false;
  return out;
}

Vec3 view_direction(const Vec3& position, const Camera& cam) {
  Vec3 d = position - cam.center();
  const double n = d.norm();
  return n > 1e-12 ? Vec3(d / n) : Vec3(0, 0, 1);
}

struct PreparedSplat {
  std::int64_t cloud_index;
  double mean_x, mean_y;
  double conic_a, conic_b, conic_c;
  double depth;
  double rgb[3];
  double alpha_base;
  int x0, y0, x1, y1;  // inclusive pixel bounds used for tile binning
};

struct Prepared {
  std::vector<PreparedSplat> splats;  // depth-sorted, stable in cloud index
  std::vector<std::array<double, 15>> basis;
  std::vector<std::array<bool, 3>> gate;
  int tiles_x = 0, tiles_y = 0;
  std::vector<std::vector<std::int32_t>> bins;
};

Prepared prepare(const GaussianCloud& cloud, const Camera& cam, const RenderOptions& opts,
                 bool for_backward) {
  cloud.validate();
  cam.validate();
  Prepared prep;
  const std::int64_t n = cloud.count();
  prep.splats.reserve(n);
  if (for_backward) {
    prep.basis.reserve(n);
    prep.gate.reserve(n);
  }

  // Support radius: outside it alpha is guaranteed below the skip threshold
  // (alpha_base < 1), so tile binning cannot change any pixel.
  const bool bounded = opts.alpha_skip > 0.0;
  const double support_sq = bounded ? 2.0 * std::log(1.0 / opts.alpha_skip) : 0.0;

  const int rest_n = sh::rest_coeff_count(cloud.sh_degree);
  for (std::int64_t i = 0; i < n; ++i) {
    const ProjCore core = project_core(cloud.positions.row(i), cloud.raw_scale.row(i),
                                       cloud.rotation.row(i), cam, opts);
    if (core.culled) {
      continue;
    }
    PreparedSplat s;
    s.cloud_index = i;
    s.mean_x = core.mean2d.x();
    s.mean_y = core.mean2d.y();
    const double det =
        core.cov2d(0, 0) * core.cov2d(1, 1) - core.cov2d(0, 1) * core.cov2d(1, 0);
    const double inv_det = 1.0 / det;
    s.conic_a = core.cov2d(1, 1) * inv_det;
    s.conic_b = -core.cov2d(0, 1) * inv_det;
    s.conic_c = core.cov2d(0, 0) * inv_det;
    s.depth = core.depth;
    s.alpha_base = sigmoid(cloud.raw_opacity(i));

    const Vec3 dir = view_direction(cloud.positions.row(i), cam);
    std::array<double, 15> basis{};
    sh::eval_rest_basis(cloud.sh_degree, Vec3(dir), basis.data());
    Vec3 pre = Vec3::Constant(0.5) + sh::kC0 * Vec3(cloud.sh_dc.row(i));
    for (int k = 0; k < rest_n; ++k) {
      for (int c = 0; c < 3; ++c) {
        pre[c] += basis[k] * cloud.sh_rest(i, 3 * k + c);
      }
    }
    for (int c = 0; c < 3; ++c) {
      s.rgb[c] = std::max(0.0, pre[c]);
    }

    if (bounded) {
      const double r = std::sqrt(support_sq * max_eigenvalue_2x2(core.cov2d));
      s.x0 = std::max(0, int(std::floor(s.mean_x - r)));
      s.x1 = std::min(cam.width - 1, int(std::ceil(s.mean_x + r)));
      s.y0 = std::max(0, int(std::floor(s.mean_y - r)));
      s.y1 = std::min(cam.height - 1, int(std::ceil(s.mean_y + r)));
      if (s.x0 > s.x1 || s.y0 > s.y1) {
        continue;  // support entirely off screen
      }
    } else {
      s.x0 = 0;
      s.y0 = 0;
      s.x1 = cam.width - 1;
      s.y1 = cam.height - 1;
    }

    prep.splats.push_back(s);
    if (for_backward) {
      prep.basis.push_back(basis);
      prep.gate.push_back({pre[0] > 0.0, pre[1] > 0.0, pre[2] > 0.0});
    }
  }

  // Depth sort, stable in cloud index. Backward side data follows the permutation.
  std::vector<std::int32_t> order(prep.splats.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = std::int32_t(i);
  std::stable_sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    return prep.splats[a].depth < prep.splats[b].depth;
  });
  {
    std::vector<PreparedSplat> sorted;
    sorted.reserve(prep.splats.size());
    for (auto idx : order) sorted.push_back(prep.splats[idx]);
    prep.splats = std::move(sorted);
    if (for_backward) {
      std::vector<std::array<double, 15>> b2;
      std::vector<std::array<bool, 3>> g2;
      b2.reserve(order.size());
      g2.reserve(order.size());
      for (auto idx : order) {
        b2.push_back(prep.basis[idx]);
        g2.push_back(prep.gate[idx]);
      }
      prep.basis = std::move(b2);
      prep.gate = std::move(g2);
    }
  }

  const int ts = opts.tile_size;
  prep.tiles_x = (cam.width + ts - 1) / ts;
  prep.tiles_y = (cam.height + ts - 1) / ts;
  prep.bins.assign(std::size_t(prep.tiles_x) * prep.tiles_y, {});
  for (std::size_t si = 0; si < prep.splats.size(); ++si) {
    const PreparedSplat& s = prep.splats[si];
    for (int ty = s.y0 / ts; ty <= s.y1 / ts; ++ty) {
      for (int tx = s.x0 / ts; tx <= s.x1 / ts; ++tx) {
        prep.bins[std::size_t(ty) * prep.tiles_x + tx].push_back(std::int32_t(si));
      }
    }
  }
  return prep;
}

double splat_alpha(const PreparedSplat& s, double px, double py, const RenderOptions& opts) {
  const double dx = px - s.mean_x;
  const double dy = py - s.mean_y;
  const double power =
      -0.5 * (s.conic_a * dx * dx + s.conic_c * dy * dy) - s.conic_b * dx * dy;
  if (power > 0.0) {
    return 0.0;
  }
  return std::min(opts.alpha_cap, s.alpha_base * std::exp(power));
}

}  // namespace

std::optional<Splat2D> project_gaussian(const Vec3& position, const Vec3& raw_scale,
                                        const Vec4& rotation, const Vec3& sh_dc,
                                        Eigen::Ref<const Eigen::RowVectorXd> sh_rest,
                                        int sh_degree, double raw_opacity, const Camera& cam,
                                        const RenderOptions& opts) {
  const ProjCore core = project_core(position, raw_scale, rotation, cam, opts);
  if (core.culled) {
    return std::nullopt;
  }
  Splat2D s;
  s.mean2d = core.mean2d;
  s.cov2d = core.cov2d;
  s.view_depth = core.depth;
  s.rgb = eval_sh(sh_dc, sh_rest, sh_degree, view_direction(position, cam));
  s.alpha_base = sigmoid(raw_opacity);
  return s;
}

std::optional<Splat2D> project_gaussian(const GaussianCloud& cloud, std::int64_t index,
                                        const Camera& cam, const RenderOptions& opts) {
  return project_gaussian(cloud.positions.row(index), cloud.raw_scale.row(index),
                          cloud.rotation.row(index), cloud.sh_dc.row(index),
                          cloud.sh_rest.row(index), cloud.sh_degree, cloud.raw_opacity(index),
                          cam, opts);
}

RenderOutput render(const GaussianCloud& cloud, const Camera& cam, const RenderOptions& opts,
                    bool collect_stats) {
  const Prepared prep = prepare(cloud, cam, opts, false);

  RenderOutput out;
  out.image = Image(cam.width, cam.height);
  out.transmittance = VecX::Ones(std::int64_t(cam.width) * cam.height);
  if (collect_stats) {
    GaussianStats stats;
    stats.hit_count.setZero(cloud.count());
    stats.weight_sum = VecX::Zero(cloud.count());
    out.stats = std::move(stats);
  }

  const int ts = opts.tile_size;
  for (int ty = 0; ty < prep.tiles_y; ++ty) {
    for (int tx = 0; tx < prep.tiles_x; ++tx) {
      const auto& bin = prep.bins[std::size_t(ty) * prep.tiles_x + tx];
      if (bin.empty()) {
        continue;
      }
      const int y_end = std::min(cam.height, (ty + 1) * ts);
      const int x_end = std::min(cam.width, (tx + 1) * ts);
      for (int y = ty * ts; y < y_end; ++y) {
        for (int x = tx * ts; x < x_end; ++x) {
          const double px = x + 0.5, py = y + 0.5;
          double T = 1.0;
          double c0 = 0.0, c1 = 0.0, c2 = 0.0;
          for (const std::int32_t si : bin) {
            if (T < opts.min_transmittance) {
              break;
            }
            const PreparedSplat& s = prep.splats[si];
            const double alpha = splat_alpha(s, px, py, opts);
            if (alpha < opts.alpha_skip || alpha <= 0.0) {
              continue;
            }
            const double w = alpha * T;
            c0 += s.rgb[0] * w;
            c1 += s.rgb[1] * w;
            c2 += s.rgb[2] * w;
            if (out.stats) {
              out.stats->hit_count(s.cloud_index) += 1;
              out.stats->weight_sum(s.cloud_index) +=
                  opts.stat_mode == StatMode::literal ? s.alpha_base * T : w;
            }
            T *= 1.0 - alpha;
          }
          const std::int64_t pix = std::int64_t(y) * cam.width + x;
          out.image.data(pix, 0) = clamp01(c0);
          out.image.data(pix, 1) = clamp01(c1);
          out.image.data(pix, 2) = clamp01(c2);
          out.transmittance(pix) = T;
        }
      }
    }
  }
  return out;
}

AppearanceGradients render_backward(const GaussianCloud& cloud, const Camera& cam,
                                    const Image& dL_dimage, const RenderOptions& opts) {
  if (dL_dimage.width != cam.width || dL_dimage.height != cam.height) {
    throw Error("gradient image dimensions do not match camera viewport");
  }
  const Prepared prep = prepare(cloud, cam, opts, true);

  AppearanceGradients grads;
  grads.sh_dc = MatX3::Zero(cloud.count(), 3);
  grads.sh_rest = MatXR::Zero(cloud.count(), cloud.sh_rest.cols());
  grads.raw_opacity = VecX::Zero(cloud.count());

  // Color-space gradient per splat; expanded through the SH basis afterwards.
  std::vector<std::array<double, 3>> color_grad(prep.splats.size(), {0.0, 0.0, 0.0});

  struct Contribution {
    std::int32_t si;
    double alpha;
    double T_before;
  };
  std::vector<Contribution> contribs;

  const int ts = opts.tile_size;
  for (int ty = 0; ty < prep.tiles_y; ++ty) {
    for (int tx = 0; tx < prep.tiles_x; ++tx) {
      const auto& bin = prep.bins[std::size_t(ty) * prep.tiles_x + tx];
      if (bin.empty()) {
        continue;
      }
      const int y_end = std::min(cam.height, (ty + 1) * ts);
      const int x_end = std::min(cam.width, (tx + 1) * ts);
      for (int y = ty * ts; y < y_end; ++y) {
        for (int x = tx * ts; x < x_end; ++x) {
          const double px = x + 0.5, py = y + 0.5;
          contribs.clear();
          double T = 1.0;
          double c_pre[3] = {0.0, 0.0, 0.0};
          for (const std::int32_t si : bin) {
            if (T < opts.min_transmittance) {
              break;
            }
            const PreparedSplat& s = prep.splats[si];
            const double alpha = splat_alpha(s, px, py, opts);
            if (alpha < opts.alpha_skip || alpha <= 0.0) {
              continue;
            }
            contribs.push_back({si, alpha, T});
            const double w = alpha * T;
            for (int c = 0; c < 3; ++c) c_pre[c] += s.rgb[c] * w;
            T *= 1.0 - alpha;
          }
          if (contribs.empty()) {
            continue;
          }
          const std::int64_t pix = std::int64_t(y) * cam.width + x;
          double dC[3];
          for (int c = 0; c < 3; ++c) {
            // The final clamp saturates at 1; the lower edge never gates because
            // per-splat colors are already non-negative.
            dC[c] = c_pre[c] < 1.0 ? dL_dimage.data(pix, c) : 0.0;
          }

          double suffix[3] = {0.0, 0.0, 0.0};  // sum of c_j * alpha_j * T_j for j > i
          for (std::size_t k = contribs.size(); k-- > 0;) {
            const auto& [si, alpha, T_before] = contribs[k];
            const PreparedSplat& s = prep.splats[si];
            double dalpha = 0.0;
            const double w = alpha * T_before;
            auto& cg = color_grad[si];
            for (int c = 0; c < 3; ++c) {
              cg[c] += dC[c] * w;
              dalpha += dC[c] * (s.rgb[c] * T_before - suffix[c] / (1.0 - alpha));
              suffix[c] += s.rgb[c] * w;
            }
            if (alpha < opts.alpha_cap) {
              // alpha = alpha_base * G; d alpha / d raw = G * base * (1 - base).
              grads.raw_opacity(s.cloud_index) += dalpha * alpha * (1.0 - s.alpha_base);
            }
          }
        }
      }
    }
  }

  const int rest_n = sh::rest_coeff_count(cloud.sh_degree);
  for (std::size_t si = 0; si < prep.splats.size(); ++si) {
    const auto& cg = color_grad[si];
    if (cg[0] == 0.0 && cg[1] == 0.0 && cg[2] == 0.0) {
      continue;
    }
    const std::int64_t gi = prep.splats[si].cloud_index;
    for (int c = 0; c < 3; ++c) {
      if (!prep.gate[si][c]) {
        continue;  // per-splat color clamped at zero
      }
      grads.sh_dc(gi, c) += cg[c] * sh::kC0;
      for (int k = 0; k < rest_n; ++k) {
        grads.sh_rest(gi, 3 * k + c) += cg[c] * prep.basis[si][k];
      }
    }
  }
  return grads;
}

}  // namespace splatpack
