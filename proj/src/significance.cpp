#include "splatpack/significance.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "splatpack/optim.hpp"
#include "splatpack/photometric.hpp"

namespace splatpack {

double gaussian_volume(const Vec3& raw_scale) {
  const Vec3 s = raw_scale.array().exp();
  return (4.0 / 3.0) * M_PI * s.x() * s.y() * s.z();
}

double volume_percentile90(const GaussianCloud& cloud) {
  const std::int64_t n = cloud.count();
  if (n == 0) {
    return 0.0;
  }
  std::vector<double> volumes(n);
  for (std::int64_t i = 0; i < n; ++i) {
    volumes[i] = gaussian_volume(cloud.raw_scale.row(i));
  }
  std::sort(volumes.begin(), volumes.end());
  const double pos = 0.9 * double(n - 1);
  const std::int64_t lo = std::int64_t(pos);
  const std::int64_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - double(lo);
  return volumes[lo] + frac * (volumes[hi] - volumes[lo]);
}

SignificanceVector compute_global_significance(const GaussianCloud& cloud,
                                               const std::vector<Camera>& views, double beta,
                                               StatMode mode, const RenderOptions& opts) {
  if (views.empty()) {
    throw Error("significance needs at least one view");
  }
  if (!(beta > 0.0)) {
    throw Error("beta must be positive");
  }
  SignificanceVector sv;
  sv.beta = beta;
  sv.mode = mode;
  sv.scores = VecX::Zero(cloud.count());

  RenderOptions stat_opts = opts;
  stat_opts.stat_mode = mode;
  // Per-view contributions summed in fixed view order.
  for (const Camera& cam : views) {
    const RenderOutput out = render(cloud, cam, stat_opts, true);
    sv.scores += out.stats->weight_sum;
  }

  sv.v_max90 = volume_percentile90(cloud);
  for (std::int64_t i = 0; i < cloud.count(); ++i) {
    const double v_norm =
        sv.v_max90 > 0.0 ? std::min(gaussian_volume(cloud.raw_scale.row(i)) / sv.v_max90, 1.0)
                         : 1.0;
    sv.scores(i) *= std::pow(v_norm, beta);
  }
  return sv;
}

PruneResult prune(const GaussianCloud& cloud, const SignificanceVector& scores, double ratio) {
  if (scores.scores.size() != cloud.count()) {
    throw Error("score vector length does not match cloud");
  }
  if (ratio < 0.0 || ratio >= 1.0) {
    throw Error("prune ratio must lie in [0, 1)");
  }
  const std::int64_t n = cloud.count();
  const std::int64_t remove = std::int64_t(ratio * double(n));

  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Ascending score; among ties the higher index is removed first so the lower
  // index is kept.
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    if (scores.scores(a) != scores.scores(b)) {
      return scores.scores(a) < scores.scores(b);
    }
    return a > b;
  });

  std::vector<bool> removed(n, false);
  for (std::int64_t i = 0; i < remove; ++i) {
    removed[order[i]] = true;
  }

  PruneResult res;
  res.old_to_new.assign(n, -1);
  res.kept.reserve(n - remove);
  for (std::int64_t i = 0; i < n; ++i) {
    if (!removed[i]) {
      res.old_to_new[i] = std::int64_t(res.kept.size());
      res.kept.push_back(i);
    }
  }

  const std::int64_t m = std::int64_t(res.kept.size());
  res.cloud = GaussianCloud::zeros(m, cloud.sh_degree);
  for (std::int64_t j = 0; j < m; ++j) {
    const std::int64_t i = res.kept[j];
    res.cloud.positions.row(j) = cloud.positions.row(i);
    res.cloud.sh_dc.row(j) = cloud.sh_dc.row(i);
    res.cloud.sh_rest.row(j) = cloud.sh_rest.row(i);
    res.cloud.raw_opacity(j) = cloud.raw_opacity(i);
    res.cloud.raw_scale.row(j) = cloud.raw_scale.row(i);
    res.cloud.rotation.row(j) = cloud.rotation.row(i);
  }
  return res;
}

GaussianCloud co_adapt(const GaussianCloud& cloud, const std::vector<View>& views,
                       int iterations, double step_size, const RenderOptions& opts) {
  if (views.empty()) {
    throw Error("co-adaptation needs at least one view");
  }
  GaussianCloud out = cloud;
  if (iterations <= 0 || out.count() == 0) {
    return out;
  }

  AdamOptimizer opt({
      {out.sh_dc.data(), out.sh_dc.size(), kLrShDc * step_size},
      {out.sh_rest.data(), out.sh_rest.size(), kLrShRest * step_size},
      {out.raw_opacity.data(), out.raw_opacity.size(), kLrOpacity * step_size},
  });

  auto do_step = [&](int view_index, double lr_scale) {
    const View& v = views[view_index];
    const RenderOutput r = render(out, v.camera, opts);
    const LossResult loss = photometric_loss(r.image, v.image);
    const AppearanceGradients g = render_backward(out, v.camera, loss.grad, opts);
    opt.step({g.sh_dc.data(), g.sh_rest.data(), g.raw_opacity.data()}, lr_scale);
  };
  auto eval_mean = [&]() {
    double total = 0.0;
    for (const View& v : views) {
      total += photometric_loss(render(out, v.camera, opts).image, v.image).value;
    }
    return total / double(views.size());
  };

  descend_with_backoff(opt, iterations, int(views.size()), do_step, eval_mean);
  return out;
}

void save_scores(const SignificanceVector& sv, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot write " + path);
  }
  f.write("GSSC", 4);
  const std::uint64_t count = std::uint64_t(sv.scores.size());
  f.write(reinterpret_cast<const char*>(&count), 8);
  for (std::int64_t i = 0; i < sv.scores.size(); ++i) {
    const float v = float(sv.scores(i));
    f.write(reinterpret_cast<const char*>(&v), 4);
  }
}

SignificanceVector load_scores(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot open " + path);
  }
  char magic[4];
  if (!f.read(magic, 4) || std::memcmp(magic, "GSSC", 4) != 0) {
    throw ParseError("bad scores magic (expected GSSC)", 0);
  }
  std::uint64_t count = 0;
  if (!f.read(reinterpret_cast<char*>(&count), 8)) {
    throw ParseError("unexpected end of scores header", 4);
  }
  SignificanceVector sv;
  sv.scores = VecX::Zero(std::int64_t(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    float v = 0;
    if (!f.read(reinterpret_cast<char*>(&v), 4)) {
      throw ParseError("unexpected end of scores payload", 12 + i * 4);
    }
    sv.scores(std::int64_t(i)) = v;
  }
  return sv;
}

}  // namespace splatpack
