#include "splatpack/distill.hpp"

#include "splatpack/optim.hpp"
#include "splatpack/photometric.hpp"
#include "splatpack/rng.hpp"

namespace splatpack {

std::vector<Camera> sample_pseudo_views(const std::vector<Camera>& train_views,
                                        const PseudoViewConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<Camera> out;
  out.reserve(train_views.size() * std::size_t(cfg.count_per_view));
  for (const Camera& cam : train_views) {
    for (int i = 0; i < cfg.count_per_view; ++i) {
      Camera pseudo = cam;
      for (int c = 0; c < 3; ++c) {
        pseudo.translation[c] += rng.normal(0.0, cfg.sigma);
      }
      out.push_back(pseudo);
    }
  }
  return out;
}

GaussianCloud distill(const GaussianCloud& teacher, int to_degree,
                      const std::vector<Camera>& train_views, const PseudoViewConfig& cfg,
                      int iterations, double step_size, const RenderOptions& opts) {
  if (to_degree >= teacher.sh_degree) {
    throw Error("distillation target degree must be below the teacher degree");
  }
  if (train_views.empty()) {
    throw Error("distillation needs at least one view");
  }

  GaussianCloud student = sh_truncate(teacher, to_degree);
  if (iterations <= 0 || student.count() == 0) {
    return student;
  }

  std::vector<Camera> views = train_views;
  for (const Camera& cam : sample_pseudo_views(train_views, cfg)) {
    views.push_back(cam);
  }
  // The teacher is frozen, so its renders are fixed targets.
  std::vector<Image> targets;
  targets.reserve(views.size());
  for (const Camera& cam : views) {
    targets.push_back(render(teacher, cam, opts).image);
  }

  AdamOptimizer opt({
      {student.sh_dc.data(), student.sh_dc.size(), kLrShDc * step_size},
      {student.sh_rest.data(), student.sh_rest.size(), kLrShRest * step_size},
      {student.raw_opacity.data(), student.raw_opacity.size(), kLrOpacity * step_size},
  });

  auto do_step = [&](int view_index, double lr_scale) {
    const RenderOutput r = render(student, views[view_index], opts);
    const LossResult loss = pixel_mse_loss(r.image, targets[view_index]);
    const AppearanceGradients g = render_backward(student, views[view_index], loss.grad, opts);
    opt.step({g.sh_dc.data(), g.sh_rest.data(), g.raw_opacity.data()}, lr_scale);
  };
  auto eval_mean = [&]() {
    double total = 0.0;
    for (std::size_t v = 0; v < views.size(); ++v) {
      total += pixel_mse_loss(render(student, views[v], opts).image, targets[v]).value;
    }
    return total / double(views.size());
  };

  descend_with_backoff(opt, iterations, int(views.size()), do_step, eval_mean);
  return student;
}

}  // namespace splatpack
