#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

#include "splatpack/types.hpp"

namespace splatpack {

// Per-attribute step sizes, scaled for desk-size scenes.
inline constexpr double kLrShDc = 2.5e-3;
inline constexpr double kLrShRest = 1.25e-4;
inline constexpr double kLrOpacity = 5e-2;

struct ParamPlane {
  double* data = nullptr;
  Eigen::Index size = 0;
  double lr = 0.0;
};

/// Adam over a set of flat parameter planes.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(std::vector<ParamPlane> planes, double beta1 = 0.9,
                         double beta2 = 0.999, double eps = 1e-8)
      : planes_(std::move(planes)), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& p : planes_) {
      m_.emplace_back(VecX::Zero(p.size));
      v_.emplace_back(VecX::Zero(p.size));
    }
  }

  /// One update; grads[i] must hold planes_[i].size values.
  void step(const std::vector<const double*>& grads, double lr_scale) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, double(t_));
    const double bc2 = 1.0 - std::pow(beta2_, double(t_));
    for (std::size_t i = 0; i < planes_.size(); ++i) {
      auto& p = planes_[i];
      Eigen::Map<VecX> param(p.data, p.size);
      Eigen::Map<const VecX> g(grads[i], p.size);
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
      const double lr = p.lr * lr_scale;
      param.array() -=
          lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + eps_);
    }
  }

  /// Copies current parameter values (moments are reset on restore).
  std::vector<VecX> snapshot() const {
    std::vector<VecX> out;
    out.reserve(planes_.size());
    for (const auto& p : planes_) {
      out.emplace_back(Eigen::Map<const VecX>(p.data, p.size));
    }
    return out;
  }

  void restore(const std::vector<VecX>& snap) {
    for (std::size_t i = 0; i < planes_.size(); ++i) {
      Eigen::Map<VecX>(planes_[i].data, planes_[i].size) = snap[i];
      m_[i].setZero();
      v_[i].setZero();
    }
    t_ = 0;
  }

 private:
  std::vector<ParamPlane> planes_;
  std::vector<VecX> m_, v_;
  double beta1_, beta2_, eps_;
  long t_ = 0;
};

struct DescentTrace {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> epoch_losses;  // non-increasing best-so-far values
};

/// Epoch-level descent with step halving: after each pass over the views the
/// mean loss is re-evaluated; an epoch that regressed is rolled back and the
/// step scale halved. Guarantees final loss <= initial loss.
template <typename StepFn, typename EvalFn>
DescentTrace descend_with_backoff(AdamOptimizer& opt, int iterations, int views_per_epoch,
                                  StepFn&& do_step, EvalFn&& eval_mean_loss) {
  DescentTrace trace;
  trace.initial_loss = eval_mean_loss();
  double best_loss = trace.initial_loss;
  std::vector<VecX> best = opt.snapshot();
  double lr_scale = 1.0;

  const int epoch_len = std::max(1, views_per_epoch);
  int done = 0;
  while (done < iterations) {
    const int todo = std::min(epoch_len, iterations - done);
    for (int s = 0; s < todo; ++s) {
      do_step((done + s) % epoch_len, lr_scale);
    }
    done += todo;
    const double loss = eval_mean_loss();
    if (loss < best_loss) {
      best_loss = loss;
      best = opt.snapshot();
    } else {
      opt.restore(best);
      lr_scale *= 0.5;
    }
    trace.epoch_losses.push_back(best_loss);
  }
  opt.restore(best);
  trace.final_loss = best_loss;
  return trace;
}

}  // namespace splatpack
