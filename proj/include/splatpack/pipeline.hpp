#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "splatpack/camera_rig.hpp"
#include "splatpack/gaussian_cloud.hpp"
#include "splatpack/renderer.hpp"

namespace splatpack {

struct PipelineConfig {
  double prune_ratio = 0.66;
  double beta = 0.1;
  StatMode significance_mode = StatMode::literal;
  int target_sh_degree = 2;
  double pseudo_sigma = 0.1;
  int pseudo_per_view = 1;
  int distill_iters = 500;
  int coadapt_iters = 500;
  double vq_ratio = 0.6;
  std::int64_t codebook_k = 8192;
  double lambda_decay = 0.8;
  int vq_finetune_iters = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

std::string significance_mode_name(StatMode mode);
StatMode significance_mode_from(const std::string& name);

/// Flat `key = value` TOML subset; section headers and comments are skipped.
PipelineConfig parse_config_toml(const std::string& text);
PipelineConfig load_config(const std::string& path);
nlohmann::json config_to_json(const PipelineConfig& config);

struct PipelineResult {
  std::vector<std::uint8_t> container;
  nlohmann::json report;  // timings live under report["timings"]
};

/// Full compression pass: significance, prune, co-adapt, SH distill, VQ,
/// VQ fine-tune, encode. Quality targets are the input cloud's own renders.
/// Deterministic given (input, rig, config) apart from the timing fields.
PipelineResult run_pipeline(const GaussianCloud& input, const CameraRig& rig,
                            const PipelineConfig& config);

}  // namespace splatpack
