#include "splatpack/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "splatpack/container.hpp"
#include "splatpack/distill.hpp"
#include "splatpack/image_metrics.hpp"
#include "splatpack/ply_io.hpp"
#include "splatpack/rng.hpp"
#include "splatpack/significance.hpp"
#include "splatpack/vq.hpp"

namespace splatpack {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) {
    return "";
  }
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void PipelineConfig::validate() const {
  if (prune_ratio < 0.0 || prune_ratio >= 1.0 || vq_ratio < 0.0 || vq_ratio >= 1.0) {
    throw Error("ratios must lie in [0, 1)");
  }
  if (!(beta > 0.0)) {
    throw Error("beta must be positive");
  }
  if (target_sh_degree < 0 || target_sh_degree > 3) {
    throw Error("target SH degree must lie in [0, 3]");
  }
  if (codebook_k < 1 || codebook_k > 65536) {
    throw Error("codebook size must lie in [1, 65536]");
  }
  if (lambda_decay < 0.0 || lambda_decay > 1.0) {
    throw Error("decay must lie in [0, 1]");
  }
  if (pseudo_sigma < 0.0 || pseudo_per_view < 0) {
    throw Error("pseudo-view parameters must be non-negative");
  }
  if (distill_iters < 0 || coadapt_iters < 0 || vq_finetune_iters < 0) {
    throw Error("iteration counts must be non-negative");
  }
}

std::string significance_mode_name(StatMode mode) {
  return mode == StatMode::literal ? "literal" : "blend_weight";
}

StatMode significance_mode_from(const std::string& name) {
  if (name == "literal") {
    return StatMode::literal;
  }
  if (name == "blend_weight") {
    return StatMode::blend_weight;
  }
  throw Error("unknown significance mode '" + name + "' (literal | blend_weight)");
}

PipelineConfig parse_config_toml(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty() || line.front() == '[') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    try {
      if (key == "prune_ratio") cfg.prune_ratio = std::stod(value);
      else if (key == "beta") cfg.beta = std::stod(value);
      else if (key == "significance_mode") cfg.significance_mode = significance_mode_from(value);
      else if (key == "target_sh_degree") cfg.target_sh_degree = std::stoi(value);
      else if (key == "pseudo_sigma") cfg.pseudo_sigma = std::stod(value);
      else if (key == "pseudo_per_view") cfg.pseudo_per_view = std::stoi(value);
      else if (key == "distill_iters") cfg.distill_iters = std::stoi(value);
      else if (key == "coadapt_iters") cfg.coadapt_iters = std::stoi(value);
      else if (key == "vq_ratio") cfg.vq_ratio = std::stod(value);
      else if (key == "codebook_k") cfg.codebook_k = std::stoll(value);
      else if (key == "lambda_decay") cfg.lambda_decay = std::stod(value);
      else if (key == "vq_finetune_iters") cfg.vq_finetune_iters = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else throw Error("unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw Error("config line " + std::to_string(line_no) + ": bad value for '" + key + "'");
    }
  }
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw Error("cannot open " + path);
  }
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config_toml(buf.str());
}

nlohmann::json config_to_json(const PipelineConfig& c) {
  return {
      {"prune_ratio", c.prune_ratio},
      {"beta", c.beta},
      {"significance_mode", significance_mode_name(c.significance_mode)},
      {"target_sh_degree", c.target_sh_degree},
      {"pseudo_sigma", c.pseudo_sigma},
      {"pseudo_per_view", c.pseudo_per_view},
      {"distill_iters", c.distill_iters},
      {"coadapt_iters", c.coadapt_iters},
      {"vq_ratio", c.vq_ratio},
      {"codebook_k", c.codebook_k},
      {"lambda_decay", c.lambda_decay},
      {"vq_finetune_iters", c.vq_finetune_iters},
      {"seed", c.seed},
  };
}

PipelineResult run_pipeline(const GaussianCloud& input, const CameraRig& rig,
                            const PipelineConfig& config) {
  config.validate();
  input.validate();
  if (rig.train.empty()) {
    throw Error("pipeline needs at least one training view");
  }

  const auto total_start = Clock::now();
  nlohmann::json timings = nlohmann::json::object();
  nlohmann::json stages = nlohmann::json::array();

  // The uncompressed input defines both the training targets and the quality
  // reference: every drop measured below is compression loss.
  std::vector<View> train_views;
  for (const Camera& cam : rig.train) {
    train_views.push_back({cam, render(input, cam).image});
  }
  std::vector<Image> test_targets;
  for (const Camera& cam : rig.test) {
    test_targets.push_back(render(input, cam).image);
  }

  auto record_stage = [&](const std::string& name, const GaussianCloud& cloud) {
    nlohmann::json stage;
    stage["name"] = name;
    stage["gaussian_count"] = cloud.count();
    stage["sh_degree"] = cloud.sh_degree;
    if (!rig.test.empty()) {
      double psnr_sum = 0.0, ssim_sum = 0.0;
      for (std::size_t v = 0; v < rig.test.size(); ++v) {
        const Image img = render(cloud, rig.test[v]).image;
        psnr_sum += psnr(img, test_targets[v]);
        ssim_sum += ssim(img, test_targets[v]);
      }
      stage["psnr_db"] = psnr_sum / double(rig.test.size());
      stage["ssim"] = ssim_sum / double(rig.test.size());
    }
    stages.push_back(std::move(stage));
  };

  record_stage("baseline", input);

  auto t = Clock::now();
  const SignificanceVector significance = compute_global_significance(
      input, rig.train, config.beta, config.significance_mode);
  timings["significance_s"] = seconds_since(t);

  t = Clock::now();
  PruneResult pruned = prune(input, significance, config.prune_ratio);
  SignificanceVector survivor_scores;
  survivor_scores.beta = significance.beta;
  survivor_scores.v_max90 = significance.v_max90;
  survivor_scores.mode = significance.mode;
  survivor_scores.scores = VecX::Zero(std::int64_t(pruned.kept.size()));
  for (std::size_t j = 0; j < pruned.kept.size(); ++j) {
    survivor_scores.scores(std::int64_t(j)) = significance.scores(pruned.kept[j]);
  }
  timings["prune_s"] = seconds_since(t);
  record_stage("prune", pruned.cloud);

  t = Clock::now();
  GaussianCloud adapted = co_adapt(pruned.cloud, train_views, config.coadapt_iters);
  timings["co_adapt_s"] = seconds_since(t);
  record_stage("co_adapt", adapted);

  t = Clock::now();
  GaussianCloud compacted;
  if (config.target_sh_degree < adapted.sh_degree) {
    PseudoViewConfig pv;
    pv.sigma = config.pseudo_sigma;
    pv.count_per_view = config.pseudo_per_view;
    pv.seed = split_seed(config.seed, 1);
    compacted = distill(adapted, config.target_sh_degree, rig.train, pv, config.distill_iters);
  } else {
    compacted = std::move(adapted);
  }
  timings["distill_s"] = seconds_since(t);
  record_stage("distill", compacted);

  t = Clock::now();
  VqBuildParams vq_params;
  vq_params.vq_ratio = config.vq_ratio;
  vq_params.codebook_k = config.codebook_k;
  vq_params.decay = config.lambda_decay;
  vq_params.seed = split_seed(config.seed, 2);
  const VqResult vq = build_vq(compacted, survivor_scores, vq_params);
  timings["vq_s"] = seconds_since(t);
  {
    GaussianCloud quantized = compacted;
    if (vq.codebook.k > 0) {
      materialize_members(quantized, vq.codebook, vq.assignments);
    }
    record_stage("vq_assign", quantized);
  }

  t = Clock::now();
  auto [tuned, tuned_codebook] =
      vq_finetune(compacted, vq.codebook, vq.assignments, train_views, config.vq_finetune_iters);
  if (vq.codebook.k > 0) {
    materialize_members(tuned, tuned_codebook, vq.assignments);
  }
  timings["vq_finetune_s"] = seconds_since(t);
  record_stage("vq_finetune", tuned);

  t = Clock::now();
  PipelineResult result;
  result.container = encode(tuned, tuned_codebook, vq.assignments);
  timings["encode_s"] = seconds_since(t);

  const Decoded decoded = decode(result.container);
  record_stage("decoded", decoded.cloud);

  const std::size_t raw_bytes = write_ply(input).size();
  timings["total_s"] = seconds_since(total_start);

  result.report["config"] = config_to_json(config);
  result.report["stages"] = std::move(stages);
  result.report["sizes"] = {
      {"container_bytes", result.container.size()},
      {"raw_ply_bytes", raw_bytes},
      {"compression_ratio", double(raw_bytes) / double(result.container.size())},
  };
  result.report["vq"] = {
      {"member_count", vq.assignments.member_count()},
      {"codebook_k", vq.codebook.k},
  };
  result.report["timings"] = std::move(timings);
  return result;
}

}  // namespace splatpack
