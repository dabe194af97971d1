#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "splatpack/container.hpp"
#include "splatpack/distill.hpp"
#include "splatpack/image_metrics.hpp"
#include "splatpack/pipeline.hpp"
#include "splatpack/ply_io.hpp"
#include "splatpack/png_io.hpp"
#include "splatpack/scene_gen.hpp"
#include "splatpack/significance.hpp"
#include "splatpack/vq.hpp"

namespace sp = splatpack;

namespace {

bool is_container_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  char magic[4] = {};
  f.read(magic, 4);
  return f && std::string(magic, 4) == "LGSC";
}

sp::GaussianCloud load_any_cloud(const std::string& path) {
  if (is_container_file(path)) {
    return sp::load_container(path).cloud;
  }
  return sp::load_ply(path);
}

std::vector<sp::View> self_supervised_views(const sp::GaussianCloud& cloud,
                                            const std::vector<sp::Camera>& cams) {
  std::vector<sp::View> views;
  views.reserve(cams.size());
  for (const auto& cam : cams) {
    views.push_back({cam, sp::render(cloud, cam).image});
  }
  return views;
}

std::size_t file_size(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  return f ? std::size_t(f.tellg()) : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"splatpack: Gaussian-splat scene compression toolkit"};
  app.require_subcommand(1);

  // ---- gen-scene ----
  auto* gen = app.add_subcommand("gen-scene", "generate a synthetic scene (PLY + camera rig)");
  std::string gen_out;
  sp::SceneSpec spec;
  gen->add_option("--out", gen_out, "output prefix (<out>.ply, <out>.cameras.json)")
      ->required();
  gen->add_option("--n", spec.n_gaussians, "Gaussian count");
  gen->add_option("--sh-degree", spec.sh_degree, "SH degree (0..3)");
  gen->add_option("--specular", spec.specular_strength, "view-dependent band magnitude");
  gen->add_option("--train-views", spec.n_train_views, "training view count");
  gen->add_option("--test-views", spec.n_test_views, "test view count");
  gen->add_option("--width", spec.width, "image width");
  gen->add_option("--height", spec.height, "image height");
  gen->add_option("--opacity-min", spec.opacity_min, "raw opacity range low");
  gen->add_option("--opacity-max", spec.opacity_max, "raw opacity range high");
  gen->add_option("--scale-min", spec.log_scale_min, "log-scale range low");
  gen->add_option("--scale-max", spec.log_scale_max, "log-scale range high");
  gen->add_option("--seed", spec.seed, "scene seed");
  gen->callback([&]() {
    const sp::Scene scene = sp::generate_scene(spec);
    sp::save_ply(scene.cloud, gen_out + ".ply");
    sp::CameraRig rig{scene.train_views, scene.test_views};
    sp::save_camera_rig(rig, gen_out + ".cameras.json");
    std::cout << "wrote " << gen_out << ".ply (" << scene.cloud.count() << " Gaussians) and "
              << gen_out << ".cameras.json\n";
  });

  // ---- significance ----
  auto* sig = app.add_subcommand("significance", "score Gaussians over the training views");
  std::string sig_in, sig_cams, sig_out, sig_mode = "literal";
  double sig_beta = 0.1;
  sig->add_option("--input", sig_in, "input PLY")->required();
  sig->add_option("--cameras", sig_cams, "camera rig JSON")->required();
  sig->add_option("--out", sig_out, "output scores file (.gssc)")->required();
  sig->add_option("--beta", sig_beta, "volume power");
  sig->add_option("--significance_mode", sig_mode, "literal | blend_weight");
  sig->callback([&]() {
    const auto cloud = sp::load_ply(sig_in);
    const auto rig = sp::load_camera_rig(sig_cams);
    const auto scores = sp::compute_global_significance(
        cloud, rig.train, sig_beta, sp::significance_mode_from(sig_mode));
    sp::save_scores(scores, sig_out);
    std::cout << "wrote " << sig_out << " (" << scores.scores.size() << " scores)\n";
  });

  // ---- prune ----
  auto* pr = app.add_subcommand("prune", "drop the lowest-scored fraction of Gaussians");
  std::string pr_in, pr_scores, pr_out;
  double pr_ratio = 0.66;
  pr->add_option("--input", pr_in, "input PLY")->required();
  pr->add_option("--scores", pr_scores, "scores file (.gssc)")->required();
  pr->add_option("--ratio", pr_ratio, "fraction to remove [0,1)");
  pr->add_option("--out", pr_out, "output PLY")->required();
  pr->callback([&]() {
    const auto cloud = sp::load_ply(pr_in);
    const auto scores = sp::load_scores(pr_scores);
    const auto result = sp::prune(cloud, scores, pr_ratio);
    sp::save_ply(result.cloud, pr_out);
    std::cout << "kept " << result.cloud.count() << " of " << cloud.count() << " Gaussians\n";
  });

  // ---- distill ----
  auto* di = app.add_subcommand("distill", "distill SH to a lower degree");
  std::string di_in, di_cams, di_out;
  int di_degree = 2, di_iters = 500, di_per_view = 1;
  double di_sigma = 0.1;
  std::uint64_t di_seed = 0;
  di->add_option("--input", di_in, "input PLY (teacher)")->required();
  di->add_option("--cameras", di_cams, "camera rig JSON")->required();
  di->add_option("--to_degree", di_degree, "student SH degree");
  di->add_option("--iterations", di_iters, "descent steps");
  di->add_option("--pseudo_sigma", di_sigma, "pseudo-view jitter std-dev");
  di->add_option("--pseudo_per_view", di_per_view, "pseudo views per training view");
  di->add_option("--seed", di_seed, "jitter seed");
  di->add_option("--out", di_out, "output PLY (student)")->required();
  di->callback([&]() {
    const auto teacher = sp::load_ply(di_in);
    const auto rig = sp::load_camera_rig(di_cams);
    sp::PseudoViewConfig pv{di_sigma, di_per_view, di_seed};
    const auto student = sp::distill(teacher, di_degree, rig.train, pv, di_iters);
    sp::save_ply(student, di_out);
    std::cout << "distilled degree " << teacher.sh_degree << " -> " << student.sh_degree
              << ", wrote " << di_out << "\n";
  });

  // ---- quantize ----
  auto* qz = app.add_subcommand("quantize", "vector-quantize SH-rest and emit a container");
  std::string qz_in, qz_cams, qz_scores, qz_out;
  double qz_ratio = 0.6, qz_decay = 0.8;
  std::int64_t qz_k = 8192;
  int qz_iters = 500;
  std::uint64_t qz_seed = 0;
  qz->add_option("--input", qz_in, "input PLY")->required();
  qz->add_option("--cameras", qz_cams, "camera rig JSON")->required();
  qz->add_option("--scores", qz_scores, "scores file (.gssc)")->required();
  qz->add_option("--vq_ratio", qz_ratio, "fraction of Gaussians quantized");
  qz->add_option("--codebook_k", qz_k, "codebook size");
  qz->add_option("--lambda_decay", qz_decay, "moving-average decay");
  qz->add_option("--finetune_iters", qz_iters, "post-VQ fine-tune steps");
  qz->add_option("--seed", qz_seed, "k-means seed");
  qz->add_option("--out", qz_out, "output container (.lgsc)")->required();
  qz->callback([&]() {
    const auto cloud = sp::load_ply(qz_in);
    const auto rig = sp::load_camera_rig(qz_cams);
    const auto scores = sp::load_scores(qz_scores);
    sp::VqBuildParams params;
    params.vq_ratio = qz_ratio;
    params.codebook_k = qz_k;
    params.decay = qz_decay;
    params.seed = qz_seed;
    const auto vq = sp::build_vq(cloud, scores, params);
    const auto views = self_supervised_views(cloud, rig.train);
    auto [tuned, codebook] =
        sp::vq_finetune(cloud, vq.codebook, vq.assignments, views, qz_iters);
    if (codebook.k > 0) {
      sp::materialize_members(tuned, codebook, vq.assignments);
    }
    const auto bytes = sp::encode(tuned, codebook, vq.assignments);
    sp::save_container(bytes, qz_out);
    std::cout << "wrote " << qz_out << " (" << bytes.size() << " bytes, "
              << vq.assignments.member_count() << " members)\n";
  });

  // ---- encode ----
  auto* en = app.add_subcommand("encode", "pack a PLY into an FP16 container (no VQ)");
  std::string en_in, en_out;
  en->add_option("--input", en_in, "input PLY")->required();
  en->add_option("--out", en_out, "output container (.lgsc)")->required();
  en->callback([&]() {
    const auto bytes = sp::encode(sp::load_ply(en_in));
    sp::save_container(bytes, en_out);
    std::cout << "wrote " << en_out << " (" << bytes.size() << " bytes)\n";
  });

  // ---- decode ----
  auto* de = app.add_subcommand("decode", "unpack a container back to PLY");
  std::string de_in, de_out;
  de->add_option("--input", de_in, "input container (.lgsc)")->required();
  de->add_option("--out", de_out, "output PLY")->required();
  de->callback([&]() {
    const auto decoded = sp::load_container(de_in);
    sp::save_ply(decoded.cloud, de_out);
    std::cout << "decoded " << decoded.cloud.count() << " Gaussians to " << de_out << "\n";
  });

  // ---- render ----
  auto* re = app.add_subcommand("render", "render one view to PNG");
  std::string re_in, re_cams, re_out, re_split = "train";
  int re_view = 0;
  re->add_option("--input", re_in, "input PLY or container")->required();
  re->add_option("--cameras", re_cams, "camera rig JSON")->required();
  re->add_option("--split", re_split, "train | test");
  re->add_option("--view", re_view, "view index within the split");
  re->add_option("--out", re_out, "output PNG")->required();
  re->callback([&]() {
    const auto cloud = load_any_cloud(re_in);
    const auto rig = sp::load_camera_rig(re_cams);
    const auto& cams = re_split == "test" ? rig.test : rig.train;
    if (re_view < 0 || std::size_t(re_view) >= cams.size()) {
      throw sp::Error("view index out of range for split '" + re_split + "'");
    }
    sp::save_png(sp::render(cloud, cams[std::size_t(re_view)]).image, re_out);
    std::cout << "wrote " << re_out << "\n";
  });

  // ---- stats ----
  auto* st = app.add_subcommand("stats", "print a JSON summary of a PLY or container");
  std::string st_in;
  st->add_option("--input", st_in, "input PLY or container")->required();
  st->callback([&]() {
    nlohmann::json j;
    j["bytes"] = file_size(st_in);
    if (is_container_file(st_in)) {
      const auto decoded = sp::load_container(st_in);
      j["type"] = "container";
      j["gaussian_count"] = decoded.cloud.count();
      j["sh_degree"] = decoded.cloud.sh_degree;
      j["codebook_k"] = decoded.codebook.k;
      j["vq_member_count"] = decoded.assignments.member_count();
    } else {
      const auto cloud = sp::load_ply(st_in);
      j["type"] = "ply";
      j["gaussian_count"] = cloud.count();
      j["sh_degree"] = cloud.sh_degree;
    }
    std::cout << j.dump(2) << "\n";
  });

  // ---- pipeline ----
  auto* pl = app.add_subcommand("pipeline", "run the full compression pipeline");
  std::string pl_in, pl_cams, pl_out, pl_config;
  sp::PipelineConfig cfg;
  std::string pl_mode;
  pl->add_option("--input", pl_in, "input PLY")->required();
  pl->add_option("--cameras", pl_cams, "camera rig JSON")->required();
  pl->add_option("--out", pl_out, "output container (.lgsc); report at <out>.report.json")
      ->required();
  pl->add_option("--config", pl_config, "TOML config file");
  auto* o_prune = pl->add_option("--prune_ratio", cfg.prune_ratio);
  auto* o_beta = pl->add_option("--beta", cfg.beta);
  auto* o_mode = pl->add_option("--significance_mode", pl_mode, "literal | blend_weight");
  auto* o_deg = pl->add_option("--target_sh_degree", cfg.target_sh_degree);
  auto* o_sigma = pl->add_option("--pseudo_sigma", cfg.pseudo_sigma);
  auto* o_ppv = pl->add_option("--pseudo_per_view", cfg.pseudo_per_view);
  auto* o_di = pl->add_option("--distill_iters", cfg.distill_iters);
  auto* o_ci = pl->add_option("--coadapt_iters", cfg.coadapt_iters);
  auto* o_vr = pl->add_option("--vq_ratio", cfg.vq_ratio);
  auto* o_k = pl->add_option("--codebook_k", cfg.codebook_k);
  auto* o_decay = pl->add_option("--lambda_decay", cfg.lambda_decay);
  auto* o_fi = pl->add_option("--vq_finetune_iters", cfg.vq_finetune_iters);
  auto* o_seed = pl->add_option("--seed", cfg.seed);
  pl->callback([&]() {
    sp::PipelineConfig base;
    if (!pl_config.empty()) {
      base = sp::load_config(pl_config);
    }
    // Explicit flags win over the config file.
    if (!o_prune->count()) cfg.prune_ratio = base.prune_ratio;
    if (!o_beta->count()) cfg.beta = base.beta;
    cfg.significance_mode =
        o_mode->count() ? sp::significance_mode_from(pl_mode) : base.significance_mode;
    if (!o_deg->count()) cfg.target_sh_degree = base.target_sh_degree;
    if (!o_sigma->count()) cfg.pseudo_sigma = base.pseudo_sigma;
    if (!o_ppv->count()) cfg.pseudo_per_view = base.pseudo_per_view;
    if (!o_di->count()) cfg.distill_iters = base.distill_iters;
    if (!o_ci->count()) cfg.coadapt_iters = base.coadapt_iters;
    if (!o_vr->count()) cfg.vq_ratio = base.vq_ratio;
    if (!o_k->count()) cfg.codebook_k = base.codebook_k;
    if (!o_decay->count()) cfg.lambda_decay = base.lambda_decay;
    if (!o_fi->count()) cfg.vq_finetune_iters = base.vq_finetune_iters;
    if (!o_seed->count()) cfg.seed = base.seed;

    const auto cloud = sp::load_ply(pl_in);
    const auto rig = sp::load_camera_rig(pl_cams);
    const auto result = sp::run_pipeline(cloud, rig, cfg);
    sp::save_container(result.container, pl_out);
    std::ofstream rf(pl_out + ".report.json");
    rf << result.report.dump(2) << "\n";
    std::cout << "wrote " << pl_out << " (" << result.container.size() << " bytes) and "
              << pl_out << ".report.json\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    const std::string stage =
        app.get_subcommands().empty() ? "splatpack" : app.get_subcommands().front()->get_name();
    std::cerr << "splatpack " << stage << ": error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
