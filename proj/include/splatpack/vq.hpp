#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "splatpack/camera.hpp"
#include "splatpack/gaussian_cloud.hpp"
#include "splatpack/renderer.hpp"
#include "splatpack/significance.hpp"

namespace splatpack {

struct Codebook {
  std::int64_t k = 0;    // number of codes
  std::int64_t dim = 0;  // SH-rest width
  MatXR vectors;         // k x dim
  double decay = 0.8;    // moving-average decay
};

struct AssignmentVector {
  std::vector<std::uint8_t> vq_member;     // per Gaussian: in the quantized subset?
  std::vector<std::uint32_t> code_index;   // one per member, ascending member order

  std::int64_t member_count() const { return std::int64_t(code_index.size()); }
};

/// Marks exactly floor(vq_ratio*N) Gaussians with the lowest scores (ties by
/// index, ascending) as quantization members.
std::vector<std::uint8_t> select_vq_set(const SignificanceVector& scores, double vq_ratio);

/// k-means++ seeding plus at most 25 Lloyd iterations under Euclidean distance.
/// When there are no more distinct vectors than codes, every distinct vector
/// gets its own centroid (remaining codes zero) and quantization is exact.
Codebook kmeans_init(const MatXR& vectors, std::int64_t k, std::uint64_t seed);

/// Nearest code per vector; ties resolve to the lowest code index.
std::vector<std::uint32_t> assign(const MatXR& vectors, const Codebook& codebook);

/// Significance-weighted moving-average update over one batch:
/// c_k <- decay*c_k + (1-decay) * sum(GS_j*g_j)/sum(GS_j) over the batch members
/// assigned to code k. Codes with no assignment (or zero total weight) stay.
Codebook update_codebook(const Codebook& codebook, const MatXR& vectors,
                         const std::vector<std::uint32_t>& indices, const VecX& scores,
                         const std::vector<std::int64_t>& batch);

struct VqBuildParams {
  double vq_ratio = 0.6;
  std::int64_t codebook_k = 8192;
  double decay = 0.8;
  std::uint64_t seed = 0;
  int epochs = 5;
  std::int64_t batch_size = 4096;
};

struct VqResult {
  Codebook codebook;
  AssignmentVector assignments;
};

/// Full quantization pass: membership by significance, k-means init, then
/// epochs of batched weighted moving-average refinement, then final assignment.
VqResult build_vq(const GaussianCloud& cloud, const SignificanceVector& scores,
                  const VqBuildParams& params);

/// Joint fine-tune with frozen assignments: members read SH-rest through their
/// code (gradients accumulate over the sharers), everything else trains
/// directly. Returns the adapted cloud (members materialized) and codebook.
std::pair<GaussianCloud, Codebook> vq_finetune(const GaussianCloud& cloud,
                                               const Codebook& codebook,
                                               const AssignmentVector& assignments,
                                               const std::vector<View>& views, int iterations,
                                               double step_size = 1.0,
                                               const RenderOptions& opts = {});

/// Rewrites member SH-rest rows from their assigned codes.
void materialize_members(GaussianCloud& cloud, const Codebook& codebook,
                         const AssignmentVector& assignments);

}  // namespace splatpack
