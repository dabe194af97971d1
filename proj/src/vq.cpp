#include "splatpack/vq.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_map>

#include "splatpack/optim.hpp"
#include "splatpack/photometric.hpp"
#include "splatpack/rng.hpp"

namespace splatpack {

namespace {

// Exact-content key for deduplicating rows.
struct RowKey {
  const double* data;
  std::int64_t dim;
  bool operator==(const RowKey& o) const {
    return std::memcmp(data, o.data, std::size_t(dim) * sizeof(double)) == 0;
  }
};
struct RowKeyHash {
  std::size_t operator()(const RowKey& k) const {
    std::size_t h = 1469598103934665603ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(k.data);
    for (std::int64_t i = 0; i < k.dim * std::int64_t(sizeof(double)); ++i) {
      h = (h ^ bytes[i]) * 1099511628211ULL;
    }
    return h;
  }
};

std::vector<std::uint32_t> assign_rows(const MatXR& vectors, const MatXR& codes) {
  const std::int64_t n = vectors.rows();
  const std::int64_t k = codes.rows();
  std::vector<std::uint32_t> out(std::size_t(n), 0);
  if (n == 0) {
    return out;
  }
  const VecX code_sqnorm = codes.rowwise().squaredNorm();
  constexpr std::int64_t kBlock = 1024;
  Eigen::MatrixXd dist;  // block x k
  for (std::int64_t start = 0; start < n; start += kBlock) {
    const std::int64_t len = std::min(kBlock, n - start);
    dist.noalias() = vectors.middleRows(start, len) * codes.transpose() * -2.0;
    dist.rowwise() += code_sqnorm.transpose();
    for (std::int64_t r = 0; r < len; ++r) {
      std::int64_t best = 0;
      double best_d = dist(r, 0);
      for (std::int64_t c = 1; c < k; ++c) {
        if (dist(r, c) < best_d) {
          best_d = dist(r, c);
          best = c;
        }
      }
      out[std::size_t(start + r)] = std::uint32_t(best);
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> select_vq_set(const SignificanceVector& scores, double vq_ratio) {
  if (vq_ratio < 0.0 || vq_ratio > 1.0) {
    throw Error("vq ratio must lie in [0, 1]");
  }
  const std::int64_t n = scores.scores.size();
  const std::int64_t members = std::int64_t(vq_ratio * double(n));

  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    if (scores.scores(a) != scores.scores(b)) {
      return scores.scores(a) < scores.scores(b);
    }
    return a < b;
  });

  std::vector<std::uint8_t> member(std::size_t(n), 0);
  for (std::int64_t i = 0; i < members; ++i) {
    member[std::size_t(order[i])] = 1;
  }
  return member;
}

Codebook kmeans_init(const MatXR& vectors, std::int64_t k, std::uint64_t seed) {
  const std::int64_t n = vectors.rows();
  if (n == 0) {
    throw Error("k-means needs at least one vector");
  }
  if (k < 1) {
    throw Error("codebook size must be at least 1");
  }
  const std::int64_t dim = vectors.cols();
  Codebook cb;
  cb.k = k;
  cb.dim = dim;
  cb.vectors = MatXR::Zero(k, dim);

  // Distinct-row census, first occurrence order.
  std::unordered_map<RowKey, std::int64_t, RowKeyHash> distinct;
  std::vector<std::int64_t> distinct_rows;
  for (std::int64_t i = 0; i < n; ++i) {
    const RowKey key{vectors.row(i).data(), dim};
    if (distinct.emplace(key, std::int64_t(distinct_rows.size())).second) {
      distinct_rows.push_back(i);
    }
  }
  if (std::int64_t(distinct_rows.size()) <= k) {
    for (std::size_t i = 0; i < distinct_rows.size(); ++i) {
      cb.vectors.row(std::int64_t(i)) = vectors.row(distinct_rows[i]);
    }
    return cb;
  }

  // k-means++ seeding.
  Rng rng(seed);
  MatXR centers(k, dim);
  centers.row(0) = vectors.row(std::int64_t(rng.uniform_index(std::uint64_t(n))));
  VecX d2 = (vectors.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (std::int64_t c = 1; c < k; ++c) {
    const double total = d2.sum();
    double target = rng.uniform() * total;
    std::int64_t pick = n - 1;
    for (std::int64_t i = 0; i < n; ++i) {
      target -= d2(i);
      if (target <= 0.0) {
        pick = i;
        break;
      }
    }
    centers.row(c) = vectors.row(pick);
    d2 = d2.cwiseMin((vectors.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  // Lloyd refinement.
  std::vector<std::uint32_t> labels;
  for (int iter = 0; iter < 25; ++iter) {
    std::vector<std::uint32_t> next = assign_rows(vectors, centers);
    if (next == labels) {
      break;
    }
    labels = std::move(next);
    MatXR sums = MatXR::Zero(k, dim);
    VecX counts = VecX::Zero(k);
    for (std::int64_t i = 0; i < n; ++i) {
      sums.row(labels[std::size_t(i)]) += vectors.row(i);
      counts(labels[std::size_t(i)]) += 1.0;
    }
    for (std::int64_t c = 0; c < k; ++c) {
      if (counts(c) > 0.0) {
        centers.row(c) = sums.row(c) / counts(c);
      }
    }
  }
  cb.vectors = centers;
  return cb;
}

std::vector<std::uint32_t> assign(const MatXR& vectors, const Codebook& codebook) {
  if (vectors.cols() != codebook.dim) {
    throw Error("vector dimension does not match codebook");
  }
  if (codebook.k < 1) {
    throw Error("cannot assign against an empty codebook");
  }
  return assign_rows(vectors, codebook.vectors);
}

Codebook update_codebook(const Codebook& codebook, const MatXR& vectors,
                         const std::vector<std::uint32_t>& indices, const VecX& scores,
                         const std::vector<std::int64_t>& batch) {
  if (vectors.cols() != codebook.dim) {
    throw Error("vector dimension does not match codebook");
  }
  if (std::int64_t(indices.size()) != vectors.rows() || scores.size() != vectors.rows()) {
    throw Error("indices and scores must align with vectors");
  }
  Codebook out = codebook;
  MatXR weighted = MatXR::Zero(codebook.k, codebook.dim);
  VecX weight_total = VecX::Zero(codebook.k);
  std::vector<std::uint8_t> touched(std::size_t(codebook.k), 0);
  for (const std::int64_t row : batch) {
    const std::uint32_t code = indices[std::size_t(row)];
    if (code >= std::uint32_t(codebook.k)) {
      throw Error("code index out of range");
    }
    weighted.row(code) += scores(row) * vectors.row(row);
    weight_total(code) += scores(row);
    touched[code] = 1;
  }
  for (std::int64_t c = 0; c < codebook.k; ++c) {
    if (!touched[std::size_t(c)] || weight_total(c) == 0.0) {
      continue;  // untouched codes and zero-weight batches leave the code as-is
    }
    out.vectors.row(c) = codebook.decay * codebook.vectors.row(c) +
                         (1.0 - codebook.decay) * (weighted.row(c) / weight_total(c));
  }
  return out;
}

VqResult build_vq(const GaussianCloud& cloud, const SignificanceVector& scores,
                  const VqBuildParams& params) {
  if (scores.scores.size() != cloud.count()) {
    throw Error("score vector length does not match cloud");
  }
  VqResult res;
  res.assignments.vq_member = select_vq_set(scores, params.vq_ratio);

  std::vector<std::int64_t> member_rows;
  for (std::int64_t i = 0; i < cloud.count(); ++i) {
    if (res.assignments.vq_member[std::size_t(i)]) {
      member_rows.push_back(i);
    }
  }
  res.codebook.k = 0;
  res.codebook.dim = cloud.sh_rest.cols();
  res.codebook.decay = params.decay;
  if (member_rows.empty()) {
    return res;
  }

  const std::int64_t m = std::int64_t(member_rows.size());
  MatXR member_vectors(m, cloud.sh_rest.cols());
  VecX member_scores(m);
  for (std::int64_t j = 0; j < m; ++j) {
    member_vectors.row(j) = cloud.sh_rest.row(member_rows[j]);
    member_scores(j) = scores.scores(member_rows[j]);
  }

  res.codebook = kmeans_init(member_vectors, params.codebook_k, params.seed);
  res.codebook.decay = params.decay;

  // Batched moving-average refinement in fixed member order.
  std::vector<std::uint32_t> indices(std::size_t(m), 0);
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (std::int64_t start = 0; start < m; start += params.batch_size) {
      const std::int64_t len = std::min(params.batch_size, m - start);
      const MatXR block = member_vectors.middleRows(start, len);
      const std::vector<std::uint32_t> block_idx = assign(block, res.codebook);
      std::vector<std::int64_t> batch(std::size_t(len), 0);
      for (std::int64_t j = 0; j < len; ++j) {
        batch[std::size_t(j)] = start + j;
        indices[std::size_t(start + j)] = block_idx[std::size_t(j)];
      }
      res.codebook = update_codebook(res.codebook, member_vectors, indices, member_scores, batch);
    }
  }

  res.assignments.code_index = assign(member_vectors, res.codebook);
  return res;
}

void materialize_members(GaussianCloud& cloud, const Codebook& codebook,
                         const AssignmentVector& assignments) {
  std::size_t slot = 0;
  for (std::int64_t i = 0; i < cloud.count(); ++i) {
    if (assignments.vq_member[std::size_t(i)]) {
      cloud.sh_rest.row(i) = codebook.vectors.row(assignments.code_index[slot]);
      ++slot;
    }
  }
}

std::pair<GaussianCloud, Codebook> vq_finetune(const GaussianCloud& cloud,
                                               const Codebook& codebook,
                                               const AssignmentVector& assignments,
                                               const std::vector<View>& views, int iterations,
                                               double step_size, const RenderOptions& opts) {
  if (views.empty()) {
    throw Error("VQ fine-tune needs at least one view");
  }
  if (std::int64_t(assignments.vq_member.size()) != cloud.count()) {
    throw Error("assignment length does not match cloud");
  }
  if (iterations <= 0) {
    return {cloud, codebook};
  }

  GaussianCloud out = cloud;
  Codebook cb = codebook;

  std::vector<std::int64_t> member_rows;
  for (std::int64_t i = 0; i < out.count(); ++i) {
    if (assignments.vq_member[std::size_t(i)]) {
      member_rows.push_back(i);
    }
  }
  const bool has_codes = cb.k > 0 && !member_rows.empty();

  auto materialize = [&]() {
    if (has_codes) {
      materialize_members(out, cb, assignments);
    }
  };
  materialize();

  std::vector<ParamPlane> planes = {
      {out.sh_dc.data(), out.sh_dc.size(), kLrShDc * step_size},
      {out.sh_rest.data(), out.sh_rest.size(), kLrShRest * step_size},
      {out.raw_opacity.data(), out.raw_opacity.size(), kLrOpacity * step_size},
  };
  if (has_codes) {
    planes.push_back({cb.vectors.data(), cb.vectors.size(), kLrShRest * step_size});
  }
  AdamOptimizer opt(std::move(planes));

  MatXR code_grad;
  auto do_step = [&](int view_index, double lr_scale) {
    materialize();
    const View& v = views[view_index];
    const RenderOutput r = render(out, v.camera, opts);
    const LossResult loss = photometric_loss(r.image, v.image);
    AppearanceGradients g = render_backward(out, v.camera, loss.grad, opts);
    if (has_codes) {
      // Member SH-rest reads through the code vector: route those gradients
      // into the codebook, accumulated in ascending member order.
      code_grad = MatXR::Zero(cb.k, cb.dim);
      for (std::size_t j = 0; j < member_rows.size(); ++j) {
        code_grad.row(assignments.code_index[j]) += g.sh_rest.row(member_rows[j]);
        g.sh_rest.row(member_rows[j]).setZero();
      }
      opt.step({g.sh_dc.data(), g.sh_rest.data(), g.raw_opacity.data(), code_grad.data()},
               lr_scale);
    } else {
      opt.step({g.sh_dc.data(), g.sh_rest.data(), g.raw_opacity.data()}, lr_scale);
    }
  };
  auto eval_mean = [&]() {
    materialize();
    double total = 0.0;
    for (const View& v : views) {
      total += photometric_loss(render(out, v.camera, opts).image, v.image).value;
    }
    return total / double(views.size());
  };

  descend_with_backoff(opt, iterations, int(views.size()), do_step, eval_mean);
  materialize();
  return {out, cb};
}

}  // namespace splatpack
