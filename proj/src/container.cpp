#include "splatpack/container.hpp"

#include <cstring>
#include <fstream>

#include "splatpack/fp16.hpp"
#include "splatpack/sh.hpp"

namespace splatpack {

namespace {

template <typename T>
void append_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(std::uint8_t(v >> (8 * i)));
  }
}

template <typename T>
T read_le(const std::uint8_t* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= T(p[i]) << (8 * i);
  }
  return v;
}

struct PlaneSpec {
  const char* name;
  std::size_t bytes;
};

std::vector<PlaneSpec> plane_layout(std::uint64_t count, std::uint32_t codebook_k,
                                    std::uint32_t codebook_dim, std::uint64_t member_count) {
  const std::uint64_t non_members = count - member_count;
  return {
      {"positions", count * 3 * 2},
      {"sh_dc", count * 3 * 2},
      {"raw_opacity", count * 2},
      {"raw_scale", count * 3 * 2},
      {"rotation", count * 4 * 2},
      {"raw_sh_rest", non_members * codebook_dim * 2},
      {"membership_bitmap", (count + 7) / 8},
      {"code_indices", member_count * 2},
      {"codebook", std::uint64_t(codebook_k) * codebook_dim * 2},
  };
}

}  // namespace

std::size_t container_size(std::uint64_t count, int /*sh_degree*/, std::uint32_t codebook_k,
                           std::uint32_t codebook_dim, std::uint64_t member_count) {
  std::size_t total = kContainerHeaderSize;
  for (const auto& p : plane_layout(count, codebook_k, codebook_dim, member_count)) {
    total += p.bytes;
  }
  return total;
}

std::vector<std::uint8_t> encode(const GaussianCloud& cloud, const Codebook& codebook,
                                 const AssignmentVector& assignments) {
  cloud.validate();
  if (codebook.k > 65536) {
    throw Error("codebook size " + std::to_string(codebook.k) +
                " exceeds the u16 index width (max 65536)");
  }
  if (std::int64_t(assignments.vq_member.size()) != cloud.count()) {
    throw Error("membership length does not match cloud");
  }
  const std::int64_t dim = cloud.sh_rest.cols();
  if (codebook.k > 0 && codebook.dim != dim) {
    throw Error("codebook dimension does not match SH-rest width");
  }
  std::uint64_t member_count = 0;
  for (auto m : assignments.vq_member) member_count += m ? 1 : 0;
  if (member_count != std::uint64_t(assignments.code_index.size())) {
    throw Error("code index count does not match membership");
  }
  for (auto ci : assignments.code_index) {
    if (ci >= std::uint32_t(codebook.k)) {
      throw Error("code index " + std::to_string(ci) + " out of range");
    }
  }

  const std::uint64_t n = std::uint64_t(cloud.count());
  std::vector<std::uint8_t> out;
  out.reserve(container_size(n, cloud.sh_degree, std::uint32_t(codebook.k),
                             std::uint32_t(dim), member_count));
  out.insert(out.end(), {'L', 'G', 'S', 'C'});
  append_le<std::uint16_t>(out, kContainerVersion);
  append_le<std::uint64_t>(out, n);
  out.push_back(std::uint8_t(cloud.sh_degree));
  append_le<std::uint32_t>(out, std::uint32_t(codebook.k));
  append_le<std::uint32_t>(out, std::uint32_t(dim));
  append_le<std::uint64_t>(out, member_count);

  auto put_f16 = [&](double v) { append_le<std::uint16_t>(out, fp16_bits(v)); };

  for (std::int64_t i = 0; i < cloud.count(); ++i)
    for (int c = 0; c < 3; ++c) put_f16(cloud.positions(i, c));
  for (std::int64_t i = 0; i < cloud.count(); ++i)
    for (int c = 0; c < 3; ++c) put_f16(cloud.sh_dc(i, c));
  for (std::int64_t i = 0; i < cloud.count(); ++i) put_f16(cloud.raw_opacity(i));
  for (std::int64_t i = 0; i < cloud.count(); ++i)
    for (int c = 0; c < 3; ++c) put_f16(cloud.raw_scale(i, c));
  for (std::int64_t i = 0; i < cloud.count(); ++i)
    for (int c = 0; c < 4; ++c) put_f16(cloud.rotation(i, c));
  for (std::int64_t i = 0; i < cloud.count(); ++i) {
    if (!assignments.vq_member[std::size_t(i)]) {
      for (std::int64_t c = 0; c < dim; ++c) put_f16(cloud.sh_rest(i, c));
    }
  }
  for (std::int64_t i = 0; i < cloud.count(); i += 8) {
    std::uint8_t byte = 0;
    for (int b = 0; b < 8 && i + b < cloud.count(); ++b) {
      if (assignments.vq_member[std::size_t(i + b)]) {
        byte |= std::uint8_t(1u << b);
      }
    }
    out.push_back(byte);
  }
  for (auto ci : assignments.code_index) {
    append_le<std::uint16_t>(out, std::uint16_t(ci));
  }
  for (std::int64_t c = 0; c < codebook.k; ++c) {
    for (std::int64_t d = 0; d < dim; ++d) put_f16(codebook.vectors(c, d));
  }
  return out;
}

std::vector<std::uint8_t> encode(const GaussianCloud& cloud) {
  Codebook empty;
  empty.k = 0;
  empty.dim = cloud.sh_rest.cols();
  AssignmentVector none;
  none.vq_member.assign(std::size_t(cloud.count()), 0);
  return encode(cloud, empty, none);
}

Decoded decode(const std::uint8_t* data, std::size_t size) {
  if (size < kContainerHeaderSize) {
    throw ParseError("container shorter than its header", size);
  }
  if (std::memcmp(data, "LGSC", 4) != 0) {
    throw ParseError("bad container magic (expected LGSC)", 0);
  }
  const auto version = read_le<std::uint16_t>(data + 4);
  if (version != kContainerVersion) {
    throw ParseError("unsupported container version " + std::to_string(version), 4);
  }
  const auto count = read_le<std::uint64_t>(data + 6);
  const int degree = int(data[14]);
  const auto codebook_k = read_le<std::uint32_t>(data + 15);
  const auto codebook_dim = read_le<std::uint32_t>(data + 19);
  const auto member_count = read_le<std::uint64_t>(data + 23);

  if (degree < 0 || degree > 3) {
    throw ParseError("unsupported SH degree " + std::to_string(degree), 14);
  }
  if (codebook_dim != std::uint32_t(sh::rest_width(degree))) {
    throw ParseError("codebook dimension " + std::to_string(codebook_dim) +
                         " does not match degree " + std::to_string(degree),
                     19);
  }
  if (member_count > count) {
    throw ParseError("member count exceeds Gaussian count", 23);
  }
  if (member_count > 0 && codebook_k == 0) {
    throw ParseError("members present but codebook is empty", 15);
  }

  const auto layout = plane_layout(count, codebook_k, codebook_dim, member_count);
  std::size_t offset = kContainerHeaderSize;
  for (const auto& plane : layout) {
    if (size - offset < plane.bytes) {
      throw ParseError(std::string("unexpected end of container: plane '") + plane.name +
                           "' needs " + std::to_string(plane.bytes) + " bytes",
                       offset);
    }
    offset += plane.bytes;
  }
  if (offset != size) {
    throw ParseError("trailing bytes after the final plane", offset);
  }

  Decoded out;
  out.cloud = GaussianCloud::zeros(std::int64_t(count), degree);
  out.codebook.k = codebook_k;
  out.codebook.dim = codebook_dim;
  out.codebook.vectors = MatXR::Zero(codebook_k, codebook_dim);

  const std::uint8_t* p = data + kContainerHeaderSize;
  auto take_f16 = [&]() {
    const double v = fp16_value(read_le<std::uint16_t>(p));
    p += 2;
    return v;
  };

  for (std::int64_t i = 0; i < out.cloud.count(); ++i)
    for (int c = 0; c < 3; ++c) out.cloud.positions(i, c) = take_f16();
  for (std::int64_t i = 0; i < out.cloud.count(); ++i)
    for (int c = 0; c < 3; ++c) out.cloud.sh_dc(i, c) = take_f16();
  for (std::int64_t i = 0; i < out.cloud.count(); ++i) out.cloud.raw_opacity(i) = take_f16();
  for (std::int64_t i = 0; i < out.cloud.count(); ++i)
    for (int c = 0; c < 3; ++c) out.cloud.raw_scale(i, c) = take_f16();
  for (std::int64_t i = 0; i < out.cloud.count(); ++i)
    for (int c = 0; c < 4; ++c) out.cloud.rotation(i, c) = take_f16();

  const std::uint8_t* raw_rest = p;
  p += (count - member_count) * codebook_dim * 2;

  out.assignments.vq_member.assign(std::size_t(count), 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    out.assignments.vq_member[std::size_t(i)] = (p[i / 8] >> (i % 8)) & 1u;
  }
  p += (count + 7) / 8;

  out.assignments.code_index.resize(std::size_t(member_count));
  for (std::uint64_t i = 0; i < member_count; ++i) {
    const auto ci = read_le<std::uint16_t>(p);
    p += 2;
    if (ci >= codebook_k) {
      throw ParseError("code index " + std::to_string(ci) + " out of range", std::size_t(p - data) - 2);
    }
    out.assignments.code_index[std::size_t(i)] = ci;
  }

  for (std::uint32_t c = 0; c < codebook_k; ++c) {
    for (std::uint32_t d = 0; d < codebook_dim; ++d) {
      out.codebook.vectors(c, d) = fp16_value(read_le<std::uint16_t>(p));
      p += 2;
    }
  }

  // Materialize SH-rest: non-members from the raw plane, members from codes.
  std::uint64_t member_seen = 0;
  std::uint64_t raw_seen = 0;
  std::uint64_t declared_members = 0;
  for (auto m : out.assignments.vq_member) declared_members += m ? 1 : 0;
  if (declared_members != member_count) {
    throw ParseError("membership bitmap disagrees with the declared member count",
                     kContainerHeaderSize);
  }
  for (std::int64_t i = 0; i < out.cloud.count(); ++i) {
    if (out.assignments.vq_member[std::size_t(i)]) {
      out.cloud.sh_rest.row(i) =
          out.codebook.vectors.row(out.assignments.code_index[std::size_t(member_seen)]);
      ++member_seen;
    } else {
      const std::uint8_t* q = raw_rest + raw_seen * codebook_dim * 2;
      for (std::uint32_t d = 0; d < codebook_dim; ++d) {
        out.cloud.sh_rest(i, d) = fp16_value(read_le<std::uint16_t>(q + 2 * d));
      }
      ++raw_seen;
    }
  }
  return out;
}

Decoded decode(const std::vector<std::uint8_t>& bytes) {
  return decode(bytes.data(), bytes.size());
}

Decoded load_container(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot open " + path);
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode(bytes);
}

void save_container(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot write " + path);
  }
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

}  // namespace splatpack
