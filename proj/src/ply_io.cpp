#include "splatpack/ply_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "splatpack/sh.hpp"

namespace splatpack {

namespace {

int degree_from_rest_count(std::size_t rest_count) {
  for (int d = 0; d <= 3; ++d) {
    if (rest_count == std::size_t(sh::rest_width(d))) {
      return d;
    }
  }
  throw Error("f_rest property count " + std::to_string(rest_count) +
              " does not match any SH degree");
}

std::vector<std::string> canonical_properties(int degree) {
  std::vector<std::string> names = {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"};
  for (int i = 0; i < sh::rest_width(degree); ++i) {
    names.push_back("f_rest_" + std::to_string(i));
  }
  names.push_back("opacity");
  for (int i = 0; i < 3; ++i) names.push_back("scale_" + std::to_string(i));
  for (int i = 0; i < 4; ++i) names.push_back("rot_" + std::to_string(i));
  return names;
}

float read_f32(const std::uint8_t* p) {
  float v;
  std::memcpy(&v, p, 4);
  return v;
}

void append_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint8_t b[4];
  std::memcpy(b, &v, 4);
  out.insert(out.end(), b, b + 4);
}

}  // namespace

GaussianCloud read_ply(const std::uint8_t* data, std::size_t size) {
  // Header parse, tracking the offset of each line for error reports.
  std::size_t pos = 0;
  auto next_line = [&](std::size_t& line_start) -> std::string {
    line_start = pos;
    std::size_t end = pos;
    while (end < size && data[end] != '\n') ++end;
    if (end >= size) {
      throw ParseError("unexpected end of header", pos);
    }
    std::string line(reinterpret_cast<const char*>(data + pos), end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = end + 1;
    return line;
  };

  std::size_t at = 0;
  if (next_line(at) != "ply") {
    throw ParseError("missing 'ply' magic", at);
  }
  if (next_line(at) != "format binary_little_endian 1.0") {
    throw ParseError("unsupported format (expected binary_little_endian 1.0)", at);
  }

  std::int64_t vertex_count = -1;
  std::vector<std::string> properties;
  bool in_vertex_element = false;
  while (true) {
    std::string line = next_line(at);
    if (line == "end_header") {
      break;
    }
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "comment") {
      continue;
    }
    if (tok == "element") {
      std::string name;
      std::int64_t count = -1;
      ss >> name >> count;
      if (name != "vertex" || count < 0 || vertex_count >= 0) {
        throw ParseError("expected a single 'element vertex <count>'", at);
      }
      vertex_count = count;
      in_vertex_element = true;
      continue;
    }
    if (tok == "property") {
      std::string type, name;
      ss >> type >> name;
      if (!in_vertex_element || type != "float" || name.empty()) {
        throw ParseError("only 'property float <name>' under the vertex element is supported",
                         at);
      }
      properties.push_back(name);
      continue;
    }
    throw ParseError("unrecognized header line '" + line + "'", at);
  }
  if (vertex_count < 0) {
    throw ParseError("header declares no vertex element", at);
  }
  if (properties.size() < 17) {
    throw Error("vertex element lists " + std::to_string(properties.size()) +
                " properties, fewer than the minimal layout");
  }

  const int degree = degree_from_rest_count(properties.size() - 17);
  const auto expected = canonical_properties(degree);
  if (properties != expected) {
    for (std::size_t i = 0; i < std::min(properties.size(), expected.size()); ++i) {
      if (properties[i] != expected[i]) {
        throw Error("unexpected property '" + properties[i] + "' at position " +
                    std::to_string(i) + " (expected '" + expected[i] + "')");
      }
    }
    throw Error("property list does not match the canonical layout");
  }

  const std::size_t stride = properties.size() * 4;
  if (size - pos < std::size_t(vertex_count) * stride) {
    throw ParseError("unexpected end of file: body holds " + std::to_string(size - pos) +
                         " bytes, need " + std::to_string(std::size_t(vertex_count) * stride),
                     size);
  }

  GaussianCloud cloud = GaussianCloud::zeros(vertex_count, degree);
  const int rest_per_channel = sh::rest_coeff_count(degree);
  const std::uint8_t* row = data + pos;
  for (std::int64_t i = 0; i < vertex_count; ++i, row += stride) {
    const std::uint8_t* p = row;
    for (int c = 0; c < 3; ++c) cloud.positions(i, c) = read_f32(p + 4 * c);
    p += 24;  // positions + discarded normals
    for (int c = 0; c < 3; ++c) cloud.sh_dc(i, c) = read_f32(p + 4 * c);
    p += 12;
    for (int ch = 0; ch < 3; ++ch) {
      for (int k = 0; k < rest_per_channel; ++k) {
        cloud.sh_rest(i, 3 * k + ch) = read_f32(p);
        p += 4;
      }
    }
    cloud.raw_opacity(i) = read_f32(p);
    p += 4;
    for (int c = 0; c < 3; ++c) cloud.raw_scale(i, c) = read_f32(p + 4 * c);
    p += 12;
    for (int c = 0; c < 4; ++c) cloud.rotation(i, c) = read_f32(p + 4 * c);
  }
  return cloud;
}

GaussianCloud read_ply(const std::vector<std::uint8_t>& bytes) {
  return read_ply(bytes.data(), bytes.size());
}

GaussianCloud load_ply(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot open " + path);
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return read_ply(bytes);
}

std::vector<std::uint8_t> write_ply(const GaussianCloud& cloud) {
  cloud.validate();
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.count() << "\n";
  for (const auto& name : canonical_properties(cloud.sh_degree)) {
    header << "property float " << name << "\n";
  }
  header << "end_header\n";

  const std::string h = header.str();
  std::vector<std::uint8_t> out(h.begin(), h.end());
  const int rest_per_channel = sh::rest_coeff_count(cloud.sh_degree);
  out.reserve(out.size() + std::size_t(cloud.count()) * (17 + 3 * rest_per_channel) * 4);
  for (std::int64_t i = 0; i < cloud.count(); ++i) {
    for (int c = 0; c < 3; ++c) append_f32(out, float(cloud.positions(i, c)));
    for (int c = 0; c < 3; ++c) append_f32(out, 0.0f);  // normals
    for (int c = 0; c < 3; ++c) append_f32(out, float(cloud.sh_dc(i, c)));
    for (int ch = 0; ch < 3; ++ch) {
      for (int k = 0; k < rest_per_channel; ++k) {
        append_f32(out, float(cloud.sh_rest(i, 3 * k + ch)));
      }
    }
    append_f32(out, float(cloud.raw_opacity(i)));
    for (int c = 0; c < 3; ++c) append_f32(out, float(cloud.raw_scale(i, c)));
    for (int c = 0; c < 4; ++c) append_f32(out, float(cloud.rotation(i, c)));
  }
  return out;
}

void save_ply(const GaussianCloud& cloud, const std::string& path) {
  const auto bytes = write_ply(cloud);
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot write " + path);
  }
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

}  // namespace splatpack
