#include "splatpack/camera_rig.hpp"

#include <fstream>

#include <json.hpp>

namespace splatpack {

namespace {

using nlohmann::json;

json camera_to_json(const Camera& cam) {
  json j;
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["cx"] = cam.cx;
  j["cy"] = cam.cy;
  j["width"] = cam.width;
  j["height"] = cam.height;
  json r = json::array();
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) r.push_back(cam.rotation(row, col));
  }
  j["R"] = std::move(r);
  j["t"] = {cam.translation.x(), cam.translation.y(), cam.translation.z()};
  return j;
}

Camera camera_from_json(const json& j) {
  Camera cam;
  cam.fx = j.at("fx").get<double>();
  cam.fy = j.at("fy").get<double>();
  cam.cx = j.at("cx").get<double>();
  cam.cy = j.at("cy").get<double>();
  cam.width = j.at("width").get<int>();
  cam.height = j.at("height").get<int>();
  const auto& r = j.at("R");
  if (r.size() != 9) {
    throw Error("camera R must hold 9 row-major values");
  }
  for (int i = 0; i < 9; ++i) cam.rotation(i / 3, i % 3) = r[i].get<double>();
  const auto& t = j.at("t");
  if (t.size() != 3) {
    throw Error("camera t must hold 3 values");
  }
  for (int i = 0; i < 3; ++i) cam.translation[i] = t[i].get<double>();
  cam.validate();
  return cam;
}

}  // namespace

CameraRig load_camera_rig(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw Error("cannot open " + path);
  }
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw Error("camera rig parse failure: " + std::string(e.what()));
  }
  CameraRig rig;
  for (const auto& v : j.at("train")) rig.train.push_back(camera_from_json(v));
  for (const auto& v : j.at("test")) rig.test.push_back(camera_from_json(v));
  return rig;
}

void save_camera_rig(const CameraRig& rig, const std::string& path) {
  nlohmann::json j;
  j["train"] = nlohmann::json::array();
  j["test"] = nlohmann::json::array();
  for (const auto& cam : rig.train) j["train"].push_back(camera_to_json(cam));
  for (const auto& cam : rig.test) j["test"].push_back(camera_to_json(cam));
  std::ofstream f(path);
  if (!f) {
    throw Error("cannot write " + path);
  }
  f << j.dump(2) << "\n";
}

}  // namespace splatpack
