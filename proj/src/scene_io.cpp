#include "gearbox/scene_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace gearbox {

using nlohmann::json;

std::string scene_to_json(const SceneFile& file) {
  json j;
  j["seed"] = file.seed;
  j["workspace"] = {{"w", file.scene.workspace.width_mm},
                    {"h", file.scene.workspace.height_mm}};
  json parts = json::array();
  for (const auto& p : file.scene.parts) {
    parts.push_back({{"class", to_string(p.cls)},
                     {"x_mm", p.pose.x},
                     {"y_mm", p.pose.y},
                     {"yaw_rad", p.pose.yaw}});
  }
  j["parts"] = parts;
  return j.dump(2) + "\n";
}

SceneFile scene_from_json(const std::string& text) {
  const json j = json::parse(text);
  SceneFile file;
  file.seed = j.at("seed").get<uint64_t>();
  file.scene.workspace.width_mm = j.at("workspace").at("w").get<double>();
  file.scene.workspace.height_mm = j.at("workspace").at("h").get<double>();
  for (const auto& p : j.at("parts")) {
    const auto cls = part_class_from_string(p.at("class").get<std::string>());
    if (!cls) {
      throw std::runtime_error("unknown part class in scene file: " +
                               p.at("class").get<std::string>());
    }
    file.scene.parts.push_back(
        {*cls, Pose2D{p.at("x_mm").get<double>(), p.at("y_mm").get<double>(),
                      p.at("yaw_rad").get<double>()}});
  }
  return file;
}

void save_scene(const SceneFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open scene file for write: " + path);
  out << scene_to_json(file);
}

SceneFile load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return scene_from_json(text);
}

}  // namespace gearbox
