// Scene file format: JSON document with fields
//   {seed, workspace{w, h}, parts[{class, x_mm, y_mm, yaw_rad}]}
// Round-trips losslessly (shortest round-trip double printing).
#pragma once

#include <iosfwd>
#include <string>

#include "gearbox/core.hpp"

namespace gearbox {

struct SceneFile {
  uint64_t seed = 0;
  Scene scene;
};

std::string scene_to_json(const SceneFile& file);
SceneFile scene_from_json(const std::string& text);

void save_scene(const SceneFile& file, const std::string& path);
SceneFile load_scene(const std::string& path);

}  // namespace gearbox
