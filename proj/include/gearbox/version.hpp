#pragma once

namespace gearbox {

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace gearbox
