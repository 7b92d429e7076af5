#include "gearbox/core.hpp"

#include <sstream>

namespace gearbox {

std::string to_string(PartClass cls) {
  switch (cls) {
    case PartClass::Peg1: return "peg1";
    case PartClass::Peg2: return "peg2";
    case PartClass::GearLarge: return "gear_large";
    case PartClass::GearSmall: return "gear_small";
  }
  return "unknown";
}

std::optional<PartClass> part_class_from_string(const std::string& name) {
  for (PartClass cls : kAllParts) {
    if (to_string(cls) == name) return cls;
  }
  return std::nullopt;
}

namespace {

// Hole diameter 15 mm, insertion tolerance ~1 mm. Pegs are identical.
// Gear pitch radii sum to the 70 mm hole spacing; footprints circumscribe
// the tooth tips (pitch + 2 mm). A lying peg's footprint is length/2.
constexpr double kPegDiameter = 14.0;
constexpr double kPegLength = 60.0;
constexpr double kGearBore = 15.0;
constexpr double kGearThickness = 12.0;

const PartGeometry kPegGeometry = {
    kPegLength / 2.0, kPegDiameter, kPegLength, 0.0, 0.0, 0, 0.0,
    kPegDiameter};

const PartGeometry kGearLargeGeometry = {
    47.0, 0.0, 0.0, kGearBore, 45.0, 45, 2.0 * kPi / 45.0, kGearThickness};

const PartGeometry kGearSmallGeometry = {
    27.0, 0.0, 0.0, kGearBore, 25.0, 25, 2.0 * kPi / 25.0, kGearThickness};

}  // namespace

const PartGeometry& part_geometry(PartClass cls) {
  switch (cls) {
    case PartClass::Peg1:
    case PartClass::Peg2: return kPegGeometry;
    case PartClass::GearLarge: return kGearLargeGeometry;
    case PartClass::GearSmall: return kGearSmallGeometry;
  }
  return kPegGeometry;
}

double normalize_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

double fold_half_pi(double a) {
  a = std::fmod(a, kPi);
  if (a <= -kPi / 2.0) a += kPi;
  if (a > kPi / 2.0) a -= kPi;
  return a;
}

Vec2 transform_point(const Pose2D& pose, const Vec2& local_point) {
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  return {pose.x + c * local_point.x - s * local_point.y,
          pose.y + s * local_point.x + c * local_point.y};
}

Pose2D inverse(const Pose2D& pose) {
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  return Pose2D{-(c * pose.x + s * pose.y), -(-s * pose.x + c * pose.y),
                -pose.yaw}
      .normalized();
}

Pose2D compose(const Pose2D& a, const Pose2D& b) {
  const Vec2 t = transform_point(a, {b.x, b.y});
  return Pose2D{t.x, t.y, a.yaw + b.yaw}.normalized();
}

const PlacedPart* Scene::find(PartClass cls) const {
  for (const auto& p : parts) {
    if (p.cls == cls) return &p;
  }
  return nullptr;
}

PlacedPart* Scene::find(PartClass cls) {
  for (auto& p : parts) {
    if (p.cls == cls) return &p;
  }
  return nullptr;
}

bool Scene::remove(PartClass cls) {
  for (auto it = parts.begin(); it != parts.end(); ++it) {
    if (it->cls == cls) {
      parts.erase(it);
      return true;
    }
  }
  return false;
}

std::string SceneError::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Overlap:
      os << "overlap between " << to_string(a) << " and " << to_string(b);
      break;
    case Kind::OutOfBounds:
      os << to_string(a) << " center out of workspace bounds";
      break;
    case Kind::MissingPart:
      os << "missing part " << to_string(a);
      break;
    case Kind::DuplicatePart:
      os << "duplicate part " << to_string(a);
      break;
  }
  return os.str();
}

double pair_clearance(const PlacedPart& a, const PlacedPart& b) {
  const double d = (a.pose.translation() - b.pose.translation()).norm();
  return d - part_geometry(a.cls).footprint_radius_mm -
         part_geometry(b.cls).footprint_radius_mm;
}

std::optional<SceneError> validate_scene(const Scene& scene) {
  for (PartClass cls : kAllParts) {
    int count = 0;
    for (const auto& p : scene.parts) {
      if (p.cls == cls) ++count;
    }
    if (count == 0) {
      return SceneError{SceneError::Kind::MissingPart, cls, cls};
    }
    if (count > 1) {
      return SceneError{SceneError::Kind::DuplicatePart, cls, cls};
    }
  }
  for (const auto& p : scene.parts) {
    const Vec2 c = p.pose.translation();
    if (!std::isfinite(c.x) || !std::isfinite(c.y) ||
        !scene.workspace.contains(c)) {
      return SceneError{SceneError::Kind::OutOfBounds, p.cls, p.cls};
    }
  }
  for (std::size_t i = 0; i < scene.parts.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.parts.size(); ++j) {
      if (pair_clearance(scene.parts[i], scene.parts[j]) <
          -kContactEpsilonMm) {
        return SceneError{SceneError::Kind::Overlap, scene.parts[i].cls,
                          scene.parts[j].cls};
      }
    }
  }
  return std::nullopt;
}

double radial_clearance_mm() {
  const WorkspaceConfig ws;
  return (ws.hole_diameter_mm - part_geometry(PartClass::Peg1).peg_diameter_mm) /
         2.0;
}

}  // namespace gearbox
