// Core geometric and configuration types for the gearbox assembly suite.
// Units: lengths in millimeters, angles in radians, time in seconds.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gearbox {

inline constexpr double kPi = 3.14159265358979323846;

// Tangency counts as contact, not overlap; distances within this epsilon
// of the touching configuration are still valid.
inline constexpr double kContactEpsilonMm = 1e-6;

// ---------------------------------------------------------------------------
// Parts

enum class PartClass { Peg1, Peg2, GearLarge, GearSmall };

inline constexpr std::array<PartClass, 4> kAllParts = {
    PartClass::Peg1, PartClass::Peg2, PartClass::GearLarge,
    PartClass::GearSmall};

std::string to_string(PartClass cls);
std::optional<PartClass> part_class_from_string(const std::string& name);

inline bool is_peg(PartClass cls) {
  return cls == PartClass::Peg1 || cls == PartClass::Peg2;
}
inline bool is_gear(PartClass cls) { return !is_peg(cls); }

// Dimensions of one assembly part. Pegs leave the gear fields zero and
// vice versa. Footprint radius is the circumscribed disc of the part
// lying flat on the table (pegs lie on their side).
struct PartGeometry {
  double footprint_radius_mm = 0.0;
  double peg_diameter_mm = 0.0;
  double peg_length_mm = 0.0;
  double gear_bore_diameter_mm = 0.0;
  double gear_pitch_radius_mm = 0.0;
  int tooth_count = 0;
  double tooth_pitch_angle_rad = 0.0;
  double top_height_mm = 0.0;  // height of the visible top surface
};

const PartGeometry& part_geometry(PartClass cls);

// ---------------------------------------------------------------------------
// Poses and planar points

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

// Normalize an angle to (-pi, pi].
double normalize_angle(double a);

// Fold an angle to (-pi/2, pi/2] (modulo-pi identification, used for
// parts with a 180-degree symmetry).
double fold_half_pi(double a);

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  Vec2 translation() const { return {x, y}; }
  Pose2D normalized() const { return {x, y, normalize_angle(yaw)}; }
};

Vec2 transform_point(const Pose2D& pose, const Vec2& local_point);
Pose2D inverse(const Pose2D& pose);
Pose2D compose(const Pose2D& a, const Pose2D& b);

// ---------------------------------------------------------------------------
// Workspace and scene

struct WorkspaceConfig {
  double width_mm = 600.0;
  double height_mm = 450.0;
  // Assembly plate, a separate known frame outside the manipulation surface.
  std::array<Vec2, 2> hole_positions_mm = {Vec2{650.0, 190.0},
                                           Vec2{650.0, 260.0}};
  double hole_diameter_mm = 15.0;
  double hole_spacing_mm = 70.0;

  Vec2 center() const { return {width_mm / 2.0, height_mm / 2.0}; }
  bool contains(const Vec2& p) const {
    return p.x >= 0.0 && p.x <= width_mm && p.y >= 0.0 && p.y <= height_mm;
  }
};

struct PlacedPart {
  PartClass cls = PartClass::Peg1;
  Pose2D pose;
};

// Poses of the parts still on the manipulation surface. A freshly
// generated scene carries exactly one entry per part class; parts are
// removed as the pipeline assembles them.
struct Scene {
  std::vector<PlacedPart> parts;
  WorkspaceConfig workspace;

  const PlacedPart* find(PartClass cls) const;
  PlacedPart* find(PartClass cls);
  bool remove(PartClass cls);
};

struct SceneError {
  enum class Kind { Overlap, OutOfBounds, MissingPart, DuplicatePart };
  Kind kind;
  PartClass a = PartClass::Peg1;
  PartClass b = PartClass::Peg1;  // second offender for Overlap
  std::string describe() const;
};

// ok (nullopt) iff the scene holds one part per class, all centers in
// bounds, and no two footprint discs interpenetrate.
std::optional<SceneError> validate_scene(const Scene& scene);

// Surface-to-surface clearance between two placed parts (negative when
// the footprint discs overlap).
double pair_clearance(const PlacedPart& a, const PlacedPart& b);

// ---------------------------------------------------------------------------
// Assembly order

enum class AssemblyStep { Peg1, Peg2, GearLarge, GearSmall, Mesh };

struct AssemblyConfig {
  static constexpr std::array<AssemblyStep, 5> kOrder = {
      AssemblyStep::Peg1, AssemblyStep::Peg2, AssemblyStep::GearLarge,
      AssemblyStep::GearSmall, AssemblyStep::Mesh};
};

// Radial clearance of the peg-in-hole pair: max center offset that still
// permits insertion.
double radial_clearance_mm();

}  // namespace gearbox
