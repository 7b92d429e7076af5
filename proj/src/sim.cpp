#include "gearbox/sim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gearbox {

namespace {

void check_action(const Scene& scene, const SlideAction& action) {
  if (!scene.find(action.part)) {
    throw std::invalid_argument("unknown part in slide action: " +
                                to_string(action.part));
  }
  if (std::abs(action.dx_mm) > kSlideLimitMm ||
      std::abs(action.dy_mm) > kSlideLimitMm) {
    throw std::invalid_argument("slide action exceeds +/-300 mm bounds");
  }
}

bool discs_in_contact(const Vec2& a, double ra, const Vec2& b, double rb) {
  return (a - b).norm() <= ra + rb;
}

}  // namespace

bool sweep_collides(const Scene& scene, const SlideAction& action,
                    double step_mm) {
  check_action(scene, action);
  if (step_mm <= 0.0) {
    throw std::invalid_argument("sweep step must be positive");
  }
  const PlacedPart& mover = *scene.find(action.part);
  const double r_mover = part_geometry(mover.cls).footprint_radius_mm;
  const Vec2 start = mover.pose.translation();
  const Vec2 delta{action.dx_mm, action.dy_mm};
  const double len = delta.norm();
  if (len == 0.0) return false;

  const int steps = static_cast<int>(std::ceil(len / step_mm));
  for (int i = 1; i <= steps; ++i) {
    const Vec2 c = start + delta * (static_cast<double>(i) / steps);
    for (const auto& other : scene.parts) {
      if (other.cls == action.part) continue;
      if (discs_in_contact(c, r_mover, other.pose.translation(),
                           part_geometry(other.cls).footprint_radius_mm)) {
        return true;
      }
    }
  }
  return false;
}

SlideOutcome apply_slide(const Scene& scene, const SlideAction& action,
                         const SlipModel& slip, RngStream& rng) {
  check_action(scene, action);
  SlideOutcome out;
  out.final_scene = scene;

  out.slipped = rng.uniform01() < slip.p_slip;
  out.executed_fraction = 1.0;
  if (out.slipped) {
    double f;
    do {
      f = rng.uniform01();
    } while (f == 0.0);
    out.executed_fraction = f;
  }

  PlacedPart* mover = out.final_scene.find(action.part);
  const double r_mover = part_geometry(mover->cls).footprint_radius_mm;
  const Vec2 start = mover->pose.translation();
  const Vec2 delta =
      Vec2{action.dx_mm, action.dy_mm} * out.executed_fraction;
  const double len = delta.norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / 1.0)));

  for (int i = 1; i <= steps; ++i) {
    const Vec2 c = start + delta * (static_cast<double>(i) / steps);
    mover->pose.x = c.x;
    mover->pose.y = c.y;
    for (auto& other : out.final_scene.parts) {
      if (other.cls == action.part) continue;
      const double r_other = part_geometry(other.cls).footprint_radius_mm;
      const Vec2 oc = other.pose.translation();
      const Vec2 sep = oc - c;
      const double d = sep.norm();
      if (d <= r_mover + r_other) {
        out.collided = true;
        // Push the contacted part out along the contact normal.
        const double depth = r_mover + r_other - d;
        const Vec2 n = d > 1e-9 ? sep * (1.0 / d) : Vec2{1.0, 0.0};
        other.pose.x = oc.x + n.x * (depth + kContactEpsilonMm);
        other.pose.y = oc.y + n.y * (depth + kContactEpsilonMm);
      }
    }
  }

  // Relax any residual overlap from multi-part pile-ups.
  for (int pass = 0; pass < 50; ++pass) {
    bool moved = false;
    auto& parts = out.final_scene.parts;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      for (std::size_t j = i + 1; j < parts.size(); ++j) {
        const double gap = pair_clearance(parts[i], parts[j]);
        if (gap < -kContactEpsilonMm) {
          PlacedPart& pushed = parts[i].cls == action.part ? parts[j] : parts[i];
          const PlacedPart& fixed_part =
              parts[i].cls == action.part ? parts[i] : parts[j];
          Vec2 n = pushed.pose.translation() - fixed_part.pose.translation();
          const double d = n.norm();
          n = d > 1e-9 ? n * (1.0 / d) : Vec2{1.0, 0.0};
          pushed.pose.x += n.x * (-gap + kContactEpsilonMm);
          pushed.pose.y += n.y * (-gap + kContactEpsilonMm);
          moved = true;
        }
      }
    }
    if (!moved) break;
  }

  for (const auto& p : out.final_scene.parts) {
    if (!out.final_scene.workspace.contains(p.pose.translation())) {
      out.off_table = true;
    }
  }
  return out;
}

namespace {

bool grasp_angle_feasible(const Scene& scene, const PlacedPart& target,
                          const GripperFootprint& gripper, double angle) {
  const Vec2 c = target.pose.translation();
  const Vec2 u{std::cos(angle), std::sin(angle)};
  const double half = gripper.opening_mm / 2.0;
  const double rf = gripper.finger_radius_mm;
  const WorkspaceConfig& ws = scene.workspace;

  for (const double side : {half, -half}) {
    const Vec2 f = c + u * side;
    if (f.x < rf || f.x > ws.width_mm - rf || f.y < rf ||
        f.y > ws.height_mm - rf) {
      return false;
    }
    for (const auto& other : scene.parts) {
      if (other.cls == target.cls) continue;
      const double r_other = part_geometry(other.cls).footprint_radius_mm;
      if ((f - other.pose.translation()).norm() <= rf + r_other) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

bool graspable(const Scene& scene, PartClass part,
               const GripperFootprint& gripper) {
  const PlacedPart* target = scene.find(part);
  if (!target) {
    throw std::invalid_argument("graspable: part not in scene: " +
                                to_string(part));
  }
  if (is_peg(part)) {
    // Fingers close across the peg; the grasp axis is perpendicular to
    // the peg's long axis (the mirrored angle gives the same finger pair).
    return grasp_angle_feasible(scene, *target, gripper,
                                target->pose.yaw + kPi / 2.0);
  }
  for (int k = 0; k < kGraspAngleCount; ++k) {
    const double angle = 2.0 * kPi * k / kGraspAngleCount;
    if (grasp_angle_feasible(scene, *target, gripper, angle)) return true;
  }
  return false;
}

bool all_pegs_graspable(const Scene& scene, const GripperFootprint& gripper) {
  bool ok = true;
  for (PartClass peg : {PartClass::Peg1, PartClass::Peg2}) {
    if (scene.find(peg)) ok = ok && graspable(scene, peg, gripper);
  }
  return ok;
}

double min_clearance(const Scene& scene, PartClass part) {
  const PlacedPart* target = scene.find(part);
  if (!target) {
    throw std::invalid_argument("min_clearance: part not in scene");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& other : scene.parts) {
    if (other.cls == part) continue;
    best = std::min(best, pair_clearance(*target, other));
  }
  return best;
}

}  // namespace gearbox
