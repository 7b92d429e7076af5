// Planar kinematic simulator: disc-footprint sliding with stepwise
// collision checking, slip-noise execution, grasp feasibility tests and
// off-table detection. Scenes are immutable values; every operation
// returns a new scene.
#pragma once

#include "gearbox/core.hpp"
#include "gearbox/rng.hpp"

namespace gearbox {

inline constexpr double kSlideLimitMm = 300.0;  // actions sampled U(-300, 300)
inline constexpr double kDefaultSweepStepMm = 1.0;

struct SlideAction {
  PartClass part = PartClass::Peg1;
  double dx_mm = 0.0;
  double dy_mm = 0.0;
};

struct SlideOutcome {
  Scene final_scene;
  bool collided = false;
  bool slipped = false;
  bool off_table = false;
  double executed_fraction = 1.0;
};

// Contact slips with probability p_slip, stopping the part at a uniform
// random fraction of the commanded path.
struct SlipModel {
  double p_slip = 0.15;
};

// Two finger discs at +/- half the opening along the grasp axis.
struct GripperFootprint {
  double finger_radius_mm = 10.0;
  double opening_mm = 70.0;
};

inline constexpr int kGraspAngleCount = 16;

// True iff the moved part's footprint disc touches or penetrates another
// part's disc at any interpolation step (spacing <= step_mm, endpoint
// included, start excluded so resting contacts do not flag every action).
bool sweep_collides(const Scene& scene, const SlideAction& action,
                    double step_mm = kDefaultSweepStepMm);

// Execute a slide with slip noise. Contacted parts are pushed along the
// contact normal by the penetration depth; off_table is set when any
// part's center leaves the workspace.
SlideOutcome apply_slide(const Scene& scene, const SlideAction& action,
                         const SlipModel& slip, RngStream& rng);

// True iff some grasp angle in the 16-angle discretization places both
// finger discs collision-free against all other parts and inside the
// workspace. Pegs only admit grasps perpendicular to the peg axis.
bool graspable(const Scene& scene, PartClass part,
               const GripperFootprint& gripper);

bool all_pegs_graspable(const Scene& scene, const GripperFootprint& gripper);

// Surface clearance from `part` to the nearest other part (+inf if alone).
double min_clearance(const Scene& scene, PartClass part);

}  // namespace gearbox
