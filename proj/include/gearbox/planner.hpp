// Random-shooting singulation planner: sample slide actions, roll each
// out on a zero-slip copy of the scene, score with the collision /
// gear-preference / separation / center-keeping cost, take the argmin.
#pragma once

#include <optional>
#include <vector>

#include "gearbox/perception.hpp"
#include "gearbox/sim.hpp"

namespace gearbox {

inline constexpr int kDefaultPlannerSamples = 100;
inline constexpr int kDefaultMaxInteractions = 10;

struct CostWeights {
  double collision = 10.0;         // penalty, dimensionless indicator
  double gear_bonus = 1.0;         // reward for selecting a gear
  double separation_gain = 0.02;   // per mm of clearance gained
  double center_distance = 0.005;  // per mm from the workspace center
};

struct PlanResult {
  SlideAction best_action;
  double best_cost = 0.0;
  int samples_evaluated = 0;
  std::vector<double> per_sample_costs;
};

// o uniform over the four part classes, dx/dy independent U(-300, 300).
SlideAction sample_action(const Scene& scene, RngStream& rng);

// c = w.collision * I_collision - w.gear_bonus * I_gear
//     - w.separation_gain * (clearance after - clearance before)
//     + w.center_distance * |final center - workspace center|
// evaluated on a zero-slip rollout.
double action_cost(const Scene& scene, const SlideAction& action,
                   const CostWeights& weights,
                   double step_mm = kDefaultSweepStepMm);

// Evaluates exactly n_samples actions; ties broken by lowest sample index.
PlanResult plan(const Scene& scene, const CostWeights& weights, int n_samples,
                RngStream& rng);

// Pose estimation channel applied between interactions when the planner
// runs inside the pipeline; disabled = planner sees exact poses.
struct PerceptionChannel {
  bool enabled = false;
  int cloud_points = kDefaultCloudPoints;
  double noise_sigma_mm = kDefaultNoiseSigmaMm;
};

// Re-perceive a scene through the noise channel (identity when disabled).
Scene perceive_scene(const Scene& scene, const PerceptionChannel& channel,
                     RngStream& rng);

struct InteractionRecord {
  int interaction = 0;
  SlideAction action;
  double cost = 0.0;
  bool slipped = false;
  bool collided = false;
  bool pegs_graspable_after = false;
};

struct SingulationResult {
  Scene final_scene;
  int interactions = 0;
  bool success = false;
  std::vector<InteractionRecord> records;
};

// Plan/slide/re-perceive loop. Terminates with success when the goal
// parts can be grasped without collision; fails when a part leaves the
// table or the interaction budget is exhausted. Default goal: both pegs
// (the pipeline passes a single target part when freeing a gear).
SingulationResult singulate(const Scene& scene, const CostWeights& weights,
                            int n_samples, int max_interactions,
                            const GripperFootprint& gripper,
                            const SlipModel& slip, RngStream& rng,
                            const PerceptionChannel& perception = {},
                            std::optional<PartClass> target = std::nullopt);

}  // namespace gearbox
