#include "gearbox/planner.hpp"

#include <stdexcept>

namespace gearbox {

SlideAction sample_action(const Scene& scene, RngStream& rng) {
  SlideAction a;
  a.part = kAllParts[rng.uniform_int(kAllParts.size())];
  a.dx_mm = rng.uniform(-kSlideLimitMm, kSlideLimitMm);
  a.dy_mm = rng.uniform(-kSlideLimitMm, kSlideLimitMm);
  (void)scene;
  return a;
}

double action_cost(const Scene& scene, const SlideAction& action,
                   const CostWeights& weights, double step_mm) {
  const bool collision = sweep_collides(scene, action, step_mm);
  const bool gear = is_gear(action.part);
  const double clearance_before = min_clearance(scene, action.part);

  // Zero-slip rollout; slip enters only at execution time.
  RngStream no_slip(0, "planner/rollout");
  const SlideOutcome rollout =
      apply_slide(scene, action, SlipModel{0.0}, no_slip);
  const double clearance_after =
      min_clearance(rollout.final_scene, action.part);
  const double separation = clearance_after - clearance_before;

  const Vec2 final_center =
      rollout.final_scene.find(action.part)->pose.translation();
  const double center_dist =
      (final_center - scene.workspace.center()).norm();

  return weights.collision * (collision ? 1.0 : 0.0) -
         weights.gear_bonus * (gear ? 1.0 : 0.0) -
         weights.separation_gain * separation +
         weights.center_distance * center_dist;
}

PlanResult plan(const Scene& scene, const CostWeights& weights, int n_samples,
                RngStream& rng) {
  if (n_samples < 1) {
    throw std::invalid_argument("plan: need at least one sample");
  }
  // Draw all samples first so evaluation order cannot affect the stream.
  std::vector<SlideAction> actions;
  actions.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) actions.push_back(sample_action(scene, rng));

  PlanResult result;
  result.samples_evaluated = n_samples;
  result.per_sample_costs.reserve(n_samples);
  int best = 0;
  for (int i = 0; i < n_samples; ++i) {
    const double c = action_cost(scene, actions[i], weights);
    result.per_sample_costs.push_back(c);
    if (c < result.per_sample_costs[best]) best = i;
  }
  result.best_action = actions[best];
  result.best_cost = result.per_sample_costs[best];
  return result;
}

Scene perceive_scene(const Scene& scene, const PerceptionChannel& channel,
                     RngStream& rng) {
  if (!channel.enabled) return scene;
  Scene perceived = scene;
  for (auto& p : perceived.parts) {
    const LabeledCloud cloud = sample_cloud(
        p.cls, p.pose, channel.cloud_points, channel.noise_sigma_mm, rng);
    const PoseEstimate est = estimate_pose(cloud);
    p.pose.x = est.position.x();
    p.pose.y = est.position.y();
    if (!est.degenerate) p.pose.yaw = est.yaw;
  }
  return perceived;
}

SingulationResult singulate(const Scene& scene, const CostWeights& weights,
                            int n_samples, int max_interactions,
                            const GripperFootprint& gripper,
                            const SlipModel& slip, RngStream& rng,
                            const PerceptionChannel& perception,
                            std::optional<PartClass> target) {
  if (max_interactions < 0) {
    throw std::invalid_argument("singulate: negative interaction budget");
  }
  SingulationResult result;
  result.final_scene = scene;

  RngStream perceive_rng = rng.substream("perceive");
  auto goal_reached = [&](const Scene& s) {
    return target ? graspable(s, *target, gripper)
                  : all_pegs_graspable(s, gripper);
  };

  for (int k = 0;; ++k) {
    const Scene perceived =
        perceive_scene(result.final_scene, perception, perceive_rng);
    if (goal_reached(perceived)) {
      result.success = true;
      result.interactions = k;
      return result;
    }
    if (k == max_interactions) {
      result.interactions = k;
      return result;
    }

    const PlanResult planned = plan(perceived, weights, n_samples, rng);
    const SlideOutcome outcome =
        apply_slide(result.final_scene, planned.best_action, slip, rng);

    InteractionRecord rec;
    rec.interaction = k + 1;
    rec.action = planned.best_action;
    rec.cost = planned.best_cost;
    rec.slipped = outcome.slipped;
    rec.collided = outcome.collided;
    result.final_scene = outcome.final_scene;
    rec.pegs_graspable_after =
        !outcome.off_table && all_pegs_graspable(result.final_scene, gripper);
    result.records.push_back(rec);

    if (outcome.off_table) {
      result.interactions = k + 1;
      return result;
    }
  }
}

}  // namespace gearbox
