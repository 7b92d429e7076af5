#include "gearbox/pipeline.hpp"

#include <chrono>
#include <ostream>
#include <stdexcept>

namespace gearbox {

namespace {

PartClass gear_of(int index) {
  return index == 0 ? PartClass::GearLarge : PartClass::GearSmall;
}

PartClass peg_of(int number) {
  return number == 1 ? PartClass::Peg1 : PartClass::Peg2;
}

}  // namespace

std::string stage_name(const Stage& stage) {
  switch (stage.kind) {
    case StageKind::Perceive: return "perceive";
    case StageKind::Singulate: return "singulate";
    case StageKind::GraspPeg: return "grasp_peg" + std::to_string(stage.index);
    case StageKind::Reorient: return "reorient_peg" + std::to_string(stage.index);
    case StageKind::EstimateOffset:
      return "estimate_offset_peg" + std::to_string(stage.index);
    case StageKind::InsertPeg: return "insert_peg" + std::to_string(stage.index);
    case StageKind::GraspGear:
      return stage.index == 0 ? "grasp_gear_large" : "grasp_gear_small";
    case StageKind::InsertGear:
      return stage.index == 0 ? "insert_gear_large" : "insert_gear_small";
    case StageKind::MeshGears: return "mesh_gears";
    case StageKind::Done: return "done";
    case StageKind::Failed: return "failed";
  }
  return "unknown";
}

Pipeline::Pipeline(Scene initial_scene, PipelineConfig config)
    : config_(std::move(config)),
      true_scene_(std::move(initial_scene)),
      perceived_scene_(true_scene_),
      perceive_rng_(config_.master_seed, "pipeline/perceive"),
      planner_rng_(config_.master_seed, "pipeline/planner"),
      grasp_rng_(config_.master_seed, "pipeline/grasp"),
      tactile_rng_(config_.master_seed, "pipeline/tactile"),
      force_rng_(config_.master_seed, "pipeline/force"),
      mesh_rng_(config_.master_seed, "pipeline/mesh") {
  RngStream offset_train(config_.master_seed, "pipeline/offset-training");
  offset_estimator_ = fit_offset_estimator(config_.offset_training_size,
                                           config_.tactile, offset_train);
  RngStream policy_train(config_.master_seed, "pipeline/policy-training");
  insertion_policy_ = fit_insertion_policy(config_.policy_per_class,
                                           config_.force, policy_train);
}

PipelineEvent Pipeline::make_event(const Stage& stage,
                                   const std::string& outcome,
                                   double duration_s, nlohmann::json detail) {
  sim_time_s_ += duration_s;
  detail["duration_s"] = duration_s;
  PipelineEvent ev;
  ev.seq = seq_++;
  ev.stage = stage_name(stage);
  ev.outcome = outcome;
  ev.sim_time_s = sim_time_s_;
  ev.detail = std::move(detail);
  return ev;
}

void Pipeline::fail(const Stage& causal_stage,
                    std::vector<PipelineEvent>& events,
                    const std::string& reason, double duration_s,
                    nlohmann::json detail) {
  failure_cause_ = stage_name(causal_stage);
  detail["cause"] = failure_cause_;
  detail["reason"] = reason;
  events.push_back(
      make_event(causal_stage, "fail", duration_s, std::move(detail)));
  stage_ = Stage{StageKind::Failed, causal_stage.index};
}

std::vector<PipelineEvent> Pipeline::step() {
  if (stage_.terminal()) {
    throw std::logic_error("Pipeline::step called on a terminal state");
  }
  const auto wall_start = std::chrono::steady_clock::now();
  std::vector<PipelineEvent> events;
  const Stage current = stage_;
  const StageDurations& dur = config_.durations;

  switch (current.kind) {
    case StageKind::Perceive: {
      perceived_scene_ =
          perceive_scene(true_scene_, config_.perception, perceive_rng_);
      events.push_back(make_event(current, "ok", dur.perceive_s,
                                  {{"parts", perceived_scene_.parts.size()}}));
      stage_ = after_perceive_;
      break;
    }

    case StageKind::Singulate: {
      const SingulationResult res = singulate(
          true_scene_, config_.weights, config_.singulation_samples,
          config_.max_interactions, config_.gripper, config_.slip,
          planner_rng_, config_.perception, singulation_target_);
      true_scene_ = res.final_scene;
      int slips = 0;
      for (const auto& r : res.records) slips += r.slipped ? 1 : 0;
      nlohmann::json detail = {{"interactions", res.interactions},
                               {"slips", slips},
                               {"success", res.success}};
      if (singulation_target_) {
        detail["target"] = to_string(*singulation_target_);
      }
      if (res.success) {
        events.push_back(make_event(current, "ok",
                                    dur.slide_s * res.interactions, detail));
        stage_ = after_singulate_;
        singulation_target_.reset();
      } else {
        fail(current, events, "could not singulate",
             dur.slide_s * res.interactions, std::move(detail));
      }
      break;
    }

    case StageKind::GraspPeg: {
      const PartClass peg = peg_of(current.index);
      PegSlot& slot = pegs_[current.index - 1];
      if (!graspable(true_scene_, peg, config_.gripper)) {
        if (++slot.retries > config_.retry_budget) {
          fail(current, events, "peg not graspable after retries",
               dur.grasp_peg_s);
          break;
        }
        events.push_back(make_event(current, "retry", dur.grasp_peg_s,
                                    {{"blocked", true}}));
        singulation_target_ = peg;
        after_singulate_ = current;
        after_perceive_ = Stage{StageKind::Singulate, 0};
        stage_ = Stage{StageKind::Perceive, 0};
        break;
      }
      slot.table_pose = true_scene_.find(peg)->pose;
      slot.offset_mm = inject_grasp_error(grasp_rng_);
      true_scene_.remove(peg);
      events.push_back(make_event(current, "ok", dur.grasp_peg_s,
                                  {{"offset_mm", slot.offset_mm}}));
      stage_ = Stage{StageKind::Reorient, current.index};
      break;
    }

    case StageKind::Reorient: {
      const PartClass peg = peg_of(current.index);
      PegSlot& slot = pegs_[current.index - 1];
      PoseEstimate est;
      est.label = peg;
      const PegGrasp grasp =
          plan_peg_grasp(est, part_geometry(peg), config_.grasp);
      const bool reoriented = simulate_reorientation(grasp, config_.pivot);
      if (!reoriented) {
        if (++slot.retries > config_.retry_budget) {
          fail(current, events, "peg did not reorient", dur.reorient_s);
          break;
        }
        // Put the peg back and re-grasp.
        true_scene_.parts.push_back({peg, slot.table_pose});
        events.push_back(
            make_event(current, "retry", dur.reorient_s, {{"pivot", false}}));
        stage_ = Stage{StageKind::GraspPeg, current.index};
        break;
      }
      events.push_back(make_event(current, "ok", dur.reorient_s,
                                  {{"x_p_mm", grasp.x_p_mm}}));
      stage_ = Stage{StageKind::EstimateOffset, current.index};
      break;
    }

    case StageKind::EstimateOffset: {
      PegSlot& slot = pegs_[current.index - 1];
      const TactileObservation obs =
          observe_tactile(slot.offset_mm, config_.tactile, tactile_rng_);
      slot.correction_mm = estimate_offset(offset_estimator_, obs);
      events.push_back(
          make_event(current, "ok", dur.estimate_offset_s,
                     {{"correction_mm", slot.correction_mm}}));
      stage_ = Stage{StageKind::InsertPeg, current.index};
      break;
    }

    case StageKind::InsertPeg: {
      PegSlot& slot = pegs_[current.index - 1];
      const bool ok =
          insert_peg(slot.offset_mm, slot.correction_mm, radial_clearance_mm());
      const double residual = slot.offset_mm - slot.correction_mm;
      if (!ok) {
        if (++slot.retries > config_.retry_budget) {
          fail(current, events, "insertion residual outside clearance",
               dur.insert_peg_s, {{"residual_mm", residual}});
          break;
        }
        // Re-grasp in place: fresh in-hand error, then re-estimate.
        slot.offset_mm = inject_grasp_error(grasp_rng_);
        events.push_back(make_event(current, "retry", dur.insert_peg_s,
                                    {{"residual_mm", residual}}));
        stage_ = Stage{StageKind::EstimateOffset, current.index};
        break;
      }
      events.push_back(make_event(current, "ok", dur.insert_peg_s,
                                  {{"residual_mm", residual}}));
      stage_ = current.index == 1 ? Stage{StageKind::GraspPeg, 2}
                                  : Stage{StageKind::GraspGear, 0};
      break;
    }

    case StageKind::GraspGear: {
      const PartClass gear = gear_of(current.index);
      GearSlot& slot = gears_[current.index];
      if (!graspable(true_scene_, gear, config_.gripper)) {
        if (++slot.retries > config_.retry_budget) {
          fail(current, events, "gear not graspable after retries",
               dur.grasp_gear_s);
          break;
        }
        events.push_back(make_event(current, "retry", dur.grasp_gear_s,
                                    {{"blocked", true}}));
        singulation_target_ = gear;
        after_singulate_ = current;
        stage_ = Stage{StageKind::Singulate, 0};
        break;
      }
      slot.error_mm = grasp_rng_.uniform(-config_.gear_error_range_mm,
                                         config_.gear_error_range_mm);
      true_scene_.remove(gear);
      events.push_back(make_event(current, "ok", dur.grasp_gear_s,
                                  {{"error_mm", slot.error_mm}}));
      stage_ = Stage{StageKind::InsertGear, current.index};
      break;
    }

    case StageKind::InsertGear: {
      GearSlot& slot = gears_[current.index];
      const GearInsertResult res = insert_gear_loop(
          Vec2{slot.error_mm, 0.0}, insertion_policy_, config_.gear_step_mm,
          radial_clearance_mm(), config_.gear_max_iters, config_.force,
          force_rng_);
      const double duration =
          dur.insert_gear_base_s + dur.insert_gear_iter_s * res.iterations;
      if (!res.success) {
        if (++slot.retries > config_.retry_budget) {
          fail(current, events, "gear insertion did not converge", duration,
               {{"iterations", res.iterations}});
          break;
        }
        slot.error_mm = grasp_rng_.uniform(-config_.gear_error_range_mm,
                                           config_.gear_error_range_mm);
        events.push_back(make_event(current, "retry", duration,
                                    {{"iterations", res.iterations}}));
        break;  // stage unchanged: retry the insertion with the new grasp
      }
      events.push_back(make_event(current, "ok", duration,
                                  {{"iterations", res.iterations}}));
      stage_ = current.index == 0 ? Stage{StageKind::GraspGear, 1}
                                  : Stage{StageKind::MeshGears, 0};
      break;
    }

    case StageKind::MeshGears: {
      const double pitch =
          part_geometry(PartClass::GearSmall).tooth_pitch_angle_rad;
      const double theta0 = mesh_rng_.uniform(0.0, pitch);
      const MeshResult res =
          mesh_gears(theta0, config_.mesh_controller, config_.mesh_rho,
                     config_.mesh_tol_rad, pitch, config_.mesh_attempts,
                     mesh_rng_);
      const double duration = dur.mesh_attempt_s * res.attempts;
      if (!res.success) {
        fail(current, events, "teeth did not align within attempt budget",
             duration, {{"attempts", res.attempts}, {"theta0_rad", theta0}});
        break;
      }
      events.push_back(make_event(current, "ok", duration,
                                  {{"attempts", res.attempts},
                                   {"theta0_rad", theta0}}));
      stage_ = Stage{StageKind::Done, 0};
      events.push_back(make_event(Stage{StageKind::Done, 0}, "ok", 0.0, {}));
      break;
    }

    case StageKind::Done:
    case StageKind::Failed:
      break;  // unreachable, guarded above
  }

  if (config_.record_wall_time && !events.empty()) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      wall_start)
            .count();
    events.back().wall_time_s = wall;
  }
  return events;
}

PipelineResult Pipeline::run() {
  PipelineResult result;
  while (!stage_.terminal()) {
    auto events = step();
    result.events.insert(result.events.end(),
                         std::make_move_iterator(events.begin()),
                         std::make_move_iterator(events.end()));
  }
  result.terminal = stage_;
  result.failure_cause = failure_cause_;
  result.final_scene = true_scene_;
  return result;
}

PipelineResult run(const Scene& initial_scene, const PipelineConfig& config) {
  Pipeline pipeline(initial_scene, config);
  return pipeline.run();
}

void write_event_log(const std::vector<PipelineEvent>& events,
                     std::ostream& out) {
  for (const auto& ev : events) {
    nlohmann::json j = {{"seq", ev.seq},
                        {"stage", ev.stage},
                        {"outcome", ev.outcome},
                        {"sim_time_s", ev.sim_time_s},
                        {"wall_time_s", ev.wall_time_s},
                        {"detail", ev.detail}};
    out << j.dump() << '\n';
  }
}

namespace {

template <typename T>
void maybe_get(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  maybe_get(j, "master_seed", c.master_seed);
  if (j.contains("perception")) {
    const auto& p = j.at("perception");
    maybe_get(p, "enabled", c.perception.enabled);
    maybe_get(p, "cloud_points", c.perception.cloud_points);
    maybe_get(p, "noise_sigma_mm", c.perception.noise_sigma_mm);
  }
  maybe_get(j, "p_slip", c.slip.p_slip);
  maybe_get(j, "singulation_samples", c.singulation_samples);
  maybe_get(j, "max_interactions", c.max_interactions);
  maybe_get(j, "offset_training_size", c.offset_training_size);
  maybe_get(j, "policy_per_class", c.policy_per_class);
  maybe_get(j, "gear_error_range_mm", c.gear_error_range_mm);
  maybe_get(j, "gear_step_mm", c.gear_step_mm);
  maybe_get(j, "gear_max_iters", c.gear_max_iters);
  maybe_get(j, "mesh_rho", c.mesh_rho);
  maybe_get(j, "mesh_tol_rad", c.mesh_tol_rad);
  maybe_get(j, "mesh_attempts", c.mesh_attempts);
  maybe_get(j, "retry_budget", c.retry_budget);
  maybe_get(j, "record_wall_time", c.record_wall_time);
  maybe_get(j, "tactile_sigma", c.tactile.sigma);
  maybe_get(j, "force_sigma_n", c.force.sigma_n);
  return c;
}

nlohmann::json pipeline_config_to_json(const PipelineConfig& c) {
  return {
      {"master_seed", c.master_seed},
      {"perception",
       {{"enabled", c.perception.enabled},
        {"cloud_points", c.perception.cloud_points},
        {"noise_sigma_mm", c.perception.noise_sigma_mm}}},
      {"p_slip", c.slip.p_slip},
      {"singulation_samples", c.singulation_samples},
      {"max_interactions", c.max_interactions},
      {"offset_training_size", c.offset_training_size},
      {"policy_per_class", c.policy_per_class},
      {"gear_error_range_mm", c.gear_error_range_mm},
      {"gear_step_mm", c.gear_step_mm},
      {"gear_max_iters", c.gear_max_iters},
      {"mesh_rho", c.mesh_rho},
      {"mesh_tol_rad", c.mesh_tol_rad},
      {"mesh_attempts", c.mesh_attempts},
      {"retry_budget", c.retry_budget},
      {"record_wall_time", c.record_wall_time},
      {"tactile_sigma", c.tactile.sigma},
      {"force_sigma_n", c.force.sigma_n},
  };
}

}  // namespace gearbox
