// Closed-loop assembly state machine: perceive, singulate, then per part
// grasp / reorient / offset-correct / insert, gear insertion by force
// feedback, and finally gear meshing. Stage failures consume per-part
// retry budgets (re-perceive + re-grasp) before aborting the run.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gearbox/grasp.hpp"
#include "gearbox/insertion.hpp"
#include "gearbox/planner.hpp"

namespace gearbox {

enum class StageKind {
  Perceive,
  Singulate,
  GraspPeg,
  Reorient,
  EstimateOffset,
  InsertPeg,
  GraspGear,
  InsertGear,
  MeshGears,
  Done,
  Failed
};

struct Stage {
  StageKind kind = StageKind::Perceive;
  int index = 0;  // peg number (1, 2) or gear index (0 large, 1 small)

  bool terminal() const {
    return kind == StageKind::Done || kind == StageKind::Failed;
  }
  bool operator==(const Stage&) const = default;
};

std::string stage_name(const Stage& stage);

struct PipelineEvent {
  int seq = 0;
  std::string stage;
  std::string outcome;  // ok | retry | fail
  double sim_time_s = 0.0;
  double wall_time_s = 0.0;
  nlohmann::json detail;
};

// Simulated robot-motion seconds charged per executed stage.
struct StageDurations {
  double perceive_s = 1.5;
  double slide_s = 8.0;
  double grasp_peg_s = 6.0;
  double reorient_s = 10.0;
  double estimate_offset_s = 4.0;
  double insert_peg_s = 15.0;
  double grasp_gear_s = 8.0;
  double insert_gear_base_s = 6.0;
  double insert_gear_iter_s = 4.0;
  double mesh_attempt_s = 5.0;
};

struct PipelineConfig {
  uint64_t master_seed = 0;

  PerceptionChannel perception{true, kDefaultCloudPoints, kDefaultNoiseSigmaMm};
  SlipModel slip{0.15};
  CostWeights weights;
  GripperFootprint gripper;
  int singulation_samples = kDefaultPlannerSamples;
  int max_interactions = kDefaultMaxInteractions;

  PegGraspConfig grasp;
  PivotConstants pivot;
  TactileModel tactile;
  int offset_training_size = 1000;

  ForceModel force;
  int policy_per_class = 50;
  double gear_error_range_mm = 4.0;  // in-hand gear error along local x
  double gear_step_mm = 1.0;
  int gear_max_iters = 6;

  double mesh_rho = kDefaultMeshTransmission;
  double mesh_tol_rad = kDefaultMeshToleranceRad;
  int mesh_attempts = kMaxMeshAttempts;
  MeshController mesh_controller;

  int retry_budget = 3;  // re-perceive + re-grasp cycles per part
  StageDurations durations;

  // Wall time is measured by default; disable to make event logs
  // byte-identical across replays.
  bool record_wall_time = true;
};

PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json pipeline_config_to_json(const PipelineConfig& config);

struct PipelineResult {
  Stage terminal;
  std::string failure_cause;  // stage name, empty when Done
  std::vector<PipelineEvent> events;
  Scene final_scene;

  bool done() const { return terminal.kind == StageKind::Done; }
};

class Pipeline {
 public:
  Pipeline(Scene initial_scene, PipelineConfig config);

  const Stage& stage() const { return stage_; }
  double sim_time_s() const { return sim_time_s_; }

  // Execute exactly one stage; no-op precondition: stage not terminal.
  std::vector<PipelineEvent> step();

  PipelineResult run();

 private:
  struct PegSlot {
    double offset_mm = 0.0;
    double correction_mm = 0.0;
    Pose2D table_pose;  // restore point for re-grasp retries
    int retries = 0;
  };
  struct GearSlot {
    double error_mm = 0.0;
    int retries = 0;
  };

  PipelineEvent make_event(const Stage& stage, const std::string& outcome,
                           double duration_s, nlohmann::json detail);
  void fail(const Stage& causal_stage, std::vector<PipelineEvent>& events,
            const std::string& reason, double duration_s = 0.0,
            nlohmann::json detail = {});

  PipelineConfig config_;
  Scene true_scene_;
  Scene perceived_scene_;
  Stage stage_;
  Stage after_perceive_{StageKind::Singulate, 0};
  Stage after_singulate_{StageKind::GraspPeg, 1};
  std::optional<PartClass> singulation_target_;
  std::string failure_cause_;

  std::array<PegSlot, 2> pegs_;
  std::array<GearSlot, 2> gears_;

  OffsetEstimator offset_estimator_;
  InsertionPolicy insertion_policy_;

  RngStream perceive_rng_;
  RngStream planner_rng_;
  RngStream grasp_rng_;
  RngStream tactile_rng_;
  RngStream force_rng_;
  RngStream mesh_rng_;

  double sim_time_s_ = 0.0;
  int seq_ = 0;
};

PipelineResult run(const Scene& initial_scene, const PipelineConfig& config);

// Line-delimited event log records.
void write_event_log(const std::vector<PipelineEvent>& events,
                     std::ostream& out);

}  // namespace gearbox
