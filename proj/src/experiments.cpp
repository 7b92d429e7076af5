#include "gearbox/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "gearbox/scene_io.hpp"
#include "gearbox/version.hpp"

namespace gearbox {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stable numeric formatting so report bodies are byte-identical.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double now_wall() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Scene generate_scene(RngStream& rng, const WorkspaceConfig& workspace,
                     double clutter_bias) {
  Scene scene;
  scene.workspace = workspace;
  const bool clutter = rng.uniform01() < clutter_bias;
  const Vec2 center = workspace.center();
  int rejections = 0;

  for (PartClass cls : kAllParts) {
    const double r = part_geometry(cls).footprint_radius_mm;
    for (;;) {
      Vec2 c;
      if (clutter) {
        const double rad = kClutterDiscRadiusMm * std::sqrt(rng.uniform01());
        const double ang = rng.uniform(0.0, 2.0 * kPi);
        c = center + Vec2{rad * std::cos(ang), rad * std::sin(ang)};
      } else {
        c.x = rng.uniform(r, workspace.width_mm - r);
        c.y = rng.uniform(r, workspace.height_mm - r);
      }
      bool ok = c.x >= r && c.x <= workspace.width_mm - r && c.y >= r &&
                c.y <= workspace.height_mm - r;
      for (const auto& placed : scene.parts) {
        if (!ok) break;
        const double d = (c - placed.pose.translation()).norm();
        ok = d >= r + part_geometry(placed.cls).footprint_radius_mm;
      }
      if (ok) {
        const double yaw = normalize_angle(rng.uniform(-kPi, kPi));
        scene.parts.push_back({cls, Pose2D{c.x, c.y, yaw}});
        break;
      }
      if (++rejections >= kGenerationRejectionLimit) {
        throw GenerationTimeout("scene generation exceeded " +
                                std::to_string(kGenerationRejectionLimit) +
                                " rejections");
      }
    }
  }
  return scene;
}

std::vector<Scene> load_benchmark_scenes(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("scene_", 0) == 0 && entry.path().extension() == ".json") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Scene> scenes;
  scenes.reserve(paths.size());
  for (const auto& p : paths) scenes.push_back(load_scene(p).scene);
  if (scenes.empty()) {
    throw std::runtime_error("no benchmark scenes found in " + dir);
  }
  return scenes;
}

// ---------------------------------------------------------------------------
// Experiment runners

namespace {

ExperimentOutput run_singulation_ablation(const ExperimentSpec& spec) {
  ExperimentOutput out;
  const std::vector<Scene> scenes = load_benchmark_scenes(spec.scenes_dir);
  const CostWeights weights;
  const GripperFootprint gripper;
  const SlipModel no_slip{0.0};  // simulation-side ablation

  json wall_stats = json::array();
  for (int n : singulation_sample_grid()) {
    int successes = 0;
    double interaction_sum = 0.0;
    double wall_sum = 0.0;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      RngStream rng(spec.master_seed, "singulation-ablation/n=" +
                                          std::to_string(n) + "/trial-" +
                                          std::to_string(i));
      const double t0 = now_wall();
      const SingulationResult res =
          singulate(scenes[i], weights, n, kDefaultMaxInteractions, gripper,
                    no_slip, rng);
      wall_sum += now_wall() - t0;
      successes += res.success ? 1 : 0;
      // Failed runs count the full interaction budget.
      interaction_sum +=
          res.success ? res.interactions : kDefaultMaxInteractions;
      out.raw_records.push_back({{"experiment", "singulation-ablation"},
                                 {"n_samples", n},
                                 {"trial", i},
                                 {"success", res.success},
                                 {"interactions", res.interactions}});
    }
    ReportRow row;
    row.params = {{"n_samples", std::to_string(n)}};
    row.success_rate = static_cast<double>(successes) / scenes.size();
    row.mean_interactions = interaction_sum / scenes.size();
    row.mean_wall_time_s = wall_sum / scenes.size();
    out.rows.push_back(row);
    wall_stats.push_back(
        {{"n_samples", n}, {"mean_wall_time_s", wall_sum / scenes.size()}});
  }
  out.sidecar_extra["wall_time"] = wall_stats;
  return out;
}

ExperimentOutput run_offset_ablation(const ExperimentSpec& spec) {
  ExperimentOutput out;
  const TactileModel model;
  const double clearance = radial_clearance_mm();
  const int n_seeds = 10;
  const int n_insertions = 20;

  // Baseline pick-and-place: no correction.
  {
    RngStream rng(spec.master_seed, "offset-ablation/baseline");
    int successes = 0;
    for (int t = 0; t < n_insertions; ++t) {
      const double dx = inject_grasp_error(rng);
      const bool ok = insert_peg(dx, 0.0, clearance);
      successes += ok ? 1 : 0;
      out.raw_records.push_back({{"experiment", "offset-ablation"},
                                 {"training_size", "baseline"},
                                 {"trial", t},
                                 {"offset_mm", dx},
                                 {"success", ok}});
    }
    ReportRow row;
    row.params = {{"training_size", "baseline"}};
    row.success_rate = static_cast<double>(successes) / n_insertions;
    out.rows.push_back(row);
  }

  for (int m : offset_training_grid()) {
    double mae_sum = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
      RngStream fit_rng(spec.master_seed,
                        "offset-ablation/M=" + std::to_string(m) + "/fit-" +
                            std::to_string(s));
      const OffsetEstimator est = fit_offset_estimator(m, model, fit_rng);
      RngStream eval_rng(spec.master_seed,
                         "offset-ablation/M=" + std::to_string(m) + "/eval-" +
                             std::to_string(s));
      const double mae = evaluate_offset_mae(est, 200, model, eval_rng);
      mae_sum += mae;
      out.raw_records.push_back({{"experiment", "offset-ablation"},
                                 {"training_size", m},
                                 {"seed_index", s},
                                 {"holdout_mae_mm", mae}});
    }

    RngStream fit_rng(spec.master_seed,
                      "offset-ablation/M=" + std::to_string(m) + "/fit-0");
    const OffsetEstimator est = fit_offset_estimator(m, model, fit_rng);
    RngStream ins_rng(spec.master_seed,
                      "offset-ablation/M=" + std::to_string(m) + "/insert");
    int successes = 0;
    for (int t = 0; t < n_insertions; ++t) {
      const double dx = inject_grasp_error(ins_rng);
      const double corr =
          est.estimate(observe_tactile(dx, model, ins_rng));
      const bool ok = insert_peg(dx, corr, clearance);
      successes += ok ? 1 : 0;
      out.raw_records.push_back({{"experiment", "offset-ablation"},
                                 {"training_size", m},
                                 {"trial", t},
                                 {"offset_mm", dx},
                                 {"correction_mm", corr},
                                 {"success", ok}});
    }

    ReportRow row;
    row.params = {{"training_size", std::to_string(m)}};
    row.success_rate = static_cast<double>(successes) / n_insertions;
    row.mean_error_mm = mae_sum / n_seeds;
    out.rows.push_back(row);
  }
  return out;
}

ExperimentOutput run_insertion_accuracy(const ExperimentSpec& spec) {
  ExperimentOutput out;
  const ForceModel model;
  const int per_class_train = 50;
  const int n_eval = spec.trials > 0 ? spec.trials : 200;

  RngStream train_rng(spec.master_seed, "insertion-accuracy/train");
  const InsertionPolicy policy =
      fit_insertion_policy(per_class_train, model, train_rng);

  const std::array<Vec2, 5> class_errors = {
      Vec2{kTrainingErrorMm, 0.0}, Vec2{-kTrainingErrorMm, 0.0},
      Vec2{0.0, kTrainingErrorMm}, Vec2{0.0, -kTrainingErrorMm},
      Vec2{0.0, 0.0}};
  std::array<std::array<int, 5>, 5> confusion{};
  RngStream eval_rng(spec.master_seed, "insertion-accuracy/eval");
  int correct = 0;
  for (int t = 0; t < n_eval; ++t) {
    const int truth = t % 5;
    const ForceTrace trace =
        synth_force_trace(class_errors[truth], model, eval_rng);
    const int predicted =
        static_cast<int>(predict_error_direction(policy, trace));
    confusion[truth][predicted] += 1;
    correct += predicted == truth ? 1 : 0;
  }

  ReportRow row;
  row.params = {{"per_class", std::to_string(per_class_train)},
                {"eval_traces", std::to_string(n_eval)}};
  row.success_rate = static_cast<double>(correct) / n_eval;
  out.rows.push_back(row);
  out.raw_records.push_back({{"experiment", "insertion-accuracy"},
                             {"confusion", confusion},
                             {"accuracy", row.success_rate.value()}});
  return out;
}

ExperimentOutput run_meshing_sweep(const ExperimentSpec& spec) {
  ExperimentOutput out;
  const double pitch = part_geometry(PartClass::GearSmall).tooth_pitch_angle_rad;
  const MeshController controller;  // jitter-free
  const double sweep = mesh_sweep_angle(controller, pitch);
  const std::vector<double> rhos = {0.5, 0.7, 0.9, 0.99, 0.999};
  const int theta_grid = 20;

  for (double rho : rhos) {
    int successes = 0;
    for (int k = 0; k < theta_grid; ++k) {
      const double theta0 = pitch * k / theta_grid;
      RngStream rng(spec.master_seed, "meshing-sweep/grid");
      const MeshResult res =
          mesh_gears(theta0, controller, rho, kDefaultMeshToleranceRad, pitch,
                     kMaxMeshAttempts, rng);
      const bool closed = closed_form_mesh_success(
          theta0, rho, sweep, kDefaultMeshToleranceRad, pitch,
          kMaxMeshAttempts);
      successes += res.success ? 1 : 0;
      out.raw_records.push_back({{"experiment", "meshing-sweep"},
                                 {"rho", rho},
                                 {"theta0_rad", theta0},
                                 {"success", res.success},
                                 {"attempts", res.attempts},
                                 {"closed_form", closed}});
    }
    ReportRow row;
    row.params = {{"rho", fmt(rho)}, {"theta0", "grid"}};
    row.success_rate = static_cast<double>(successes) / theta_grid;
    out.rows.push_back(row);
  }

  // Random initial offsets at the default transmission.
  const int n_random = spec.trials > 0 ? spec.trials : 1000;
  RngStream rng(spec.master_seed, "meshing-sweep/random");
  int successes = 0;
  double attempts_sum = 0.0;
  for (int t = 0; t < n_random; ++t) {
    const double theta0 = rng.uniform(0.0, pitch);
    const MeshResult res =
        mesh_gears(theta0, controller, kDefaultMeshTransmission,
                   kDefaultMeshToleranceRad, pitch, kMaxMeshAttempts, rng);
    successes += res.success ? 1 : 0;
    attempts_sum += res.attempts;
  }
  ReportRow row;
  row.params = {{"rho", fmt(kDefaultMeshTransmission)}, {"theta0", "random"}};
  row.success_rate = static_cast<double>(successes) / n_random;
  row.mean_interactions = attempts_sum / n_random;
  out.rows.push_back(row);
  return out;
}

ExperimentOutput run_end_to_end(const ExperimentSpec& spec) {
  ExperimentOutput out;
  const int n_trials = spec.trials > 0 ? spec.trials : 225;
  const WorkspaceConfig workspace;

  int done_count = 0;
  double interaction_sum = 0.0;
  std::map<std::string, double> stage_time_sum;
  std::map<std::string, int> failure_causes;

  for (int t = 0; t < n_trials; ++t) {
    const uint64_t trial_seed = RngStream::derive_seed(spec.master_seed, t);
    RngStream scene_rng(trial_seed, "scene-gen");
    const Scene scene = generate_scene(scene_rng, workspace);

    PipelineConfig config;
    config.master_seed = trial_seed;
    config.record_wall_time = false;  // deterministic raw records
    const PipelineResult res = run(scene, config);

    done_count += res.done() ? 1 : 0;
    if (!res.done()) failure_causes[res.failure_cause] += 1;

    json stage_times = json::object();
    double sim_time = 0.0;
    int interactions = 0;
    for (const auto& ev : res.events) {
      const double d = ev.detail.value("duration_s", 0.0);
      stage_times[ev.stage] = stage_times.value(ev.stage, 0.0) + d;
      stage_time_sum[ev.stage] += d;
      sim_time = ev.sim_time_s;
      if (ev.stage == "singulate") {
        interactions += ev.detail.value("interactions", 0);
      }
    }
    interaction_sum += interactions;
    out.raw_records.push_back({{"experiment", "end-to-end"},
                               {"trial", t},
                               {"seed", trial_seed},
                               {"done", res.done()},
                               {"failure_cause", res.failure_cause},
                               {"sim_time_s", sim_time},
                               {"stage_sim_time_s", stage_times}});
  }

  ReportRow row;
  row.params = {{"trials", std::to_string(n_trials)}};
  row.success_rate = static_cast<double>(done_count) / n_trials;
  row.mean_interactions = interaction_sum / n_trials;
  out.rows.push_back(row);

  json stage_means = json::object();
  for (const auto& [stage, total] : stage_time_sum) {
    stage_means[stage] = total / n_trials;
  }
  out.sidecar_extra["mean_stage_sim_time_s"] = stage_means;
  out.sidecar_extra["failure_causes"] = failure_causes;
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
  if (spec.id == "singulation-ablation") return run_singulation_ablation(spec);
  if (spec.id == "offset-ablation") return run_offset_ablation(spec);
  if (spec.id == "insertion-accuracy") return run_insertion_accuracy(spec);
  if (spec.id == "meshing-sweep") return run_meshing_sweep(spec);
  if (spec.id == "end-to-end") return run_end_to_end(spec);
  throw std::invalid_argument("unknown experiment id: " + spec.id);
}

// ---------------------------------------------------------------------------
// Report emission

void emit_report(const std::vector<ReportRow>& rows, const std::string& path,
                 const std::string& format) {
  if (rows.empty()) {
    throw std::invalid_argument("emit_report: no rows");
  }
  if (format != "csv") {
    throw std::invalid_argument("emit_report: unsupported format " + format);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_report: cannot open " + path);

  for (const auto& [name, value] : rows.front().params) out << name << ',';
  out << "success_rate,mean_interactions,mean_error_mm\n";
  for (const auto& row : rows) {
    for (const auto& [name, value] : row.params) out << value << ',';
    if (row.success_rate) out << fmt(*row.success_rate);
    out << ',';
    if (row.mean_interactions) out << fmt(*row.mean_interactions);
    out << ',';
    if (row.mean_error_mm) out << fmt(*row.mean_error_mm);
    out << '\n';
  }
  if (!out.good()) throw std::runtime_error("emit_report: write failed");
}

std::vector<ReportRow> read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_report: cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::vector<std::string> columns;
  {
    std::string col;
    for (char c : header) {
      if (c == ',') {
        columns.push_back(col);
        col.clear();
      } else {
        col += c;
      }
    }
    columns.push_back(col);
  }
  const std::size_t n_params = columns.size() - 3;

  std::vector<ReportRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(cell);
    ReportRow row;
    for (std::size_t i = 0; i < n_params; ++i) {
      row.params.emplace_back(columns[i], cells[i]);
    }
    auto opt = [&](std::size_t i) -> std::optional<double> {
      if (i >= cells.size() || cells[i].empty()) return std::nullopt;
      return std::stod(cells[i]);
    };
    row.success_rate = opt(n_params);
    row.mean_interactions = opt(n_params + 1);
    row.mean_error_mm = opt(n_params + 2);
    rows.push_back(row);
  }
  return rows;
}

void write_experiment(const ExperimentSpec& spec,
                      const ExperimentOutput& output) {
  fs::create_directories(spec.out_dir);
  const std::string base = (fs::path(spec.out_dir) / spec.id).string();
  emit_report(output.rows, base + ".csv");

  json sidecar = {
      {"experiment", spec.id},
      {"master_seed", spec.master_seed},
      {"trials", spec.trials},
      {"artifact_version", kArtifactVersion},
      {"timestamp_unix",
       std::chrono::duration_cast<std::chrono::seconds>(
           std::chrono::system_clock::now().time_since_epoch())
           .count()},
  };
  if (!spec.scenes_dir.empty()) sidecar["scenes_dir"] = spec.scenes_dir;
  if (!output.sidecar_extra.is_null()) sidecar["extra"] = output.sidecar_extra;
  json wall = json::array();
  for (const auto& row : output.rows) {
    if (row.mean_wall_time_s) {
      json entry = json::object();
      for (const auto& [k, v] : row.params) entry[k] = v;
      entry["mean_wall_time_s"] = *row.mean_wall_time_s;
      wall.push_back(entry);
    }
  }
  if (!wall.empty()) sidecar["mean_wall_time_s"] = wall;
  std::ofstream meta(base + ".meta.json");
  if (!meta) throw std::runtime_error("cannot open sidecar for " + base);
  meta << sidecar.dump(2) << '\n';

  std::ofstream raw(base + ".raw.jsonl");
  if (!raw) throw std::runtime_error("cannot open raw records for " + base);
  for (const auto& rec : output.raw_records) raw << rec.dump() << '\n';
}

}  // namespace gearbox
