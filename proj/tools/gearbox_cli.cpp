// Command-line entry points: scene generation, standalone singulation,
// estimator/policy training, pipeline runs and the experiment runners.
// Output directory defaults to $GEARBOX_OUT_DIR (".": current directory).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gearbox/experiments.hpp"
#include "gearbox/scene_io.hpp"
#include "gearbox/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("GEARBOX_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : ".";
}

int cmd_gen_scenes(int count, uint64_t seed, const std::string& out_dir,
                   double clutter_bias) {
  fs::create_directories(out_dir);
  const gearbox::WorkspaceConfig workspace;
  for (int i = 0; i < count; ++i) {
    const uint64_t scene_seed = gearbox::RngStream::derive_seed(seed, i);
    gearbox::RngStream rng(scene_seed, "scene-gen");
    gearbox::SceneFile file;
    file.seed = scene_seed;
    file.scene = gearbox::generate_scene(rng, workspace, clutter_bias);
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%03d.json", i);
    gearbox::save_scene(file, (fs::path(out_dir) / name).string());
  }
  json manifest = {{"count", count},
                   {"master_seed", seed},
                   {"clutter_bias", clutter_bias},
                   {"clutter_disc_radius_mm", gearbox::kClutterDiscRadiusMm},
                   {"artifact_version", gearbox::kArtifactVersion}};
  std::ofstream mf(fs::path(out_dir) / "manifest.json");
  mf << manifest.dump(2) << '\n';
  std::cout << "wrote " << count << " scenes to " << out_dir << '\n';
  return 0;
}

int cmd_singulate(const std::string& scene_path, int samples, uint64_t seed,
                  int max_interactions, double p_slip, bool with_perception,
                  const std::string& out_path) {
  const gearbox::Scene scene = gearbox::load_scene(scene_path).scene;
  gearbox::RngStream rng(seed, "singulate-cli");
  gearbox::PerceptionChannel perception;
  perception.enabled = with_perception;
  const gearbox::SingulationResult res = gearbox::singulate(
      scene, gearbox::CostWeights{}, samples, max_interactions,
      gearbox::GripperFootprint{}, gearbox::SlipModel{p_slip}, rng,
      perception);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    out = &file;
  }
  for (const auto& rec : res.records) {
    json j = {{"interaction", rec.interaction},
              {"chosen_part", gearbox::to_string(rec.action.part)},
              {"dx", rec.action.dx_mm},
              {"dy", rec.action.dy_mm},
              {"cost", rec.cost},
              {"slipped", rec.slipped},
              {"pegs_graspable", rec.pegs_graspable_after}};
    *out << j.dump() << '\n';
  }
  json summary = {{"success", res.success}, {"interactions", res.interactions}};
  *out << summary.dump() << '\n';
  return 0;
}

int cmd_fit_offset(int train_size, uint64_t seed, double sigma, int n_eval) {
  gearbox::TactileModel model;
  model.sigma = sigma;
  gearbox::RngStream fit_rng(seed, "fit-offset/train");
  const gearbox::OffsetEstimator est =
      gearbox::fit_offset_estimator(train_size, model, fit_rng);
  gearbox::RngStream eval_rng(seed, "fit-offset/eval");
  const double mae = gearbox::evaluate_offset_mae(est, n_eval, model, eval_rng);
  json j = {{"M", train_size}, {"holdout_mae_mm", mae}};
  std::cout << j.dump() << '\n';
  return 0;
}

int cmd_fit_insertion(int per_class, double sigma, uint64_t seed, int n_eval) {
  gearbox::ForceModel model;
  model.sigma_n = sigma;
  gearbox::RngStream train_rng(seed, "fit-insertion/train");
  const gearbox::InsertionPolicy policy =
      gearbox::fit_insertion_policy(per_class, model, train_rng);

  const std::array<gearbox::Vec2, 5> class_errors = {
      gearbox::Vec2{4.0, 0.0}, gearbox::Vec2{-4.0, 0.0},
      gearbox::Vec2{0.0, 4.0}, gearbox::Vec2{0.0, -4.0},
      gearbox::Vec2{0.0, 0.0}};
  std::array<std::array<int, 5>, 5> confusion{};
  gearbox::RngStream eval_rng(seed, "fit-insertion/eval");
  int correct = 0;
  for (int t = 0; t < n_eval; ++t) {
    const int truth = t % 5;
    const auto trace =
        gearbox::synth_force_trace(class_errors[truth], model, eval_rng);
    const int pred = static_cast<int>(
        gearbox::predict_error_direction(policy, trace));
    confusion[truth][pred] += 1;
    correct += pred == truth ? 1 : 0;
  }
  json j = {{"accuracy", static_cast<double>(correct) / n_eval},
            {"confusion", confusion}};
  std::cout << j.dump() << '\n';
  return 0;
}

int cmd_pipeline_run(const std::string& scene_path, uint64_t seed,
                     const std::string& config_path,
                     const std::string& log_path) {
  gearbox::PipelineConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config " << config_path << '\n';
      return 1;
    }
    config = gearbox::pipeline_config_from_json(json::parse(in));
  }
  config.master_seed = seed;
  const gearbox::Scene scene = gearbox::load_scene(scene_path).scene;
  const gearbox::PipelineResult res = gearbox::run(scene, config);

  if (!log_path.empty()) {
    std::ofstream log(log_path);
    gearbox::write_event_log(res.events, log);
  } else {
    gearbox::write_event_log(res.events, std::cout);
  }
  std::cerr << (res.done() ? "done" : "failed at " + res.failure_cause)
            << '\n';
  return 0;
}

int cmd_experiment(const std::string& id, uint64_t seed, int trials,
                   const std::string& scenes_dir, const std::string& out_dir) {
  gearbox::ExperimentSpec spec;
  spec.id = id;
  spec.master_seed = seed;
  spec.trials = trials;
  spec.scenes_dir = scenes_dir;
  spec.out_dir = out_dir;
  const gearbox::ExperimentOutput output = gearbox::run_experiment(spec);
  gearbox::write_experiment(spec, output);
  std::cout << "experiment " << id << ": " << output.rows.size()
            << " report rows, " << output.raw_records.size()
            << " raw records -> " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar gearbox assembly simulation and planning suite"};
  app.require_subcommand(1);

  // gen-scenes
  int count = 100;
  uint64_t seed = 7;
  std::string out_dir = default_out_dir();
  double clutter_bias = gearbox::kClutterBias;
  auto* gen = app.add_subcommand("gen-scenes", "Generate random scene files");
  gen->add_option("--count", count);
  gen->add_option("--seed", seed);
  gen->add_option("--out", out_dir);
  gen->add_option("--clutter-bias", clutter_bias);

  // singulate
  std::string scene_path;
  int samples = gearbox::kDefaultPlannerSamples;
  int max_interactions = gearbox::kDefaultMaxInteractions;
  double p_slip = 0.0;
  bool with_perception = false;
  std::string singulate_out;
  auto* sing = app.add_subcommand("singulate", "Singulate one scene");
  sing->add_option("--scene", scene_path)->required();
  sing->add_option("--samples", samples);
  sing->add_option("--seed", seed);
  sing->add_option("--max-interactions", max_interactions);
  sing->add_option("--p-slip", p_slip);
  sing->add_flag("--perception", with_perception);
  sing->add_option("--out", singulate_out);

  // fit-offset
  int train_size = 100;
  double tactile_sigma = gearbox::TactileModel{}.sigma;
  int eval_n = 200;
  auto* fo = app.add_subcommand("fit-offset", "Fit the in-hand offset estimator");
  fo->add_option("--train-size", train_size);
  fo->add_option("--seed", seed);
  fo->add_option("--sigma", tactile_sigma);
  fo->add_option("--eval", eval_n);

  // fit-insertion
  int per_class = 50;
  double force_sigma = gearbox::ForceModel{}.sigma_n;
  auto* fi = app.add_subcommand("fit-insertion", "Fit the gear insertion policy");
  fi->add_option("--per-class", per_class);
  fi->add_option("--sigma", force_sigma);
  fi->add_option("--seed", seed);
  fi->add_option("--eval", eval_n);

  // pipeline run
  std::string config_path, log_path;
  auto* pipe = app.add_subcommand("pipeline", "Pipeline commands");
  auto* pipe_run = pipe->add_subcommand("run", "Run the assembly pipeline");
  pipe_run->add_option("--scene", scene_path)->required();
  pipe_run->add_option("--seed", seed);
  pipe_run->add_option("--config", config_path);
  pipe_run->add_option("--log", log_path);

  // experiment
  std::string experiment_id, scenes_dir;
  int trials = 0;
  auto* exp = app.add_subcommand("experiment", "Run a named experiment");
  exp->add_option("id", experiment_id)->required();
  exp->add_option("--seed", seed);
  exp->add_option("--trials", trials);
  exp->add_option("--scenes", scenes_dir);
  exp->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_scenes(count, seed, out_dir, clutter_bias);
    if (sing->parsed()) {
      return cmd_singulate(scene_path, samples, seed, max_interactions, p_slip,
                           with_perception, singulate_out);
    }
    if (fo->parsed()) return cmd_fit_offset(train_size, seed, tactile_sigma, eval_n);
    if (fi->parsed()) return cmd_fit_insertion(per_class, force_sigma, seed, eval_n);
    if (pipe->parsed()) return cmd_pipeline_run(scene_path, seed, config_path, log_path);
    if (exp->parsed()) {
      return cmd_experiment(experiment_id, seed, trials, scenes_dir, out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
