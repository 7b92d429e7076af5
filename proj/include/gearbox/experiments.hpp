// Scene generation and the Monte Carlo experiment runners: singulation
// sample-count ablation over the frozen scene benchmark, offset-estimator
// training-size ablation, insertion-policy accuracy, meshing parameter
// sweep and the end-to-end pipeline evaluation. Reports are delimited
// tables plus a metadata sidecar and per-trial raw records.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gearbox/pipeline.hpp"

namespace gearbox {

inline constexpr double kClutterBias = 0.5;
inline constexpr double kClutterDiscRadiusMm = 100.0;  // 200 mm disc
inline constexpr int kGenerationRejectionLimit = 10000;

class GenerationTimeout : public std::runtime_error {
 public:
  explicit GenerationTimeout(const std::string& what)
      : std::runtime_error(what) {}
};

// Rejection-sample a four-part scene with footprints fully on the table.
// With probability clutter_bias all parts land inside a central disc to
// force singulation.
Scene generate_scene(RngStream& rng, const WorkspaceConfig& workspace,
                     double clutter_bias = kClutterBias);

struct ExperimentSpec {
  std::string id;  // singulation-ablation | offset-ablation |
                   // insertion-accuracy | meshing-sweep | end-to-end
  uint64_t master_seed = 0;
  int trials = 0;          // 0 = experiment default
  std::string scenes_dir;  // frozen benchmark (singulation-ablation)
  std::string out_dir;
};

struct ReportRow {
  std::vector<std::pair<std::string, std::string>> params;
  std::optional<double> success_rate;
  std::optional<double> mean_interactions;
  std::optional<double> mean_error_mm;
  // Wall time is nondeterministic; it is reported in the metadata
  // sidecar so report bodies stay byte-identical across reruns.
  std::optional<double> mean_wall_time_s;
};

struct ExperimentOutput {
  std::vector<ReportRow> rows;
  std::vector<nlohmann::json> raw_records;  // per-trial, deterministic
  nlohmann::json sidecar_extra;
};

ExperimentOutput run_experiment(const ExperimentSpec& spec);

// Body: one fixed header line plus one line per row, stable formatting.
void emit_report(const std::vector<ReportRow>& rows, const std::string& path,
                 const std::string& format = "csv");
std::vector<ReportRow> read_report(const std::string& path);

// Body + sidecar + raw records under spec.out_dir.
void write_experiment(const ExperimentSpec& spec,
                      const ExperimentOutput& output);

std::vector<Scene> load_benchmark_scenes(const std::string& dir);

inline const std::vector<int>& singulation_sample_grid() {
  static const std::vector<int> grid = {1, 10, 100, 1000};
  return grid;
}
inline const std::vector<int>& offset_training_grid() {
  static const std::vector<int> grid = {10, 100, 1000};
  return grid;
}

}  // namespace gearbox
