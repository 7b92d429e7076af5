// Gear insertion from force traces (moving-average filter, nearest-
// centroid direction classifier, iterative correction loop) and gear
// meshing via compliant relative rotation with friction transmission.
#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "gearbox/core.hpp"
#include "gearbox/rng.hpp"

namespace gearbox {

inline constexpr int kForceRateHz = 280;
inline constexpr double kTraceSeconds = 3.0;
inline constexpr int kTraceLength = 840;  // round(280 * 3)
inline constexpr int kFilterWindow = 70;
inline constexpr double kInsertionErrorLimitMm = 5.0;
inline constexpr double kTrainingErrorMm = 4.0;  // classes at +/-4 mm

using ForceSample = std::array<double, 6>;  // fx fy fz tx ty tz (N, N mm)

struct ForceTrace {
  std::vector<ForceSample> samples;  // kTraceLength readings at 280 Hz
  Vec2 injected_error_mm;
};

// Contact reaction model: lateral force means -gain * error over the
// whole trace, constant axial contact force, iid Gaussian noise.
struct ForceModel {
  double lateral_gain_n_per_mm = 0.5;
  double axial_contact_n = 5.0;
  double sigma_n = 0.3;
};

ForceTrace synth_force_trace(const Vec2& error_mm, const ForceModel& model,
                             RngStream& rng);

// Causal per-channel moving mean; output length = input - window + 1.
std::vector<ForceSample> moving_average(const std::vector<ForceSample>& samples,
                                        int window = kFilterWindow);

// Per-channel means of the filtered trace.
ForceSample trace_features(const ForceTrace& trace,
                           int window = kFilterWindow);

enum class ErrorDirection { PlusX, MinusX, PlusY, MinusY, Centered };

std::string to_string(ErrorDirection dir);

// Nearest-centroid classifier on filtered features. Direction classes
// compare by lateral-force direction (scale-free, so small residuals in
// the correction loop still classify); a lateral magnitude below the
// contact gate reads as centered.
struct InsertionPolicy {
  std::array<ForceSample, 5> centroids{};  // indexed by ErrorDirection
  std::array<Vec2, 4> lateral_directions{};
  double center_gate_n = 0.1;
  bool fitted = false;
};

// Trains on n_per_class traces at errors (+/-4,0), (0,+/-4), (0,0) mm.
InsertionPolicy fit_insertion_policy(int n_per_class, const ForceModel& model,
                                     RngStream& rng);

ErrorDirection predict_error_direction(const InsertionPolicy& policy,
                                       const ForceTrace& trace);

struct GearInsertResult {
  bool success = false;
  int iterations = 0;  // corrections applied
};

// Iterative insertion: succeed when the residual is inside the radial
// clearance, otherwise probe, classify the error direction and step
// against it. Fails after max_iters corrections.
GearInsertResult insert_gear_loop(const Vec2& true_error_mm,
                                  const InsertionPolicy& policy,
                                  double step_mm, double clearance_mm,
                                  int max_iters, const ForceModel& model,
                                  RngStream& rng);

// Test seam: same loop with an arbitrary direction predictor.
using DirectionPredictor = std::function<ErrorDirection(const ForceTrace&)>;
GearInsertResult insert_gear_loop(const Vec2& true_error_mm,
                                  const DirectionPredictor& predict,
                                  double step_mm, double clearance_mm,
                                  int max_iters, const ForceModel& model,
                                  RngStream& rng);

// ---------------------------------------------------------------------------
// Gear meshing

// Compliant rotation controller u(f, r_d): per attempt the small gear
// sweeps by a saturating function of force and application radius,
// normalized to 1.2 tooth pitch at the nominal setting.
struct MeshController {
  double force_n = 5.0;
  double radial_mm = 20.0;
  double sweep_jitter = 0.0;  // relative std of per-attempt sweep
};

inline constexpr double kNominalSweepPitch = 1.2;
inline constexpr double kDefaultMeshTransmission = 0.7;
inline constexpr double kDefaultMeshToleranceRad = 0.01;
inline constexpr int kMaxMeshAttempts = 5;

// Small-gear rotation per attempt (radians).
double mesh_sweep_angle(const MeshController& controller, double pitch_rad);

struct MeshResult {
  bool success = false;
  int attempts = 0;
};

// Each attempt rotates the small gear while the large gear co-rotates by
// the transmission fraction rho; the relative tooth offset shrinks by
// (1 - rho) * sweep per attempt with continuous alignment checking.
MeshResult mesh_gears(double theta0_rad, const MeshController& controller,
                      double transmission_rho, double tol_angle_rad,
                      double pitch_rad, int max_attempts, RngStream& rng);

// Independent closed form of the success region for jitter-free sweeps.
bool closed_form_mesh_success(double theta0_rad, double transmission_rho,
                              double sweep_rad, double tol_angle_rad,
                              double pitch_rad, int max_attempts);

// Debug dump, one "t fx fy fz tx ty tz" row per sample.
void dump_trace(const ForceTrace& trace, std::ostream& out);

}  // namespace gearbox
