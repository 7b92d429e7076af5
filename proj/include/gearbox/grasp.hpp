// Peg grasping and in-hand manipulation: pivot-to-vertical reorientation
// under gravity, grasp-error injection, a synthetic tactile observation
// model and the k-NN in-hand offset estimator trained on it.
#pragma once

#include <vector>

#include "gearbox/core.hpp"
#include "gearbox/perception.hpp"
#include "gearbox/rng.hpp"

namespace gearbox {

inline constexpr double kGraspErrorRangeMm = 10.0;  // injected dx ~ U(-10, 10)
inline constexpr int kTactileFeatureDim = 8;

// Grasp on the peg: offset along the peg axis from the center of mass,
// height on the peg, and grip force.
struct PegGrasp {
  double x_p_mm = 0.0;
  double z_p_mm = 0.0;
  double f_p_n = 0.0;
};

struct PegGraspConfig {
  double x_p_mm = 20.0;
  double z_p_mm = 7.0;
  double f_p_n = 8.0;
};

// Quasi-static pivot constants. Pad radius 4 mm so the default grasp's
// gravity torque (m g x_p = 19.6 N mm) beats the holding torque
// (mu f_p r_pad = 16 N mm).
struct PivotConstants {
  double mass_kg = 0.1;
  double friction_mu = 0.5;
  double pad_radius_mm = 4.0;
  double gravity_mps2 = 9.81;
};

struct GraspState {
  PartClass part = PartClass::Peg1;
  double offset_mm = 0.0;  // in-hand error along the local gripper x axis
  bool reoriented = false;
};

// Grasp in the estimated peg frame; the offset grasp point makes the peg
// pivot to vertical when lifted.
PegGrasp plan_peg_grasp(const PoseEstimate& estimate,
                        const PartGeometry& geometry,
                        const PegGraspConfig& config = {});

// Reorients iff gravity torque about the grip line exceeds the frictional
// holding torque: m g |x_p| > mu f_p r_pad.
bool simulate_reorientation(const PegGrasp& grasp, const PivotConstants& c);

// Grasp error along the local gripper x axis, U(-10, 10) mm.
double inject_grasp_error(RngStream& rng);

struct TactileObservation {
  std::array<double, kTactileFeatureDim> features{};
};

struct TactileModel {
  double sigma = 0.1;  // feature-space noise
};

// The deterministic embedding h: per-coordinate tanh curves with distinct
// gains and centers spread over the +/-10 mm range.
TactileObservation tactile_embedding(double dx_mm);

// h(dx) + iid Gaussian feature noise.
TactileObservation observe_tactile(double dx_mm, const TactileModel& model,
                                   RngStream& rng);

// k-nearest-neighbor local-average regressor over (observation, dx) pairs.
class OffsetEstimator {
 public:
  OffsetEstimator() = default;

  void add_sample(const TactileObservation& obs, double dx_mm);
  bool fitted() const { return !samples_.empty(); }
  int training_count() const { return static_cast<int>(samples_.size()); }

  // Mean dx of the k = min(5, M) nearest training observations, clamped
  // to the +/-10 mm injection range. Throws when not fitted.
  double estimate(const TactileObservation& obs) const;

 private:
  std::vector<std::pair<TactileObservation, double>> samples_;
};

// Draw M (observation, dx) pairs through inject/observe and fit.
OffsetEstimator fit_offset_estimator(int training_size,
                                     const TactileModel& model,
                                     RngStream& rng);

double estimate_offset(const OffsetEstimator& estimator,
                       const TactileObservation& obs);

// Held-out mean absolute error of the estimator over n fresh draws.
double evaluate_offset_mae(const OffsetEstimator& estimator, int n_eval,
                           const TactileModel& model, RngStream& rng);

// Success iff the corrected residual stays within the radial clearance.
bool insert_peg(double offset_mm, double correction_mm, double clearance_mm);
bool insert_peg(const GraspState& state, double correction_mm,
                double clearance_mm);

}  // namespace gearbox
