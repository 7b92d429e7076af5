#include "gearbox/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gearbox {

PegGrasp plan_peg_grasp(const PoseEstimate& estimate,
                        const PartGeometry& geometry,
                        const PegGraspConfig& config) {
  if (!is_peg(estimate.label)) {
    throw std::invalid_argument("plan_peg_grasp: estimate is not a peg");
  }
  if (config.x_p_mm == 0.0) {
    throw std::invalid_argument(
        "plan_peg_grasp: zero grasp offset gives no pivot moment arm");
  }
  if (std::abs(config.x_p_mm) > geometry.peg_length_mm / 2.0) {
    throw std::invalid_argument("plan_peg_grasp: grasp point off the peg");
  }
  if (config.f_p_n <= 0.0) {
    throw std::invalid_argument("plan_peg_grasp: grasp force must be positive");
  }
  return PegGrasp{config.x_p_mm, config.z_p_mm, config.f_p_n};
}

bool simulate_reorientation(const PegGrasp& grasp, const PivotConstants& c) {
  if (c.friction_mu <= 0.0 || c.mass_kg <= 0.0) {
    throw std::invalid_argument("simulate_reorientation: nonphysical constants");
  }
  const double gravity_torque =
      c.mass_kg * c.gravity_mps2 * std::abs(grasp.x_p_mm);
  const double holding_torque = c.friction_mu * grasp.f_p_n * c.pad_radius_mm;
  return gravity_torque > holding_torque;
}

double inject_grasp_error(RngStream& rng) {
  return rng.uniform(-kGraspErrorRangeMm, kGraspErrorRangeMm);
}

namespace {

// Fixed gains/centers (generated once from an internal seed and frozen):
// tanh ramps of distinct steepness centered across the +/-10 mm range so
// every offset changes several coordinates.
struct EmbeddingParams {
  double gain;
  double center_mm;
  double scale;
};

constexpr std::array<EmbeddingParams, kTactileFeatureDim> kEmbedding = {{
    {0.55, -7.5, 1.00},
    {0.85, -4.5, 0.90},
    {0.40, -1.5, 1.10},
    {0.70, 0.0, 1.00},
    {0.45, 1.5, 0.95},
    {0.90, 4.5, 1.05},
    {0.60, 7.5, 0.85},
    {0.30, -9.0, 1.15},
}};

}  // namespace

TactileObservation tactile_embedding(double dx_mm) {
  TactileObservation obs;
  for (int j = 0; j < kTactileFeatureDim; ++j) {
    const auto& p = kEmbedding[j];
    obs.features[j] = p.scale * std::tanh(p.gain * (dx_mm - p.center_mm));
  }
  return obs;
}

TactileObservation observe_tactile(double dx_mm, const TactileModel& model,
                                   RngStream& rng) {
  if (std::abs(dx_mm) > kGraspErrorRangeMm) {
    throw std::invalid_argument("observe_tactile: offset outside +/-10 mm");
  }
  TactileObservation obs = tactile_embedding(dx_mm);
  if (model.sigma > 0.0) {
    for (double& f : obs.features) f += rng.normal(0.0, model.sigma);
  }
  return obs;
}

void OffsetEstimator::add_sample(const TactileObservation& obs, double dx_mm) {
  samples_.emplace_back(obs, dx_mm);
}

double OffsetEstimator::estimate(const TactileObservation& obs) const {
  if (samples_.empty()) {
    throw std::runtime_error("OffsetEstimator: not fitted");
  }
  const int k = std::min<int>(5, static_cast<int>(samples_.size()));
  // Partial sort of squared feature distances; ties keep insertion order.
  std::vector<std::pair<double, int>> dist;
  dist.reserve(samples_.size());
  for (int i = 0; i < static_cast<int>(samples_.size()); ++i) {
    double d2 = 0.0;
    for (int j = 0; j < kTactileFeatureDim; ++j) {
      const double d = obs.features[j] - samples_[i].first.features[j];
      d2 += d * d;
    }
    dist.emplace_back(d2, i);
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += samples_[dist[i].second].second;
  return std::clamp(sum / k, -kGraspErrorRangeMm, kGraspErrorRangeMm);
}

OffsetEstimator fit_offset_estimator(int training_size,
                                     const TactileModel& model,
                                     RngStream& rng) {
  if (training_size < 1) {
    throw std::invalid_argument("fit_offset_estimator: need at least 1 sample");
  }
  OffsetEstimator est;
  for (int i = 0; i < training_size; ++i) {
    const double dx = inject_grasp_error(rng);
    est.add_sample(observe_tactile(dx, model, rng), dx);
  }
  return est;
}

double estimate_offset(const OffsetEstimator& estimator,
                       const TactileObservation& obs) {
  return estimator.estimate(obs);
}

double evaluate_offset_mae(const OffsetEstimator& estimator, int n_eval,
                           const TactileModel& model, RngStream& rng) {
  double sum = 0.0;
  for (int i = 0; i < n_eval; ++i) {
    const double dx = inject_grasp_error(rng);
    const double predicted =
        estimator.estimate(observe_tactile(dx, model, rng));
    sum += std::abs(predicted - dx);
  }
  return sum / n_eval;
}

bool insert_peg(double offset_mm, double correction_mm, double clearance_mm) {
  return std::abs(offset_mm - correction_mm) <= clearance_mm;
}

bool insert_peg(const GraspState& state, double correction_mm,
                double clearance_mm) {
  return insert_peg(state.offset_mm, correction_mm, clearance_mm);
}

}  // namespace gearbox
