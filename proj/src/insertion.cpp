#include "gearbox/insertion.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gearbox {

std::string to_string(ErrorDirection dir) {
  switch (dir) {
    case ErrorDirection::PlusX: return "+x";
    case ErrorDirection::MinusX: return "-x";
    case ErrorDirection::PlusY: return "+y";
    case ErrorDirection::MinusY: return "-y";
    case ErrorDirection::Centered: return "centered";
  }
  return "unknown";
}

ForceTrace synth_force_trace(const Vec2& error_mm, const ForceModel& model,
                             RngStream& rng) {
  if (std::abs(error_mm.x) > kInsertionErrorLimitMm ||
      std::abs(error_mm.y) > kInsertionErrorLimitMm) {
    throw std::invalid_argument("synth_force_trace: error outside +/-5 mm");
  }
  ForceTrace trace;
  trace.injected_error_mm = error_mm;
  trace.samples.resize(kTraceLength);
  const double fx = -model.lateral_gain_n_per_mm * error_mm.x;
  const double fy = -model.lateral_gain_n_per_mm * error_mm.y;
  for (auto& s : trace.samples) {
    s = {fx, fy, model.axial_contact_n, 0.0, 0.0, 0.0};
    if (model.sigma_n > 0.0) {
      for (double& v : s) v += rng.normal(0.0, model.sigma_n);
    }
  }
  return trace;
}

std::vector<ForceSample> moving_average(const std::vector<ForceSample>& samples,
                                        int window) {
  if (window < 1 || window > static_cast<int>(samples.size())) {
    throw std::invalid_argument("moving_average: window out of range");
  }
  const int n = static_cast<int>(samples.size());
  std::vector<ForceSample> out(n - window + 1);
  ForceSample acc{};
  for (int i = 0; i < window; ++i) {
    for (int c = 0; c < 6; ++c) acc[c] += samples[i][c];
  }
  for (int c = 0; c < 6; ++c) out[0][c] = acc[c] / window;
  for (int i = window; i < n; ++i) {
    for (int c = 0; c < 6; ++c) {
      acc[c] += samples[i][c] - samples[i - window][c];
      out[i - window + 1][c] = acc[c] / window;
    }
  }
  return out;
}

ForceSample trace_features(const ForceTrace& trace, int window) {
  const auto filtered = moving_average(trace.samples, window);
  ForceSample mean{};
  for (const auto& s : filtered) {
    for (int c = 0; c < 6; ++c) mean[c] += s[c];
  }
  for (int c = 0; c < 6; ++c) mean[c] /= static_cast<double>(filtered.size());
  return mean;
}

namespace {

const std::array<Vec2, 5> kClassErrors = {
    Vec2{kTrainingErrorMm, 0.0}, Vec2{-kTrainingErrorMm, 0.0},
    Vec2{0.0, kTrainingErrorMm}, Vec2{0.0, -kTrainingErrorMm},
    Vec2{0.0, 0.0}};

Vec2 unit_or(const Vec2& v, const Vec2& fallback) {
  const double n = v.norm();
  return n > 1e-12 ? v * (1.0 / n) : fallback;
}

// Canonical lateral reaction directions (error +x pushes the sensor -x).
const std::array<Vec2, 4> kCanonicalDirections = {
    Vec2{-1.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.0, -1.0}, Vec2{0.0, 1.0}};

}  // namespace

InsertionPolicy fit_insertion_policy(int n_per_class, const ForceModel& model,
                                     RngStream& rng) {
  if (n_per_class < 1) {
    throw std::invalid_argument("fit_insertion_policy: need >= 1 per class");
  }
  InsertionPolicy policy;
  for (int cls = 0; cls < 5; ++cls) {
    ForceSample mean{};
    for (int i = 0; i < n_per_class; ++i) {
      const ForceTrace t = synth_force_trace(kClassErrors[cls], model, rng);
      const ForceSample f = trace_features(t);
      for (int c = 0; c < 6; ++c) mean[c] += f[c];
    }
    for (int c = 0; c < 6; ++c) mean[c] /= n_per_class;
    policy.centroids[cls] = mean;
  }
  for (int d = 0; d < 4; ++d) {
    policy.lateral_directions[d] =
        unit_or({policy.centroids[d][0], policy.centroids[d][1]},
                kCanonicalDirections[d]);
  }
  policy.fitted = true;
  return policy;
}

ErrorDirection predict_error_direction(const InsertionPolicy& policy,
                                       const ForceTrace& trace) {
  if (!policy.fitted) {
    throw std::runtime_error("predict_error_direction: policy not fitted");
  }
  const ForceSample f = trace_features(trace);
  const Vec2 lateral{f[0], f[1]};
  if (lateral.norm() < policy.center_gate_n) return ErrorDirection::Centered;
  const Vec2 dir = lateral * (1.0 / lateral.norm());
  int best = 0;
  double best_dot = dir.dot(policy.lateral_directions[0]);
  for (int d = 1; d < 4; ++d) {
    const double dot = dir.dot(policy.lateral_directions[d]);
    if (dot > best_dot) {
      best = d;
      best_dot = dot;
    }
  }
  return static_cast<ErrorDirection>(best);
}

GearInsertResult insert_gear_loop(const Vec2& true_error_mm,
                                  const DirectionPredictor& predict,
                                  double step_mm, double clearance_mm,
                                  int max_iters, const ForceModel& model,
                                  RngStream& rng) {
  if (max_iters < 1) {
    throw std::invalid_argument("insert_gear_loop: max_iters must be >= 1");
  }
  GearInsertResult result;
  Vec2 residual = true_error_mm;
  for (int it = 0; it <= max_iters; ++it) {
    if (residual.norm() <= clearance_mm) {
      result.success = true;
      result.iterations = it;
      return result;
    }
    if (it == max_iters) break;
    // Contact reaction saturates; keep the probe inside the model domain
    // even when corrections have wandered past it.
    const Vec2 probe{
        std::clamp(residual.x, -kInsertionErrorLimitMm, kInsertionErrorLimitMm),
        std::clamp(residual.y, -kInsertionErrorLimitMm, kInsertionErrorLimitMm)};
    const ForceTrace trace = synth_force_trace(probe, model, rng);
    switch (predict(trace)) {
      case ErrorDirection::PlusX: residual.x -= step_mm; break;
      case ErrorDirection::MinusX: residual.x += step_mm; break;
      case ErrorDirection::PlusY: residual.y -= step_mm; break;
      case ErrorDirection::MinusY: residual.y += step_mm; break;
      case ErrorDirection::Centered: break;  // insertion retry, no move
    }
    result.iterations = it + 1;
  }
  result.success = false;
  return result;
}

GearInsertResult insert_gear_loop(const Vec2& true_error_mm,
                                  const InsertionPolicy& policy,
                                  double step_mm, double clearance_mm,
                                  int max_iters, const ForceModel& model,
                                  RngStream& rng) {
  return insert_gear_loop(
      true_error_mm,
      [&policy](const ForceTrace& t) {
        return predict_error_direction(policy, t);
      },
      step_mm, clearance_mm, max_iters, model, rng);
}

double mesh_sweep_angle(const MeshController& controller, double pitch_rad) {
  // Saturating force gain, linear in the application radius, normalized
  // to kNominalSweepPitch at the default controller setting.
  const MeshController nominal;
  auto gain = [](double f) { return 1.0 - std::exp(-f / 5.0); };
  const double scale = (gain(controller.force_n) * controller.radial_mm) /
                       (gain(nominal.force_n) * nominal.radial_mm);
  return kNominalSweepPitch * pitch_rad * scale;
}

namespace {

double pitch_distance(double theta, double pitch) {
  const double t = std::fmod(std::fmod(theta, pitch) + pitch, pitch);
  return std::min(t, pitch - t);
}

}  // namespace

MeshResult mesh_gears(double theta0_rad, const MeshController& controller,
                      double transmission_rho, double tol_angle_rad,
                      double pitch_rad, int max_attempts, RngStream& rng) {
  if (theta0_rad < 0.0 || theta0_rad >= pitch_rad) {
    throw std::invalid_argument("mesh_gears: theta0 outside [0, pitch)");
  }
  if (transmission_rho <= 0.0 || transmission_rho >= 1.0) {
    throw std::invalid_argument("mesh_gears: transmission must be in (0, 1)");
  }
  MeshResult result;
  double theta = theta0_rad;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    result.attempts = attempt;
    if (pitch_distance(theta, pitch_rad) <= tol_angle_rad) {
      result.success = true;
      return result;
    }
    double sweep = mesh_sweep_angle(controller, pitch_rad);
    if (controller.sweep_jitter > 0.0) {
      sweep *= std::max(0.0, 1.0 + rng.normal(0.0, controller.sweep_jitter));
    }
    const double relative = (1.0 - transmission_rho) * sweep;
    // The offset decreases continuously; alignment is caught the moment
    // the sweep crosses it (no overshoot past the tolerance band).
    if (theta - relative <= tol_angle_rad) {
      result.success = true;
      return result;
    }
    theta -= relative;
  }
  result.success = false;
  return result;
}

bool closed_form_mesh_success(double theta0_rad, double transmission_rho,
                              double sweep_rad, double tol_angle_rad,
                              double pitch_rad, int max_attempts) {
  if (pitch_distance(theta0_rad, pitch_rad) <= tol_angle_rad) return true;
  const double total = max_attempts * (1.0 - transmission_rho) * sweep_rad;
  return total >= theta0_rad - tol_angle_rad;
}

void dump_trace(const ForceTrace& trace, std::ostream& out) {
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    out << static_cast<double>(i) / kForceRateHz;
    for (double v : trace.samples[i]) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace gearbox
