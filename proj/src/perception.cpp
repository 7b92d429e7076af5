#include "gearbox/perception.hpp"

#include <ostream>
#include <stdexcept>

namespace gearbox {

LabeledCloud sample_cloud(PartClass part, const Pose2D& pose, int n,
                          double noise_sigma_mm, RngStream& rng) {
  if (n < kMinCloudPoints) {
    throw std::invalid_argument("sample_cloud: need at least 10 points");
  }
  const PartGeometry& geom = part_geometry(part);
  LabeledCloud cloud;
  cloud.label = part;
  cloud.points.reserve(n);

  for (int i = 0; i < n; ++i) {
    Vec2 local;
    if (is_peg(part)) {
      // Lying peg: rectangle length x diameter, long axis along local x.
      local.x = rng.uniform(-geom.peg_length_mm / 2.0, geom.peg_length_mm / 2.0);
      local.y = rng.uniform(-geom.peg_diameter_mm / 2.0,
                            geom.peg_diameter_mm / 2.0);
    } else {
      const double r = geom.footprint_radius_mm * std::sqrt(rng.uniform01());
      const double ang = rng.uniform(0.0, 2.0 * kPi);
      local = {r * std::cos(ang), r * std::sin(ang)};
    }
    const Vec2 w = transform_point(pose, local);
    cloud.points.emplace_back(w.x, w.y, geom.top_height_mm);
  }
  if (noise_sigma_mm > 0.0) {
    for (auto& p : cloud.points) {
      p.x() += rng.normal(0.0, noise_sigma_mm);
      p.y() += rng.normal(0.0, noise_sigma_mm);
      p.z() += rng.normal(0.0, noise_sigma_mm);
    }
  }
  return cloud;
}

Eigen::Vector3d centroid(const LabeledCloud& cloud) {
  if (cloud.points.empty()) {
    throw std::invalid_argument("centroid: empty cloud");
  }
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : cloud.points) sum += p;
  return sum / static_cast<double>(cloud.points.size());
}

Eigen::Matrix3d covariance(const LabeledCloud& cloud) {
  if (cloud.points.size() < 2) {
    throw std::invalid_argument("covariance: need at least 2 points");
  }
  const Eigen::Vector3d mean = centroid(cloud);
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
  for (const auto& p : cloud.points) {
    const Eigen::Vector3d d = p - mean;
    C += d * d.transpose();
  }
  return C / static_cast<double>(cloud.points.size());
}

PrincipalAxes principal_axes(const Eigen::Matrix3d& C) {
  const double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::invalid_argument("principal_axes: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(C);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("principal_axes: eigendecomposition failed");
  }
  PrincipalAxes axes;
  for (int l = 0; l < 3; ++l) {
    axes.eigenvalues[l] = solver.eigenvalues()(l);
    Eigen::Vector3d v = solver.eigenvectors().col(l);
    int dominant = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(v(i)) > std::abs(v(dominant))) dominant = i;
    }
    if (v(dominant) < 0.0) v = -v;
    axes.eigenvectors[l] = v;
  }
  return axes;
}

PoseEstimate estimate_pose(const LabeledCloud& cloud) {
  PoseEstimate est;
  est.label = cloud.label;
  est.position = centroid(cloud);
  est.axes = principal_axes(covariance(cloud));

  // v0 is the surface normal of the tabletop patch; the in-plane minor
  // axis is v1. The part's long axis is perpendicular to it, so yaw is
  // the minor-axis angle rotated a quarter turn, folded to (-pi/2, pi/2].
  const double l1 = est.axes.eigenvalues[1];
  const double l2 = est.axes.eigenvalues[2];
  est.degenerate = l2 <= 0.0 || (l2 - l1) / l2 < kDegeneracyRatio;
  if (est.degenerate) {
    est.yaw = 0.0;
  } else {
    const Eigen::Vector3d& v1 = est.axes.eigenvectors[1];
    const double in_plane = std::hypot(v1.x(), v1.y());
    est.yaw = in_plane < 1e-12
                  ? 0.0
                  : fold_half_pi(std::atan2(v1.y(), v1.x()) + kPi / 2.0);
  }
  return est;
}

void dump_cloud(const LabeledCloud& cloud, std::ostream& out) {
  for (const auto& p : cloud.points) {
    out << p.x() << ' ' << p.y() << ' ' << p.z() << ' '
        << to_string(cloud.label) << '\n';
  }
}

}  // namespace gearbox
