// Synthetic perception: labeled point clouds sampled from part top
// surfaces plus Gaussian noise, and PCA pose estimation (centroid,
// covariance, principal axes, yaw from the in-plane minor axis).
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gearbox/core.hpp"
#include "gearbox/rng.hpp"

namespace gearbox {

inline constexpr int kMinCloudPoints = 10;
inline constexpr int kDefaultCloudPoints = 2000;
inline constexpr double kDefaultNoiseSigmaMm = 1.0;

// Gears are rotationally symmetric in plan view; estimates with in-plane
// eigenvalue spread below this ratio report yaw 0 and the degenerate flag.
inline constexpr double kDegeneracyRatio = 0.1;

struct LabeledCloud {
  std::vector<Eigen::Vector3d> points;
  PartClass label = PartClass::Peg1;
};

struct PrincipalAxes {
  std::array<double, 3> eigenvalues = {0.0, 0.0, 0.0};  // ascending
  std::array<Eigen::Vector3d, 3> eigenvectors;
};

struct PoseEstimate {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  PartClass label = PartClass::Peg1;
  bool degenerate = false;
  PrincipalAxes axes;
};

// n points uniform over the part's top surface at the given pose; all
// surface draws happen before any noise draws, so sigma = 0 consumes the
// same surface sequence as sigma > 0 with the same stream.
LabeledCloud sample_cloud(PartClass part, const Pose2D& pose, int n,
                          double noise_sigma_mm, RngStream& rng);

Eigen::Vector3d centroid(const LabeledCloud& cloud);
Eigen::Matrix3d covariance(const LabeledCloud& cloud);

// Eigenpairs of a symmetric PSD matrix, eigenvalues ascending. Sign
// convention: each eigenvector has a nonnegative component along the axis
// of its largest magnitude entry.
PrincipalAxes principal_axes(const Eigen::Matrix3d& C);

PoseEstimate estimate_pose(const LabeledCloud& cloud);

// Debug dump, one "x y z label" record per point.
void dump_cloud(const LabeledCloud& cloud, std::ostream& out);

}  // namespace gearbox
