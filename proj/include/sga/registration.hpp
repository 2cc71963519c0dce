#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sga {

struct RigidTransform {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& x) const { return R * x + t; }
  Eigen::Matrix4d matrix() const;
};

struct RegistrationError {
  double rte = 0.0;  // meters
  double rre = 0.0;  // degrees
};

struct RansacParams {
  int iters = 256;
  double inlier_eps = 0.2;  // meters
  std::uint64_t seed = 0;
};

struct PointPair {
  Eigen::Vector3d a;
  Eigen::Vector3d b;
};

struct RigidEstimate {
  RigidTransform transform;  // maps A positions onto B
  std::vector<std::size_t> inliers;
};

// Least-squares rotation and translation mapping a onto b (cross-covariance
// SVD with reflection correction). Needs >= 3 non-collinear pairs.
RigidTransform fit_rigid(std::span<const PointPair> pairs);

RigidEstimate estimate_rigid(std::span<const PointPair> pairs, const RansacParams& params);

// Error of gt^-1 * est: rre is its rotation angle, rte its translation norm.
RegistrationError registration_error(const RigidTransform& est, const RigidTransform& gt);

struct SuccessBin {
  double max_rte;
  double max_rre;
};

// Reporting bins, strictest first.
inline constexpr SuccessBin kSuccessBins[] = {{0.5, 5.0}, {1.0, 10.0}, {2.0, 20.0}};

}  // namespace sga
