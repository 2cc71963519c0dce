#include "sga/registration.hpp"

#include "sga/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

namespace sga {

namespace {

constexpr double kCollinearTol = 1e-9;

bool collinear(std::span<const PointPair> pairs) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pairs) mean += p.a;
  mean /= static_cast<double>(pairs.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pairs) cov += (p.a - mean) * (p.a - mean).transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov);
  const auto& s = svd.singularValues();
  return s[0] <= 0.0 || s[1] <= kCollinearTol * s[0];
}

}  // namespace

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = R;
  m.topRightCorner<3, 1>() = t;
  return m;
}

RigidTransform fit_rigid(std::span<const PointPair> pairs) {
  if (pairs.size() < 3) {
    throw InsufficientCorrespondences("rigid fit needs at least 3 correspondences, got " +
                                      std::to_string(pairs.size()));
  }
  if (collinear(pairs)) throw DegenerateGeometry("rigid fit: correspondences are collinear");

  Eigen::Vector3d ca = Eigen::Vector3d::Zero(), cb = Eigen::Vector3d::Zero();
  for (const auto& p : pairs) {
    ca += p.a;
    cb += p.b;
  }
  ca /= static_cast<double>(pairs.size());
  cb /= static_cast<double>(pairs.size());
  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
  for (const auto& p : pairs) H += (p.a - ca) * (p.b - cb).transpose();

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& U = svd.matrixU();
  const Eigen::Matrix3d& V = svd.matrixV();
  Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
  if ((V * U.transpose()).determinant() < 0.0) D(2, 2) = -1.0;

  RigidTransform out;
  out.R = V * D * U.transpose();
  out.t = cb - out.R * ca;
  return out;
}

RigidEstimate estimate_rigid(std::span<const PointPair> pairs, const RansacParams& params) {
  if (pairs.size() < 3) {
    throw InsufficientCorrespondences("estimate_rigid needs at least 3 correspondences, got " +
                                      std::to_string(pairs.size()));
  }
  if (collinear(pairs)) throw DegenerateGeometry("estimate_rigid: correspondences are collinear");
  if (params.iters < 1 || !(params.inlier_eps > 0.0)) {
    throw InvalidParameter("estimate_rigid: iters must be >= 1 and inlier_eps > 0");
  }

  auto inliers_of = [&](const RigidTransform& T) {
    std::vector<std::size_t> in;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if ((T.apply(pairs[k].a) - pairs[k].b).norm() <= params.inlier_eps) in.push_back(k);
    }
    return in;
  };

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  std::vector<std::size_t> best;
  for (int it = 0; it < params.iters; ++it) {
    std::size_t s[3] = {pick(rng), pick(rng), pick(rng)};
    if (s[0] == s[1] || s[0] == s[2] || s[1] == s[2]) continue;
    const PointPair sample[3] = {pairs[s[0]], pairs[s[1]], pairs[s[2]]};
    if (collinear(sample)) continue;
    auto in = inliers_of(fit_rigid(sample));
    if (in.size() > best.size()) best = std::move(in);
    if (best.size() == pairs.size()) break;
  }

  std::vector<PointPair> support;
  if (best.size() >= 3) {
    for (std::size_t k : best) support.push_back(pairs[k]);
  }
  if (support.size() < 3 || collinear(support)) {
    support.assign(pairs.begin(), pairs.end());
  }
  RigidEstimate est;
  est.transform = fit_rigid(support);
  est.inliers = inliers_of(est.transform);
  return est;
}

RegistrationError registration_error(const RigidTransform& est, const RigidTransform& gt) {
  const Eigen::Matrix3d rel_R = gt.R.transpose() * est.R;
  const Eigen::Vector3d rel_t = gt.R.transpose() * (est.t - gt.t);
  // Same angle as arccos((trace - 1) / 2), computed via atan2 so that small
  // angles keep full precision.
  const double cos_theta = std::clamp((rel_R.trace() - 1.0) / 2.0, -1.0, 1.0);
  const Eigen::Vector3d axis(rel_R(2, 1) - rel_R(1, 2), rel_R(0, 2) - rel_R(2, 0),
                             rel_R(1, 0) - rel_R(0, 1));
  const double sin_theta = std::min(1.0, 0.5 * axis.norm());
  RegistrationError err;
  err.rre = std::atan2(sin_theta, cos_theta) * 180.0 / M_PI;
  err.rte = rel_t.norm();
  return err;
}

}  // namespace sga
