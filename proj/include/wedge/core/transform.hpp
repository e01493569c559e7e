#pragma once

#include <vector>

#include <Eigen/Core>

namespace wedge {

/// Points in mm: x, y lateral and z depth.
using PointCloud = std::vector<Eigen::Vector3d>;

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }
  /// Rotation by `angle_rad` about `axis` (normalized internally), then translation.
  static RigidTransform from_axis_angle(const Eigen::Vector3d& axis, double angle_rad,
                                        const Eigen::Vector3d& translation = Eigen::Vector3d::Zero());

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

  /// Orthonormal with det +1 within `tol`.
  bool is_valid(double tol = 1e-6) const;
};

PointCloud transform_apply(const RigidTransform& t, const PointCloud& cloud);

/// Applies `b` first, then `a`.
RigidTransform transform_compose(const RigidTransform& a, const RigidTransform& b);

RigidTransform transform_invert(const RigidTransform& t);

/// Angle of the relative rotation between two transforms, in degrees.
double rotation_angle_deg(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

bool is_finite(const PointCloud& cloud);

}  // namespace wedge
