#include "wedge/core/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace wedge {

RigidTransform RigidTransform::from_axis_angle(const Eigen::Vector3d& axis, double angle_rad,
                                               const Eigen::Vector3d& translation) {
  RigidTransform t;
  t.rotation = Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
  t.translation = translation;
  return t;
}

bool RigidTransform::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

PointCloud transform_apply(const RigidTransform& t, const PointCloud& cloud) {
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.push_back(t.apply(p));
  return out;
}

RigidTransform transform_compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform t;
  t.rotation = a.rotation * b.rotation;
  t.translation = a.rotation * b.translation + a.translation;
  return t;
}

RigidTransform transform_invert(const RigidTransform& t) {
  RigidTransform inv;
  inv.rotation = t.rotation.transpose();
  inv.translation = -(inv.rotation * t.translation);
  return inv;
}

double rotation_angle_deg(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  const Eigen::Matrix3d rel = a.transpose() * b;
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

bool is_finite(const PointCloud& cloud) {
  return std::all_of(cloud.begin(), cloud.end(), [](const Eigen::Vector3d& p) { return p.allFinite(); });
}

}  // namespace wedge
