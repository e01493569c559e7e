#include "wedge/pose/cube.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Geometry>

#include "wedge/core/error.hpp"

namespace wedge::pose {

PointCloud cube_corner_model(double edge_mm, double spacing_mm, std::uint64_t seed) {
  if (!(edge_mm > 0.0) || !(spacing_mm > 0.0)) throw InvalidArgument("cube_corner_model: sizes must be positive");
  const int n = static_cast<int>(std::floor(edge_mm / spacing_mm + 1e-9));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, spacing_mm);
  PointCloud pts;
  pts.reserve(static_cast<std::size_t>(3 * n * n));
  for (int face = 0; face < 3; ++face)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double u = i * spacing_mm + jitter(rng);
        const double v = j * spacing_mm + jitter(rng);
        Eigen::Vector3d p = Eigen::Vector3d::Zero();
        p[(face + 1) % 3] = u;
        p[(face + 2) % 3] = v;
        pts.push_back(p);
      }
  return pts;
}

RigidTransform cube_corner_rest_pose(double x_mm, double y_mm, double indentation_mm) {
  RigidTransform t;
  const Eigen::Vector3d diagonal = Eigen::Vector3d::Ones().normalized();
  t.rotation = Eigen::Quaterniond::FromTwoVectors(diagonal, -Eigen::Vector3d::UnitZ()).toRotationMatrix();
  t.translation = Eigen::Vector3d(x_mm, y_mm, indentation_mm);
  return t;
}

DepthMap cube_corner_depth(const RigidTransform& pose, int height, int width, double ppmm) {
  if (!(ppmm > 0.0)) throw InvalidArgument("cube_corner_depth: ppmm must be positive");
  if (!pose.is_valid()) throw InvalidArgument("cube_corner_depth: pose rotation is not a rotation");
  // Interior normals of the three faces in sensor coordinates.
  std::array<Eigen::Vector3d, 3> normals{pose.rotation.col(0), pose.rotation.col(1), pose.rotation.col(2)};
  for (const auto& n : normals) {
    if (!(n.z() < -1e-6)) throw InvalidArgument("cube_corner_depth: a face does not face the gel under this pose");
  }
  const Eigen::Vector3d& t = pose.translation;
  DepthMap depth(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      const double dx = c / ppmm - t.x(), dy = r / ppmm - t.y();
      double z = std::numeric_limits<double>::infinity();
      for (const auto& n : normals) z = std::min(z, t.z() - (n.x() * dx + n.y() * dy) / n.z());
      depth.at(r, c) = static_cast<float>(std::max(0.0, z));
    }
  return depth;
}

}  // namespace wedge::pose
