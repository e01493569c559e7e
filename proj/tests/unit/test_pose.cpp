#include <cmath>
#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "wedge/core/error.hpp"
#include "wedge/pose/cube.hpp"
#include "wedge/pose/icp.hpp"

using namespace wedge;
using namespace wedge::pose;

namespace {

PointCloud random_cloud(std::size_t n, std::uint64_t seed, double extent = 5.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-extent, extent);
  PointCloud c(n);
  for (auto& p : c) p = {u(rng), u(rng), u(rng)};
  return c;
}

double translation_error(const RigidTransform& a, const RigidTransform& b) { return (a.translation - b.translation).norm(); }

}  // namespace

TEST(DepthToCloud, CoordinateMapping) {
  DepthMap d(20, 30);
  Mask m(20, 30);
  d.at(10, 20) = 0.7f;
  m.at(10, 20) = 1.0f;
  const PointCloud c = depth_to_pointcloud(d, m, 10.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR((c[0] - Eigen::Vector3d(2.0, 1.0, 0.7)).norm(), 0.0, 1e-6);
}

TEST(DepthToCloud, FlatDepthGivesPlane) {
  const DepthMap d(12, 14, 0.25f);
  Mask m(12, 14, 1.0f);
  m.at(3, 3) = 0.0f;
  const PointCloud c = depth_to_pointcloud(d, m, 10.0);
  EXPECT_EQ(c.size(), count_set(m));
  for (const auto& p : c) EXPECT_FLOAT_EQ(static_cast<float>(p.z()), 0.25f);
}

TEST(GridIndex, AgreesWithBruteForce) {
  const PointCloud pts = random_cloud(2000, 1);
  const GridIndex grid(pts, 1.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-6, 6);
  for (int k = 0; k < 500; ++k) {
    const Eigen::Vector3d q(u(rng), u(rng), u(rng));
    const auto a = grid.nearest(q, 1.0);
    const auto b = nearest_brute(pts, q, 1.0);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      EXPECT_EQ(a->index, b->index);
      EXPECT_EQ(a->dist2, b->dist2);
    }
  }
}

TEST(GridIndex, TiesGoToLowerIndex) {
  const PointCloud pts{{1, 0, 0}, {-1, 0, 0}, {1, 0, 0}};
  const GridIndex grid(pts, 2.0);
  EXPECT_EQ(grid.nearest({0, 0, 0}, 2.0)->index, 0u);
  EXPECT_FALSE(grid.nearest({5, 5, 5}, 2.0).has_value());
}

TEST(Kabsch, RecoversExactTransformAndAvoidsReflection) {
  const PointCloud src = random_cloud(50, 3);
  const auto t = RigidTransform::from_axis_angle({1, 2, 3}, 1.1, {0.5, -2, 4});
  const RigidTransform est = kabsch(src, transform_apply(t, src));
  EXPECT_LT((est.rotation - t.rotation).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(translation_error(est, t), 1e-10);

  // Planar data mirrored through its plane: the best proper rotation, never det -1.
  PointCloud planar, mirrored;
  for (const auto& p : src) {
    planar.push_back({p.x(), p.y(), 0.0});
    mirrored.push_back({p.x(), -p.y(), 0.0});
  }
  EXPECT_GT(kabsch(planar, mirrored).rotation.determinant(), 0.0);
}

TEST(Icp, FixedPointOnIdenticalClouds) {
  const PointCloud model = cube_corner_model();
  const IcpResult r = icp(model, model, RigidTransform::identity());
  EXPECT_LE(r.residual, 1e-9);
  EXPECT_LE(r.iterations, 2);
  EXPECT_LT((r.transform.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Icp, RecoversTenDegreeOffset) {
  const PointCloud model = cube_corner_model();
  const auto truth = RigidTransform::from_axis_angle({0, 0, 1}, 10.0 * M_PI / 180.0, {1, 2, 0.5});
  const IcpResult r = icp(model, transform_apply(truth, model), RigidTransform::identity());
  EXPECT_LE(translation_error(r.transform, truth), 1e-3);
  EXPECT_LE(rotation_angle_deg(r.transform.rotation, truth.rotation), 0.01);
}

TEST(Icp, ResidualHistoryIsNonIncreasing) {
  const PointCloud model = cube_corner_model();
  const auto truth = RigidTransform::from_axis_angle({1, -1, 2}, 6.0 * M_PI / 180.0, {0.4, -0.3, 0.2});
  PointCloud target = transform_apply(truth, model);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.02);
  for (auto& p : target) p += Eigen::Vector3d(n(rng), n(rng), n(rng));
  const IcpResult r = icp(model, target, RigidTransform::identity());
  for (std::size_t i = 1; i < r.residual_history.size(); ++i)
    EXPECT_LE(r.residual_history[i], r.residual_history[i - 1] + 1e-12);
}

TEST(Icp, EquivariantUnderCommonTransform) {
  const PointCloud model = cube_corner_model();
  const auto truth = RigidTransform::from_axis_angle({0, 1, 1}, 5.0 * M_PI / 180.0, {0.3, 0.2, -0.1});
  const PointCloud target = transform_apply(truth, model);
  const auto g = RigidTransform::from_axis_angle({3, -1, 2}, 0.7, {4, -5, 6});
  const IcpResult a = icp(model, target, RigidTransform::identity());
  // Moving the target by g moves the answer by g.
  const IcpResult b = icp(model, transform_apply(g, target), g);
  const RigidTransform expect = transform_compose(g, a.transform);
  EXPECT_LT(rotation_angle_deg(b.transform.rotation, expect.rotation), 1e-6);
  EXPECT_LT(translation_error(b.transform, expect), 1e-6);
  EXPECT_NEAR(a.residual, b.residual, 1e-9);
}

TEST(Icp, LargeRotationReportsResidualHonestly) {
  const PointCloud model = cube_corner_model();
  const auto truth = RigidTransform::from_axis_angle({0, 0, 1}, 40.0 * M_PI / 180.0);
  const PointCloud target = transform_apply(truth, model);
  const IcpResult r = icp(model, target, RigidTransform::identity());
  // Whatever minimum it lands in, the reported residual is the true RMS of its matches.
  const GridIndex grid(target, 3.0);
  double se = 0.0;
  std::size_t n = 0;
  for (const auto& p : model) {
    if (auto hit = grid.nearest(r.transform.apply(p), 3.0)) {
      se += hit->dist2;
      ++n;
    }
  }
  ASSERT_GT(n, 0u);
  EXPECT_NEAR(r.residual, std::sqrt(se / n), 1e-6);
}

TEST(Icp, TooFewCorrespondencesLosesTracking) {
  const PointCloud model = cube_corner_model();
  const PointCloud far = transform_apply(RigidTransform::from_axis_angle({0, 0, 1}, 0, {100, 0, 0}), model);
  EXPECT_THROW(icp(model, far, RigidTransform::identity()), TrackingLost);
  EXPECT_THROW(icp(PointCloud(3), model, RigidTransform::identity()), InvalidArgument);
  IcpParams bad;
  bad.min_points = 2;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Cube, RestPoseAndDepth) {
  const RigidTransform rest = cube_corner_rest_pose(10.0, 7.5, 4.0);
  EXPECT_TRUE(rest.is_valid());
  const Eigen::Vector3d diag = rest.rotation * Eigen::Vector3d(1, 1, 1).normalized();
  EXPECT_NEAR(diag.z(), -1.0, 1e-12);
  const DepthMap d = cube_corner_depth(rest, 150, 200, 10.0);
  EXPECT_NEAR(d.at(75, 100), 4.0, 1e-5);
  EXPECT_EQ(d.at(0, 0), 0.0f);
  float peak = 0.0f;
  for (float v : d.data()) peak = std::max(peak, v);
  EXPECT_NEAR(peak, 4.0f, 1e-5);
}

TEST(Track, StaticSequenceStaysAtRest) {
  const RigidTransform rest = cube_corner_rest_pose(10.0, 7.5, 4.0);
  const DepthMap d = cube_corner_depth(rest, 150, 200, 10.0);
  Mask m(150, 200);
  for (std::size_t i = 0; i < m.data().size(); ++i) m.data()[i] = d.data()[i] > 0 ? 1.0f : 0.0f;
  const std::vector<PoseFrame> seq(4, PoseFrame{d, m});
  const PoseTrack tr = track(seq, cube_corner_model(), rest, IcpParams{}, 10.0);
  ASSERT_EQ(tr.poses.size(), 4u);
  // The sparse jittered model biases the optimum slightly; warm starts settle there, not beyond.
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_LE(rotation_angle_deg(tr.poses[k].rotation, rest.rotation), 0.5) << k;
    EXPECT_LE(translation_error(tr.poses[k], rest), 0.2) << k;
    if (k > 0) {
      EXPECT_LE(tr.residuals[k], tr.residuals[k - 1] + 1e-4) << k;
    }
  }
}

TEST(Track, LostFrameIsReported) {
  const RigidTransform rest = cube_corner_rest_pose(10.0, 7.5, 4.0);
  const DepthMap d = cube_corner_depth(rest, 150, 200, 10.0);
  Mask m(150, 200);
  for (std::size_t i = 0; i < m.data().size(); ++i) m.data()[i] = d.data()[i] > 0 ? 1.0f : 0.0f;
  Mask tiny(150, 200);
  tiny.at(75, 100) = 1.0f;
  std::vector<PoseFrame> seq{{d, m}, {d, tiny}};
  try {
    track(seq, cube_corner_model(), rest, IcpParams{}, 10.0);
    FAIL() << "expected TrackingLost";
  } catch (const TrackingLost& e) {
    EXPECT_EQ(e.frame(), 1);
  }
}
