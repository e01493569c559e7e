#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "wedge/core/raster.hpp"
#include "wedge/core/transform.hpp"

namespace wedge::pose {

struct IcpParams {
  int max_iterations = 50;
  double convergence_eps = 1e-4;          // mm, change in RMS residual
  double max_correspondence_dist = 3.0;   // mm
  int min_points = 50;

  void validate() const;
};

struct IcpResult {
  RigidTransform transform;  // maps source into the target frame
  double residual = 0.0;     // RMS over the final correspondences, mm
  int iterations = 0;
  std::size_t correspondences = 0;
  std::vector<double> residual_history;  // RMS after each alignment step
};

/// Too few correspondences; carries the last estimate that had enough.
class TrackingLost : public std::runtime_error {
 public:
  TrackingLost(const std::string& what, RigidTransform last_good, int frame = -1)
      : std::runtime_error(what), last_good_(last_good), frame_(frame) {}

  const RigidTransform& last_good() const noexcept { return last_good_; }
  /// Sequence index when raised by track(), -1 otherwise.
  int frame() const noexcept { return frame_; }

 private:
  RigidTransform last_good_;
  int frame_;
};

/// Uniform 3-D grid over a fixed cloud for radius-limited nearest-neighbour queries.
class GridIndex {
 public:
  GridIndex(const PointCloud& points, double cell_size);

  struct Hit {
    std::size_t index;
    double dist2;
  };
  /// Nearest point within `max_dist` (ties go to the lower index).
  /// `max_dist` must not exceed the cell size.
  std::optional<Hit> nearest(const Eigen::Vector3d& q, double max_dist) const;

  const PointCloud& points() const noexcept { return points_; }
  double cell_size() const noexcept { return cell_; }

 private:
  using Key = std::uint64_t;
  Key key(std::int64_t x, std::int64_t y, std::int64_t z) const;
  std::int64_t cell_of(double v) const;

  PointCloud points_;
  double cell_;
  std::unordered_map<Key, std::vector<std::size_t>> cells_;
};

/// Brute-force counterpart of GridIndex::nearest (test oracle).
std::optional<GridIndex::Hit> nearest_brute(const PointCloud& points, const Eigen::Vector3d& q, double max_dist);

/// Least-squares rigid transform taking src[i] onto dst[i] (Kabsch with the
/// determinant sign correction, so the result is never a reflection).
RigidTransform kabsch(const PointCloud& src, const PointCloud& dst);

/// Point-to-point ICP. Each iteration matches every transformed source
/// point to its nearest target point within max_correspondence_dist, then
/// re-solves the full transform in closed form from those pairs. Stops when
/// the RMS residual changes by less than convergence_eps.
IcpResult icp(const PointCloud& source, const PointCloud& target, const RigidTransform& init,
              const IcpParams& params = {});
/// Same against a prebuilt index of the target (cell size >= max distance).
IcpResult icp(const PointCloud& source, const GridIndex& target, const RigidTransform& init,
              const IcpParams& params = {});

/// One point (col / ppmm, row / ppmm, depth) per masked pixel.
PointCloud depth_to_pointcloud(const DepthMap& depth, const Mask& mask, double ppmm);

struct PoseFrame {
  DepthMap depth;
  Mask mask;
};

struct PoseTrack {
  std::vector<RigidTransform> poses;  // model -> sensor
  std::vector<double> residuals;      // mm
  std::vector<std::size_t> correspondences;
  std::vector<int> iterations;
};

/// Tracks a model through a sequence. Each frame's observed cloud is
/// registered onto the model starting from the previous frame's pose
/// (frame 0 starts at `init`); poses map model coordinates to the sensor.
/// A contact patch under min_points pixels, or ICP running short of
/// correspondences, raises TrackingLost carrying the frame index.
PoseTrack track(const std::vector<PoseFrame>& sequence, const PointCloud& model, const RigidTransform& init,
                const IcpParams& params, double ppmm);

}  // namespace wedge::pose
