#include "wedge/pose/icp.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "wedge/core/error.hpp"

namespace wedge::pose {

void IcpParams::validate() const {
  if (max_iterations < 1) throw InvalidArgument("icp: max_iterations must be positive");
  if (!(convergence_eps > 0.0)) throw InvalidArgument("icp: convergence_eps must be positive");
  if (!(max_correspondence_dist > 0.0)) throw InvalidArgument("icp: max_correspondence_dist must be positive");
  if (min_points < 3) throw InvalidArgument("icp: min_points must be at least 3");
}

GridIndex::GridIndex(const PointCloud& points, double cell_size) : points_(points), cell_(cell_size) {
  if (!(cell_size > 0.0)) throw InvalidArgument("GridIndex: cell size must be positive");
  if (points_.empty()) throw EmptyCloud("GridIndex: empty point cloud");
  if (!is_finite(points_)) throw InvalidArgument("GridIndex: non-finite point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    cells_[key(cell_of(p.x()), cell_of(p.y()), cell_of(p.z()))].push_back(i);
  }
}

std::int64_t GridIndex::cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }

GridIndex::Key GridIndex::key(std::int64_t x, std::int64_t y, std::int64_t z) const {
  // 21 bits per axis, wrapping; collisions only merge buckets, distances stay exact.
  constexpr std::uint64_t mask = (1u << 21) - 1;
  return (static_cast<std::uint64_t>(x) & mask) | ((static_cast<std::uint64_t>(y) & mask) << 21) |
         ((static_cast<std::uint64_t>(z) & mask) << 42);
}

std::optional<GridIndex::Hit> GridIndex::nearest(const Eigen::Vector3d& q, double max_dist) const {
  const std::int64_t c[3] = {cell_of(q.x()), cell_of(q.y()), cell_of(q.z())};
  // Squared distance from q to the lower / upper face of its own cell, per axis.
  double lo2[3], hi2[3];
  for (int a = 0; a < 3; ++a) {
    const double lo = q[a] - static_cast<double>(c[a]) * cell_;
    const double hi = cell_ - lo;
    lo2[a] = lo * lo;
    hi2[a] = hi * hi;
  }
  std::optional<Hit> best;
  double bound = max_dist * max_dist;
  auto scan = [&](std::int64_t dx, std::int64_t dy, std::int64_t dz) {
    const auto it = cells_.find(key(c[0] + dx, c[1] + dy, c[2] + dz));
    if (it == cells_.end()) return;
    for (std::size_t i : it->second) {
      const double d2 = (points_[i] - q).squaredNorm();
      if (d2 > bound) continue;
      if (!best || d2 < best->dist2 || (d2 == best->dist2 && i < best->index)) {
        best = Hit{i, d2};
        bound = d2;
      }
    }
  };
  scan(0, 0, 0);
  for (std::int64_t dx = -1; dx <= 1; ++dx)
    for (std::int64_t dy = -1; dy <= 1; ++dy)
      for (std::int64_t dz = -1; dz <= 1; ++dz) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const std::int64_t d[3] = {dx, dy, dz};
        double box2 = 0.0;
        for (int a = 0; a < 3; ++a) box2 += d[a] < 0 ? lo2[a] : d[a] > 0 ? hi2[a] : 0.0;
        // Equal distance can still hold a lower-index tie.
        if (box2 > bound) continue;
        scan(dx, dy, dz);
      }
  return best;
}

std::optional<GridIndex::Hit> nearest_brute(const PointCloud& points, const Eigen::Vector3d& q, double max_dist) {
  std::optional<GridIndex::Hit> best;
  const double max2 = max_dist * max_dist;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d2 = (points[i] - q).squaredNorm();
    if (d2 <= max2 && (!best || d2 < best->dist2)) best = GridIndex::Hit{i, d2};
  }
  return best;
}

RigidTransform kabsch(const PointCloud& src, const PointCloud& dst) {
  if (src.size() != dst.size() || src.empty()) throw InvalidArgument("kabsch: need equally many (non-zero) points");
  Eigen::Vector3d ms = Eigen::Vector3d::Zero(), md = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    ms += src[i];
    md += dst[i];
  }
  ms /= static_cast<double>(src.size());
  md /= static_cast<double>(dst.size());
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) h += (src[i] - ms) * (dst[i] - md).transpose();

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Vector3d d(1.0, 1.0, (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
  RigidTransform t;
  t.rotation = v * d.asDiagonal() * u.transpose();
  t.translation = md - t.rotation * ms;
  return t;
}

IcpResult icp(const PointCloud& source, const GridIndex& target, const RigidTransform& init, const IcpParams& params) {
  params.validate();
  if (target.cell_size() < params.max_correspondence_dist) {
    throw InvalidArgument("icp: index cell size is smaller than max_correspondence_dist");
  }
  const auto min_points = static_cast<std::size_t>(params.min_points);
  if (source.size() < min_points || target.points().size() < min_points) {
    throw InvalidArgument("icp: clouds need at least " + std::to_string(params.min_points) + " points");
  }

  IcpResult res;
  res.transform = init;
  PointCloud src, dst;
  src.reserve(source.size());
  dst.reserve(source.size());
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= params.max_iterations; ++it) {
    src.clear();
    dst.clear();
    for (const auto& s : source) {
      const auto hit = target.nearest(res.transform.apply(s), params.max_correspondence_dist);
      if (!hit) continue;
      src.push_back(s);
      dst.push_back(target.points()[hit->index]);
    }
    if (src.size() < min_points) {
      throw TrackingLost("icp: only " + std::to_string(src.size()) + " correspondences at iteration " +
                             std::to_string(it) + " (need " + std::to_string(params.min_points) + ")",
                         res.transform);
    }
    res.transform = kabsch(src, dst);
    double sum = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) sum += (res.transform.apply(src[i]) - dst[i]).squaredNorm();
    res.residual = std::sqrt(sum / static_cast<double>(src.size()));
    res.correspondences = src.size();
    res.iterations = it;
    res.residual_history.push_back(res.residual);
    if (std::abs(prev - res.residual) < params.convergence_eps) break;
    prev = res.residual;
  }
  return res;
}

IcpResult icp(const PointCloud& source, const PointCloud& target, const RigidTransform& init, const IcpParams& params) {
  params.validate();
  return icp(source, GridIndex(target, params.max_correspondence_dist), init, params);
}

PointCloud depth_to_pointcloud(const DepthMap& depth, const Mask& mask, double ppmm) {
  if (!depth.same_shape(mask)) throw InvalidArgument("depth_to_pointcloud: mask size differs from depth");
  if (!(ppmm > 0.0)) throw InvalidArgument("depth_to_pointcloud: ppmm must be positive");
  PointCloud cloud;
  for (int r = 0; r < depth.height(); ++r)
    for (int c = 0; c < depth.width(); ++c)
      if (is_set(mask, r, c)) cloud.emplace_back(c / ppmm, r / ppmm, depth.at(r, c));
  if (cloud.empty()) throw EmptyCloud("depth_to_pointcloud: mask selects no pixels");
  return cloud;
}

PoseTrack track(const std::vector<PoseFrame>& sequence, const PointCloud& model, const RigidTransform& init,
                const IcpParams& params, double ppmm) {
  if (sequence.empty()) throw InvalidArgument("track: empty sequence");
  params.validate();
  const GridIndex index(model, params.max_correspondence_dist);
  PoseTrack out;
  RigidTransform pose = init;
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    IcpResult r;
    try {
      const std::size_t observed = count_set(sequence[k].mask);
      if (observed < static_cast<std::size_t>(params.min_points)) {
        throw TrackingLost("contact patch has " + std::to_string(observed) + " pixels", transform_invert(pose));
      }
      const PointCloud cloud = depth_to_pointcloud(sequence[k].depth, sequence[k].mask, ppmm);
      // Observed (partial) cloud onto the complete model; invert for model -> sensor.
      r = icp(cloud, index, transform_invert(pose), params);
    } catch (const TrackingLost& e) {
      throw TrackingLost("frame " + std::to_string(k) + ": " + e.what(), transform_invert(e.last_good()),
                         static_cast<int>(k));
    }
    pose = transform_invert(r.transform);
    out.poses.push_back(pose);
    out.residuals.push_back(r.residual);
    out.correspondences.push_back(r.correspondences);
    out.iterations.push_back(r.iterations);
  }
  return out;
}

}  // namespace wedge::pose
