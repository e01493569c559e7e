#pragma once

#include <array>

#include <Eigen/Core>

#include "wedge/core/raster.hpp"

namespace wedge::imgproc {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Source corners in pixel coordinates: top-left, top-right, bottom-right,
/// bottom-left. Must be strictly convex.
struct Quad {
  std::array<Point2, 4> corners;

  /// Throws InvalidArgument for collinear or non-convex corners.
  void validate() const;
};

/// Homography taking output pixel (col, row, 1) of an out_height x out_width
/// rectangle to the source quad.
Eigen::Matrix3d homography_rect_to_quad(const Quad& src, int out_height, int out_width);

/// Samples `frame` at H * (col, row, 1) for every output pixel; bilinear,
/// zero outside the source raster.
template <int C>
Raster<C> warp_homography(const Raster<C>& frame, const Eigen::Matrix3d& output_to_source, int out_height,
                          int out_width);

/// Perspective unwarp of the imprint region to a rectangle.
TactileFrame unwarp(const TactileFrame& frame, const Quad& src, int out_height, int out_width);

/// Bilinear sample; returns false (and leaves `out` untouched) outside [0, w-1] x [0, h-1].
template <int C>
bool sample_bilinear(const Raster<C>& img, double x, double y, std::array<float, static_cast<std::size_t>(C)>& out);

extern template Raster<1> warp_homography(const Raster<1>&, const Eigen::Matrix3d&, int, int);
extern template Raster<2> warp_homography(const Raster<2>&, const Eigen::Matrix3d&, int, int);
extern template Raster<3> warp_homography(const Raster<3>&, const Eigen::Matrix3d&, int, int);

}  // namespace wedge::imgproc
