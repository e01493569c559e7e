#pragma once

#include "wedge/core/raster.hpp"

namespace wedge::imgproc {

inline constexpr float kDefaultContactThreshold = 0.05f;

/// Element-wise frame - background; the result may be negative.
TactileFrame diff_image(const TactileFrame& frame, const TactileFrame& background);

/// Pixels whose channel-max |diff| exceeds `threshold`.
Mask contact_mask(const TactileFrame& diff, float threshold = kDefaultContactThreshold);

struct CircleFit {
  double center_x = 0.0;  // px (column)
  double center_y = 0.0;  // px (row)
  double radius = 0.0;    // px
  double inlier_rms = 0.0;
};

/// Kasa least-squares circle through the outer boundary of the thresholded
/// region. Holes in the region are filled first; boundary points are the
/// midpoints between 4-adjacent active/inactive pixel pairs.
/// Throws NoContact when fewer than 10 pixels are active.
CircleFit fit_contact_circle(const TactileFrame& diff, float threshold = kDefaultContactThreshold);

/// 4-neighbourhood erosion; pixels on the raster border are dropped.
Mask erode4(const Mask& mask);
/// 4-neighbourhood dilation.
Mask dilate4(const Mask& mask);

/// Same fit on an explicit region mask.
CircleFit fit_circle_to_region(const Mask& region);

}  // namespace wedge::imgproc
