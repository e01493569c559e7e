#pragma once

#include <string>

#include "wedge/core/raster.hpp"

namespace wedge::imgproc {

enum class MarkerMethod { Zero, Nearest, Linear };

MarkerMethod marker_method_from_string(const std::string& s);
std::string to_string(MarkerMethod m);

/// Replaces gradients under marker pixels; unmasked pixels are copied bit for bit.
///  - Zero: 0.
///  - Nearest: value of the nearest unmasked pixel (Euclidean; ties go to the
///    smaller row, then the smaller column).
///  - Linear: inverse-square-distance average over the unmasked ring that
///    the marker's 3 px dilation adds (marker = 8-connected component of the
///    mask); nearest when that ring is empty.
GradientField interpolate_marker_gradients(const GradientField& grads, const Mask& mask, MarkerMethod method);

}  // namespace wedge::imgproc
