#pragma once

#include "wedge/core/raster.hpp"

namespace wedge {

/// Central differences in the interior, one-sided on the border; pixel
/// pitch is 1/ppmm mm so the result is in mm/mm.
GradientField depth_to_gradients(const DepthMap& depth, double ppmm);

/// Unit normals n = (-Gx, -Gy, 1) / |(-Gx, -Gy, 1)|.
Raster<3> gradients_to_normals(const GradientField& grads);

}  // namespace wedge
