#pragma once

#include "wedge/core/raster.hpp"
#include "wedge/sim/sensor_config.hpp"

namespace wedge::sim {

/// Lambertian shading with per-light exponential edge attenuation:
///   value_k = ambient + albedo * max(0, n . -dir_k) * exp(-d_k / lambda_k)
/// where n comes from the central-difference gradients of `depth` and d_k
/// is the distance in mm from light k's entry edge. Channels without a
/// light hold `ambient`. Values are clamped to [0, 1].
TactileFrame render_frame(const DepthMap& depth, const SensorConfig& config);

/// render_frame of the all-zero depth map.
TactileFrame render_background(const SensorConfig& config);

/// Distance in mm from the entry edge of a light to pixel (row, col).
double edge_distance_mm(Edge edge, int row, int col, const SensorConfig& config);

}  // namespace wedge::sim
