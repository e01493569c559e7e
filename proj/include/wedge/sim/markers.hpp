#pragma once

#include "wedge/core/raster.hpp"
#include "wedge/sim/sensor_config.hpp"

namespace wedge::sim {

struct MarkedFrame {
  TactileFrame frame;
  Mask markers;
};

/// Stamps a square grid of dark dots (values x 0.1). Dot centres sit on
/// pixel corners at ((i + 1/2) pitch) mm, so a dot narrower than half a
/// pixel covers no pixel centre.
MarkedFrame overlay_markers(const TactileFrame& frame, double grid_pitch_mm, double dot_radius_mm,
                            const SensorConfig& config);

/// Number of dot centres that fall inside a raster of the config's size.
int marker_grid_count(double grid_pitch_mm, const SensorConfig& config);

}  // namespace wedge::sim
