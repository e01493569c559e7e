#pragma once

#include "wedge/core/raster.hpp"
#include "wedge/sim/sensor_config.hpp"

namespace wedge::sim {

/// A calibration ball pressed into the gel. Center is in sensor-plane mm,
/// where pixel (row, col) sits at (col / ppmm, row / ppmm).
struct BallPress {
  double ball_radius = 2.4;
  double press_depth = 0.6;
  double center_x = 10.0;
  double center_y = 7.5;

  double contact_radius() const;
};

struct BallPressImage {
  DepthMap depth;
  Mask contact;
  GradientField analytic;
};

/// Spherical cap z = sqrt(R^2 - rho^2) - (R - d) inside the contact circle,
/// zero outside, with the closed-form gradients of the cap.
BallPressImage gen_ball_press(const BallPress& press, const SensorConfig& config);

}  // namespace wedge::sim
