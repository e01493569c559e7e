#include "wedge/sim/ball_press.hpp"

#include <cmath>

#include "wedge/core/error.hpp"

namespace wedge::sim {

double BallPress::contact_radius() const {
  const double rest = ball_radius - press_depth;
  return std::sqrt(ball_radius * ball_radius - rest * rest);
}

BallPressImage gen_ball_press(const BallPress& press, const SensorConfig& config) {
  if (!(press.ball_radius > 0.0) || !(press.press_depth > 0.0) || !(press.press_depth < press.ball_radius)) {
    throw InvalidArgument("gen_ball_press: need 0 < press_depth < ball_radius");
  }
  if (!(config.ppmm > 0.0)) throw InvalidArgument("gen_ball_press: ppmm must be positive");
  const double r = press.contact_radius();
  const double max_x = (config.width - 1) / config.ppmm;
  const double max_y = (config.height - 1) / config.ppmm;
  if (press.center_x - r < 0.0 || press.center_x + r > max_x || press.center_y - r < 0.0 ||
      press.center_y + r > max_y) {
    throw InvalidArgument("gen_ball_press: contact circle exceeds the raster");
  }

  BallPressImage out{DepthMap(config.height, config.width), Mask(config.height, config.width),
                     GradientField(config.height, config.width)};
  const double R2 = press.ball_radius * press.ball_radius;
  const double rest = press.ball_radius - press.press_depth;
  for (int row = 0; row < config.height; ++row) {
    for (int col = 0; col < config.width; ++col) {
      const double dx = col / config.ppmm - press.center_x;
      const double dy = row / config.ppmm - press.center_y;
      const double rho2 = dx * dx + dy * dy;
      if (rho2 >= r * r) continue;
      const double cap = std::sqrt(R2 - rho2);
      out.depth.at(row, col) = static_cast<float>(cap - rest);
      out.contact.at(row, col) = 1.0f;
      out.analytic.at(row, col, 0) = static_cast<float>(-dx / cap);
      out.analytic.at(row, col, 1) = static_cast<float>(-dy / cap);
    }
  }
  return out;
}

}  // namespace wedge::sim
