#include "wedge/sim/render.hpp"

#include <algorithm>
#include <cmath>

#include "wedge/core/gradients.hpp"

namespace wedge::sim {

double edge_distance_mm(Edge edge, int row, int col, const SensorConfig& config) {
  switch (edge) {
    case Edge::Left: return col / config.ppmm;
    case Edge::Right: return (config.width - 1 - col) / config.ppmm;
    case Edge::Top: return row / config.ppmm;
    case Edge::Bottom: return (config.height - 1 - row) / config.ppmm;
  }
  return 0.0;
}

TactileFrame render_frame(const DepthMap& depth, const SensorConfig& config) {
  config.validate();
  if (depth.height() != config.height || depth.width() != config.width) {
    throw InvalidArgument("render_frame: depth is " + std::to_string(depth.height()) + "x" +
                          std::to_string(depth.width()) + ", config expects " + std::to_string(config.height) +
                          "x" + std::to_string(config.width));
  }
  for (float v : depth.data()) {
    if (!(v >= 0.0f)) throw InvalidArgument("render_frame: depth must be finite and non-negative");
  }

  const Raster<3> normals = gradients_to_normals(depth_to_gradients(depth, config.ppmm));
  TactileFrame frame(config.height, config.width, static_cast<float>(config.ambient));

  for (const LightSpec& light : config.lights) {
    const int ch = static_cast<int>(light.channel);
    const Eigen::Vector3d toward_light = -light.direction;
    for (int r = 0; r < config.height; ++r) {
      for (int c = 0; c < config.width; ++c) {
        const Eigen::Vector3d n(normals.at(r, c, 0), normals.at(r, c, 1), normals.at(r, c, 2));
        const double shade = std::max(0.0, n.dot(toward_light));
        const double falloff = std::exp(-edge_distance_mm(light.entry_edge, r, c, config) / light.attenuation_lambda);
        const double v = config.ambient + config.albedo * shade * falloff;
        frame.at(r, c, ch) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return frame;
}

TactileFrame render_background(const SensorConfig& config) {
  return render_frame(DepthMap(config.height, config.width, 0.0f), config);
}

}  // namespace wedge::sim
