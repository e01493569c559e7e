#include "wedge/sim/markers.hpp"

#include <cmath>
#include <vector>

#include "wedge/core/error.hpp"

namespace wedge::sim {
namespace {

constexpr float kMarkerDarkening = 0.1f;

std::vector<double> grid_centres_px(double pitch_mm, double ppmm, int extent) {
  std::vector<double> centres;
  for (int i = 0;; ++i) {
    const double c = (i + 0.5) * pitch_mm * ppmm - 0.5;
    if (c > extent - 1) break;
    if (c >= 0.0) centres.push_back(c);
  }
  return centres;
}

}  // namespace

int marker_grid_count(double grid_pitch_mm, const SensorConfig& config) {
  return static_cast<int>(grid_centres_px(grid_pitch_mm, config.ppmm, config.width).size() *
                          grid_centres_px(grid_pitch_mm, config.ppmm, config.height).size());
}

MarkedFrame overlay_markers(const TactileFrame& frame, double grid_pitch_mm, double dot_radius_mm,
                            const SensorConfig& config) {
  if (!(grid_pitch_mm > 0.0) || !(dot_radius_mm >= 0.0) || !(dot_radius_mm < grid_pitch_mm / 2.0)) {
    throw InvalidArgument("overlay_markers: need 0 <= dot_radius < grid_pitch / 2");
  }
  MarkedFrame out{frame, Mask(frame.height(), frame.width())};
  const double radius_px = dot_radius_mm * config.ppmm;
  const auto cols = grid_centres_px(grid_pitch_mm, config.ppmm, frame.width());
  const auto rows = grid_centres_px(grid_pitch_mm, config.ppmm, frame.height());

  for (double cy : rows) {
    for (double cx : cols) {
      const int r0 = std::max(0, static_cast<int>(std::floor(cy - radius_px)));
      const int r1 = std::min(frame.height() - 1, static_cast<int>(std::ceil(cy + radius_px)));
      const int c0 = std::max(0, static_cast<int>(std::floor(cx - radius_px)));
      const int c1 = std::min(frame.width() - 1, static_cast<int>(std::ceil(cx + radius_px)));
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
          const double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
          if (d2 > radius_px * radius_px || is_set(out.markers, r, c)) continue;
          out.markers.at(r, c) = 1.0f;
          for (float& v : out.frame.pixel(r, c)) v *= kMarkerDarkening;
        }
      }
    }
  }
  return out;
}

}  // namespace wedge::sim
