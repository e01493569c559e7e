#include "wedge/core/gradients.hpp"

#include <cmath>

namespace wedge {

GradientField depth_to_gradients(const DepthMap& depth, double ppmm) {
  if (!(ppmm > 0.0)) throw InvalidArgument("depth_to_gradients: ppmm must be positive");
  const int h = depth.height();
  const int w = depth.width();
  GradientField grads(h, w);

  auto z = [&](int r, int c) { return static_cast<double>(depth.at(r, c)); };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double dzdx;
      if (c == 0) {
        dzdx = z(r, 1) - z(r, 0);
      } else if (c == w - 1) {
        dzdx = z(r, w - 1) - z(r, w - 2);
      } else {
        dzdx = 0.5 * (z(r, c + 1) - z(r, c - 1));
      }
      double dzdy;
      if (r == 0) {
        dzdy = z(1, c) - z(0, c);
      } else if (r == h - 1) {
        dzdy = z(h - 1, c) - z(h - 2, c);
      } else {
        dzdy = 0.5 * (z(r + 1, c) - z(r - 1, c));
      }
      grads.at(r, c, 0) = static_cast<float>(dzdx * ppmm);
      grads.at(r, c, 1) = static_cast<float>(dzdy * ppmm);
    }
  }
  return grads;
}

Raster<3> gradients_to_normals(const GradientField& grads) {
  Raster<3> normals(grads.height(), grads.width());
  for (int r = 0; r < grads.height(); ++r) {
    for (int c = 0; c < grads.width(); ++c) {
      const double gx = grads.at(r, c, 0);
      const double gy = grads.at(r, c, 1);
      const double inv = 1.0 / std::sqrt(gx * gx + gy * gy + 1.0);
      normals.at(r, c, 0) = static_cast<float>(-gx * inv);
      normals.at(r, c, 1) = static_cast<float>(-gy * inv);
      normals.at(r, c, 2) = static_cast<float>(inv);
    }
  }
  return normals;
}

}  // namespace wedge
