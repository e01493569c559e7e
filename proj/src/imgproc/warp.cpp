#include "wedge/imgproc/warp.hpp"

#include <cmath>

#include <Eigen/LU>

namespace wedge::imgproc {
namespace {

constexpr double kEdgeSlack = 1e-9;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

void Quad::validate() const {
  double sign = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double z = cross(corners[i], corners[(i + 1) % 4], corners[(i + 2) % 4]);
    if (std::abs(z) < 1e-9) throw InvalidArgument("quad has collinear corners");
    if (sign == 0.0) sign = z;
    if (z * sign < 0.0) throw InvalidArgument("quad is not convex");
  }
}

Eigen::Matrix3d homography_rect_to_quad(const Quad& src, int out_height, int out_width) {
  src.validate();
  if (out_height < 2 || out_width < 2) throw InvalidArgument("unwarp: output must be at least 2x2");
  const double w = out_width - 1;
  const double h = out_height - 1;
  const std::array<Point2, 4> rect{{{0, 0}, {w, 0}, {w, h}, {0, h}}};

  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double x = rect[i].x, y = rect[i].y;
    const double u = src.corners[i].x, v = src.corners[i].y;
    a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
    b(2 * i) = u;
    b(2 * i + 1) = v;
  }
  const Eigen::Matrix<double, 8, 1> p = a.fullPivLu().solve(b);
  Eigen::Matrix3d hm;
  hm << p(0), p(1), p(2), p(3), p(4), p(5), p(6), p(7), 1.0;
  return hm;
}

template <int C>
bool sample_bilinear(const Raster<C>& img, double x, double y, std::array<float, static_cast<std::size_t>(C)>& out) {
  const int w = img.width();
  const int h = img.height();
  if (!(x >= -kEdgeSlack && x <= w - 1 + kEdgeSlack && y >= -kEdgeSlack && y <= h - 1 + kEdgeSlack)) return false;
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = std::min(static_cast<int>(x), w - 2);
  const int y0 = std::min(static_cast<int>(y), h - 2);
  const double fx = x - x0;
  const double fy = y - y0;
  for (int ch = 0; ch < C; ++ch) {
    const double top = (1 - fx) * img.at(y0, x0, ch) + fx * img.at(y0, x0 + 1, ch);
    const double bottom = (1 - fx) * img.at(y0 + 1, x0, ch) + fx * img.at(y0 + 1, x0 + 1, ch);
    out[ch] = static_cast<float>((1 - fy) * top + fy * bottom);
  }
  return true;
}

template <int C>
Raster<C> warp_homography(const Raster<C>& frame, const Eigen::Matrix3d& output_to_source, int out_height,
                          int out_width) {
  Raster<C> out(out_height, out_width);
  std::array<float, C> px{};
  for (int r = 0; r < out_height; ++r) {
    for (int c = 0; c < out_width; ++c) {
      const Eigen::Vector3d s = output_to_source * Eigen::Vector3d(c, r, 1.0);
      if (!(std::abs(s.z()) > 1e-12)) continue;
      if (!sample_bilinear(frame, s.x() / s.z(), s.y() / s.z(), px)) continue;
      for (int ch = 0; ch < C; ++ch) out.at(r, c, ch) = px[ch];
    }
  }
  return out;
}

TactileFrame unwarp(const TactileFrame& frame, const Quad& src, int out_height, int out_width) {
  return warp_homography(frame, homography_rect_to_quad(src, out_height, out_width), out_height, out_width);
}

template Raster<1> warp_homography(const Raster<1>&, const Eigen::Matrix3d&, int, int);
template Raster<2> warp_homography(const Raster<2>&, const Eigen::Matrix3d&, int, int);
template Raster<3> warp_homography(const Raster<3>&, const Eigen::Matrix3d&, int, int);
template bool sample_bilinear(const Raster<1>&, double, double, std::array<float, 1>&);
template bool sample_bilinear(const Raster<3>&, double, double, std::array<float, 3>&);

}  // namespace wedge::imgproc
