#include "wedge/imgproc/contact.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace wedge::imgproc {
namespace {

constexpr std::size_t kMinActivePixels = 10;

/// Marks inactive pixels not reachable from the raster border as active.
Mask fill_holes(const Mask& region) {
  const int h = region.height();
  const int w = region.width();
  std::vector<unsigned char> outside(static_cast<std::size_t>(h) * w, 0);
  std::vector<std::pair<int, int>> stack;
  auto push = [&](int r, int c) {
    const std::size_t i = static_cast<std::size_t>(r) * w + c;
    if (outside[i] || is_set(region, r, c)) return;
    outside[i] = 1;
    stack.emplace_back(r, c);
  };
  for (int c = 0; c < w; ++c) {
    push(0, c);
    push(h - 1, c);
  }
  for (int r = 0; r < h; ++r) {
    push(r, 0);
    push(r, w - 1);
  }
  while (!stack.empty()) {
    auto [r, c] = stack.back();
    stack.pop_back();
    if (r > 0) push(r - 1, c);
    if (r < h - 1) push(r + 1, c);
    if (c > 0) push(r, c - 1);
    if (c < w - 1) push(r, c + 1);
  }
  Mask filled(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) filled.at(r, c) = outside[static_cast<std::size_t>(r) * w + c] ? 0.0f : 1.0f;
  return filled;
}

}  // namespace

TactileFrame diff_image(const TactileFrame& frame, const TactileFrame& background) {
  if (!frame.same_shape(background)) throw InvalidArgument("diff_image: frame and background sizes differ");
  TactileFrame out(frame.height(), frame.width());
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = frame.data()[i] - background.data()[i];
  return out;
}

Mask contact_mask(const TactileFrame& diff, float threshold) {
  Mask mask(diff.height(), diff.width());
  for (int r = 0; r < diff.height(); ++r) {
    for (int c = 0; c < diff.width(); ++c) {
      float m = 0.0f;
      for (float v : diff.pixel(r, c)) m = std::max(m, std::abs(v));
      if (m > threshold) mask.at(r, c) = 1.0f;
    }
  }
  return mask;
}

CircleFit fit_circle_to_region(const Mask& region) {
  if (count_set(region) < kMinActivePixels) throw NoContact("fewer than 10 active pixels; no contact found");
  const Mask filled = fill_holes(region);

  std::vector<Eigen::Vector2d> pts;
  for (int r = 0; r < filled.height(); ++r) {
    for (int c = 0; c < filled.width(); ++c) {
      const bool in = is_set(filled, r, c);
      if (c + 1 < filled.width() && in != is_set(filled, r, c + 1)) pts.emplace_back(c + 0.5, r);
      if (r + 1 < filled.height() && in != is_set(filled, r + 1, c)) pts.emplace_back(c, r + 0.5);
    }
  }
  if (pts.size() < 3) throw NoContact("contact region has no usable boundary");

  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());

  // x^2 + y^2 + D x + E y + F = 0 in centroid-relative coordinates.
  Eigen::MatrixXd a(pts.size(), 3);
  Eigen::VectorXd b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Eigen::Vector2d q = pts[i] - mean;
    a(i, 0) = q.x();
    a(i, 1) = q.y();
    a(i, 2) = 1.0;
    b(i) = -q.squaredNorm();
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
  const double cx = -sol(0) / 2.0;
  const double cy = -sol(1) / 2.0;
  const double r2 = cx * cx + cy * cy - sol(2);
  if (!(r2 > 0.0)) throw NoContact("degenerate contact boundary");
  CircleFit fit;
  fit.center_x = cx + mean.x();
  fit.center_y = cy + mean.y();
  fit.radius = std::sqrt(r2);

  double sq = 0.0;
  const Eigen::Vector2d centre(fit.center_x, fit.center_y);
  for (const auto& p : pts) {
    const double e = (p - centre).norm() - fit.radius;
    sq += e * e;
  }
  fit.inlier_rms = std::sqrt(sq / pts.size());
  return fit;
}

CircleFit fit_contact_circle(const TactileFrame& diff, float threshold) {
  return fit_circle_to_region(contact_mask(diff, threshold));
}

Mask erode4(const Mask& mask) {
  Mask out(mask.height(), mask.width());
  for (int r = 1; r + 1 < mask.height(); ++r)
    for (int c = 1; c + 1 < mask.width(); ++c)
      if (is_set(mask, r, c) && is_set(mask, r - 1, c) && is_set(mask, r + 1, c) && is_set(mask, r, c - 1) &&
          is_set(mask, r, c + 1))
        out.at(r, c) = 1.0f;
  return out;
}

Mask dilate4(const Mask& mask) {
  Mask out(mask.height(), mask.width());
  const int h = mask.height(), w = mask.width();
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (is_set(mask, r, c) || (r > 0 && is_set(mask, r - 1, c)) || (r + 1 < h && is_set(mask, r + 1, c)) ||
          (c > 0 && is_set(mask, r, c - 1)) || (c + 1 < w && is_set(mask, r, c + 1)))
        out.at(r, c) = 1.0f;
  return out;
}

}  // namespace wedge::imgproc
