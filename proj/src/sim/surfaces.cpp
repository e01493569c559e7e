#include "wedge/sim/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wedge/core/error.hpp"

namespace wedge::sim {
namespace {

int reflect_index(int i, int n) {
  // scipy-style "reflect": d c b a | a b c d | d c b a
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

std::vector<double> gaussian_kernel(double sigma_px) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma_px));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma_px * sigma_px));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

void SurfaceGenParams::validate() const {
  const auto ordered = [](const std::pair<double, double>& r) { return r.first > 0.0 && r.first <= r.second; };
  if (!ordered(blur_sigma_range)) throw InvalidArgument("surface params: blur_sigma_range must be positive and ordered");
  if (!ordered(max_height_range)) throw InvalidArgument("surface params: max_height_range must be positive and ordered");
  if (boundary_band < 1) throw InvalidArgument("surface params: boundary_band must be >= 1");
}

Raster<1> gaussian_blur(const Raster<1>& image, double sigma_px) {
  if (!(sigma_px > 0.0)) throw InvalidArgument("gaussian_blur: sigma must be positive");
  const std::vector<double> k = gaussian_kernel(sigma_px);
  const int radius = static_cast<int>(k.size() / 2);
  const int h = image.height();
  const int w = image.width();

  std::vector<double> tmp(static_cast<std::size_t>(h) * w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * image.at(r, reflect_index(c + i, w));
      tmp[static_cast<std::size_t>(r) * w + c] = acc;
    }
  }
  Raster<1> out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp[static_cast<std::size_t>(reflect_index(r + i, h)) * w + c];
      out.at(r, c) = static_cast<float>(acc);
    }
  }
  return out;
}

DepthMap gen_random_surface(int height, int width, const SurfaceGenParams& params, double ppmm,
                            std::mt19937_64& rng) {
  if (height < 16 || width < 16) throw InvalidArgument("gen_random_surface: dims must be at least 16x16");
  if (!(ppmm > 0.0)) throw InvalidArgument("gen_random_surface: ppmm must be positive");
  params.validate();

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Raster<1> field(height, width);
  for (float& v : field.data()) {
    const double u = unit(rng);
    v = static_cast<float>(u * u * u);
  }

  std::uniform_real_distribution<double> sigma_dist(params.blur_sigma_range.first, params.blur_sigma_range.second);
  const double sigma_px = sigma_dist(rng) * ppmm;
  std::uniform_real_distribution<double> height_dist(params.max_height_range.first, params.max_height_range.second);
  const double max_height = height_dist(rng);

  const int band = params.boundary_band + static_cast<int>(std::ceil(3.0 * sigma_px));
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (r < band || c < band || r >= height - band || c >= width - band) field.at(r, c) = 0.0f;
    }
  }

  Raster<1> blurred = gaussian_blur(field, sigma_px);
  float peak = 0.0f;
  for (float& v : blurred.data()) {
    v = std::max(v, 0.0f);
    peak = std::max(peak, v);
  }

  DepthMap out(height, width);
  if (peak <= 0.0f) return out;
  const double scale = max_height / peak;
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = static_cast<float>(blurred.data()[i] * scale);
  }
  return out;
}

DepthMap gen_random_surface(int height, int width, const SurfaceGenParams& params, double ppmm) {
  std::mt19937_64 rng(params.seed);
  return gen_random_surface(height, width, params, ppmm, rng);
}

}  // namespace wedge::sim
