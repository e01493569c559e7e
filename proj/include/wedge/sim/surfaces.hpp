#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "wedge/core/raster.hpp"

namespace wedge::sim {

struct SurfaceGenParams {
  std::pair<double, double> blur_sigma_range{0.2, 0.8};  // mm
  std::pair<double, double> max_height_range{0.3, 1.5};  // mm
  int boundary_band = 4;                                 // px, exactly zero in the output
  std::uint64_t seed = 0;

  void validate() const;
};

/// Random smooth indentation: uniform [-1, 1] noise, cubed, boundary zeroed,
/// Gaussian-blurred (sigma drawn from blur_sigma_range), negatives clipped,
/// then scaled so its maximum is drawn from max_height_range.
///
/// The zeroed border is `boundary_band` plus the blur kernel radius, so the
/// band stays exactly zero after blurring.
DepthMap gen_random_surface(int height, int width, const SurfaceGenParams& params, double ppmm,
                            std::mt19937_64& rng);

/// Convenience overload seeded from params.seed.
DepthMap gen_random_surface(int height, int width, const SurfaceGenParams& params, double ppmm);

/// Separable Gaussian blur truncated at 3 sigma (in pixels), reflective borders.
Raster<1> gaussian_blur(const Raster<1>& image, double sigma_px);

}  // namespace wedge::sim
