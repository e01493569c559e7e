#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wedge/core/error.hpp"

namespace wedge {

/// Row-major, channel-interleaved float raster.
///
/// Physical scale is not stored here; callers carry pixels-per-mm
/// separately (see SensorConfig).
template <int C>
class Raster {
  static_assert(C >= 1 && C <= 3, "rasters hold 1 to 3 channels");

 public:
  static constexpr int kChannels = C;

  Raster(int height, int width, float fill = 0.0f) : height_(height), width_(width) {
    check_dims(height, width);
    data_.assign(static_cast<std::size_t>(height) * width * C, fill);
  }

  Raster(int height, int width, std::vector<float> data)
      : height_(height), width_(width), data_(std::move(data)) {
    check_dims(height, width);
    if (data_.size() != static_cast<std::size_t>(height) * width * C) {
      throw InvalidArgument("raster data length does not match height x width x channels");
    }
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  static constexpr int channels() noexcept { return C; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(height_) * width_; }

  float& at(int row, int col, int ch = 0) noexcept { return data_[index(row, col, ch)]; }
  float at(int row, int col, int ch = 0) const noexcept { return data_[index(row, col, ch)]; }

  std::span<float> pixel(int row, int col) noexcept { return {data_.data() + index(row, col, 0), C}; }
  std::span<const float> pixel(int row, int col) const noexcept {
    return {data_.data() + index(row, col, 0), C};
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  bool same_shape(const Raster& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  bool operator==(const Raster&) const = default;

 private:
  static void check_dims(int height, int width) {
    if (height < 2 || width < 2) throw InvalidArgument("raster must be at least 2x2");
  }

  std::size_t index(int row, int col, int ch) const noexcept {
    return (static_cast<std::size_t>(row) * width_ + col) * C + ch;
  }

  int height_;
  int width_;
  std::vector<float> data_;
};

/// Surface height in mm.
using DepthMap = Raster<1>;
/// 0.0 / 1.0 per pixel.
using Mask = Raster<1>;
/// (Gx, Gy) per pixel: dz/dx along columns, dz/dy along rows (y points down).
using GradientField = Raster<2>;
/// RGB in [0, 1], or signed when it is a difference image.
using TactileFrame = Raster<3>;

inline bool is_set(const Mask& mask, int row, int col) { return mask.at(row, col) != 0.0f; }

inline std::size_t count_set(const Mask& mask) {
  std::size_t n = 0;
  for (float v : mask.data()) n += (v != 0.0f);
  return n;
}

/// Extracts one channel of a multi-channel raster.
template <int C>
Raster<1> channel_of(const Raster<C>& r, int ch) {
  Raster<1> out(r.height(), r.width());
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x) out.at(y, x) = r.at(y, x, ch);
  return out;
}

}  // namespace wedge
