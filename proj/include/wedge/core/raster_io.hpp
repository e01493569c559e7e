#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wedge/core/raster.hpp"

namespace wedge {

/// Untyped view of a FRAS file, before the channel count is checked.
struct RasterFile {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;
  std::vector<float> data;
};

/// FRAS: "FRAS", u32 version=1, u32 height, u32 width, u32 channels, then
/// little-endian f32 samples, row-major, channel-interleaved.
std::vector<std::uint8_t> encode_fras(std::uint32_t height, std::uint32_t width,
                                      std::uint32_t channels, std::span<const float> data);
RasterFile decode_fras(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

template <int C>
void write_fras(const std::filesystem::path& path, const Raster<C>& raster) {
  write_file_bytes(path, encode_fras(raster.height(), raster.width(), C, raster.data()));
}

template <int C>
Raster<C> read_fras(const std::filesystem::path& path) {
  RasterFile f = decode_fras(read_file_bytes(path), path.string());
  if (f.channels != static_cast<std::uint32_t>(C)) {
    throw CorruptFile(path.string() + ": expected " + std::to_string(C) + " channel(s), found " +
                      std::to_string(f.channels));
  }
  return Raster<C>(static_cast<int>(f.height), static_cast<int>(f.width), std::move(f.data));
}

/// Binary PPM (P6); each sample is clamp(round(255 v), 0, 255).
void write_ppm(const std::filesystem::path& path, const TactileFrame& frame);
/// Binary PGM (P5), same quantization.
void write_pgm(const std::filesystem::path& path, const Raster<1>& image);

}  // namespace wedge
