#include "wedge/core/raster_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace wedge {
namespace {

constexpr std::uint8_t kMagic[4] = {'F', 'R', 'A', 'S'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 * 4;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  return v;
}

std::uint8_t quantize(float v) {
  const double q = std::round(255.0 * static_cast<double>(v));
  return static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
}

void write_netpbm(const std::filesystem::path& path, const char* magic, int height, int width,
                  std::span<const float> samples) {
  std::string header = std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.reserve(bytes.size() + samples.size());
  for (float v : samples) bytes.push_back(quantize(v));
  write_file_bytes(path, bytes);
}

}  // namespace

std::vector<std::uint8_t> encode_fras(std::uint32_t height, std::uint32_t width, std::uint32_t channels,
                                      std::span<const float> data) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + data.size() * 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, kVersion);
  put_u32(out, height);
  put_u32(out, width);
  put_u32(out, channels);
  for (float v : data) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

RasterFile decode_fras(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (bytes.size() < kHeaderBytes || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw CorruptFile(origin + ": not a FRAS raster (bad magic or short header)");
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kVersion) throw CorruptFile(origin + ": unsupported FRAS version " + std::to_string(version));

  RasterFile f;
  f.height = get_u32(bytes, 8);
  f.width = get_u32(bytes, 12);
  f.channels = get_u32(bytes, 16);
  if (f.height < 2 || f.width < 2 || f.channels < 1 || f.channels > 3) {
    throw CorruptFile(origin + ": invalid FRAS dimensions");
  }
  const std::uint64_t count = std::uint64_t{f.height} * f.width * f.channels;
  if (bytes.size() != kHeaderBytes + count * 4) {
    throw CorruptFile(origin + ": FRAS payload size does not match header");
  }
  f.data.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    f.data[i] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + i * 4));
  }
  return f;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void write_ppm(const std::filesystem::path& path, const TactileFrame& frame) {
  write_netpbm(path, "P6", frame.height(), frame.width(), frame.data());
}

void write_pgm(const std::filesystem::path& path, const Raster<1>& image) {
  write_netpbm(path, "P5", image.height(), image.width(), image.data());
}

}  // namespace wedge
