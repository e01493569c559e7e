#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wedge/core/raster.hpp"

namespace wedge::nnet {

/// Three-level encoder-decoder with skip concatenation (a small U-Net):
///
///   enc0a, enc0b            -> skip0   (full resolution, c0)
///   pool, enc1a, enc1b      -> skip1   (1/2, c1)
///   pool, enc2a, enc2b               (1/4, c2)
///   up, up1 -> [., skip1] -> dec1      (1/2, c1)
///   up, up0 -> [., skip0] -> dec0      (full, c0)
///   out                                (full, out_channels, no activation)
///
/// All convolutions are 3x3 with zero padding and ReLU except `out`.
/// Pooling is 2x2 average, upsampling is nearest-neighbour.
struct EncDecSpec {
  int in_channels = 1;
  int out_channels = 1;
  std::array<int, 3> channels{16, 32, 64};

  void validate() const;
  bool operator==(const EncDecSpec&) const = default;
};

struct Conv3x3 {
  Eigen::MatrixXd weight;  // out x (in * 9); column = in_ch * 9 + ky * 3 + kx
  Eigen::VectorXd bias;    // out

  int in_channels() const { return static_cast<int>(weight.cols() / 9); }
  int out_channels() const { return static_cast<int>(weight.rows()); }
};

enum ConvIndex : int { kEnc0a, kEnc0b, kEnc1a, kEnc1b, kEnc2a, kEnc2b, kUp1, kDec1, kUp0, kDec0, kOut, kConvCount };

struct EncDecWeights {
  EncDecSpec spec;
  std::vector<Conv3x3> convs;  // kConvCount entries, ConvIndex order

  void validate() const;
};

/// (in, out) channel counts of every conv for a spec.
std::array<std::pair<int, int>, kConvCount> conv_shapes(const EncDecSpec& spec);

EncDecWeights encdec_init(const EncDecSpec& spec, std::uint64_t seed);
EncDecWeights encdec_zeros(const EncDecSpec& spec);

/// Arithmetic used inside the convolutions. Parameters stay double either way;
/// F32 is what training and the pipeline use, F64 serves gradient checks.
enum class Precision { F32, F64 };

/// Single-channel forward pass. Height and width must be divisible by 4.
Raster<1> encdec_infer(const EncDecWeights& w, const Raster<1>& input, Precision precision = Precision::F32);

/// Mean per-pixel squared error over the batch, plus gradients when `grad`
/// is non-null.
double encdec_loss_and_grad(const EncDecWeights& w, std::span<const Raster<1>> inputs,
                            std::span<const Raster<1>> targets, EncDecWeights* grad,
                            Precision precision = Precision::F32);

}  // namespace wedge::nnet
