#pragma once

#include <cstdint>
#include <vector>

#include "wedge/nnet/encdec.hpp"
#include "wedge/nnet/train.hpp"
#include "wedge/recon/modes.hpp"
#include "wedge/sim/surfaces.hpp"

namespace wedge::recon {

/// RGB / RG: returned unchanged (completion weights are rejected).
/// RB / R: Gx replaced by the network's prediction from Gy when `completion`
/// is given, zeroed otherwise. `mode.use_completion` must agree with
/// whether weights are passed.
GradientField complete_gradients(const GradientField& grads, const LightConfigMode& mode,
                                 const nnet::EncDecWeights* completion);

/// Runs the completion net on Gy, zero-padding bottom/right to a multiple of
/// 4 and cropping back.
Raster<1> infer_gx_from_gy(const nnet::EncDecWeights& completion, const Raster<1>& gy);

struct CompletionCorpusParams {
  int count = 200;
  int height = 96;
  int width = 128;
  double ppmm = 10.0;
  sim::SurfaceGenParams surfaces;
};

/// (Gy -> Gx) pairs from depth_to_gradients of random synthetic surfaces.
/// No ball presses are involved.
std::vector<nnet::EncDecSample> completion_corpus(const CompletionCorpusParams& params, std::uint64_t seed);

}  // namespace wedge::recon
