#include "wedge/recon/completion.hpp"

#include <random>

#include "wedge/core/error.hpp"
#include "wedge/core/gradients.hpp"

namespace wedge::recon {

Raster<1> infer_gx_from_gy(const nnet::EncDecWeights& completion, const Raster<1>& gy) {
  const int h = gy.height(), w = gy.width();
  const int ph = (h + 3) / 4 * 4, pw = (w + 3) / 4 * 4;
  Raster<1> padded(ph, pw);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) padded.at(r, c) = gy.at(r, c);
  const Raster<1> full = nnet::encdec_infer(completion, padded);
  Raster<1> out(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) out.at(r, c) = full.at(r, c);
  return out;
}

GradientField complete_gradients(const GradientField& grads, const LightConfigMode& mode,
                                 const nnet::EncDecWeights* completion) {
  mode.validate();
  if (!mode.lacks_gx_light()) {
    if (completion != nullptr) {
      throw InvalidArgument("complete_gradients: " + to_string(mode.lights) + " observes Gx; completion weights not allowed");
    }
    return grads;
  }
  if (mode.use_completion != (completion != nullptr)) {
    throw InvalidArgument(mode.use_completion ? "complete_gradients: mode " + mode.label() + " needs completion weights"
                                              : "complete_gradients: completion weights given for " + mode.label());
  }

  GradientField out = grads;
  if (completion == nullptr) {
    for (int r = 0; r < out.height(); ++r)
      for (int c = 0; c < out.width(); ++c) out.at(r, c, 0) = 0.0f;
    return out;
  }
  const Raster<1> gx = infer_gx_from_gy(*completion, channel_of(grads, 1));
  for (int r = 0; r < out.height(); ++r)
    for (int c = 0; c < out.width(); ++c) out.at(r, c, 0) = gx.at(r, c);
  return out;
}

std::vector<nnet::EncDecSample> completion_corpus(const CompletionCorpusParams& params, std::uint64_t seed) {
  if (params.count < 1) throw InvalidArgument("completion_corpus: need at least one surface");
  if (params.height % 4 != 0 || params.width % 4 != 0) {
    throw InvalidArgument("completion_corpus: raster size must be divisible by 4");
  }
  std::mt19937_64 rng(seed);
  std::vector<nnet::EncDecSample> out;
  out.reserve(static_cast<std::size_t>(params.count));
  for (int i = 0; i < params.count; ++i) {
    const DepthMap z = sim::gen_random_surface(params.height, params.width, params.surfaces, params.ppmm, rng);
    const GradientField g = depth_to_gradients(z, params.ppmm);
    out.push_back({channel_of(g, 1), channel_of(g, 0)});
  }
  return out;
}

}  // namespace wedge::recon
