#pragma once

#include <optional>

#include "wedge/imgproc/contact.hpp"
#include "wedge/imgproc/inpaint.hpp"
#include "wedge/nnet/encdec.hpp"
#include "wedge/nnet/mlp.hpp"
#include "wedge/recon/modes.hpp"

namespace wedge::recon {

/// Per-pixel mapper inference over (present channels, x_norm, y_norm).
GradientField color_to_gradients(const TactileFrame& diff, const nnet::MlpWeights& mapper, const LightConfigMode& mode);

struct MarkerOptions {
  /// Marker pixels of the contact frame; nullopt leaves them untreated.
  std::optional<Mask> mask;
  imgproc::MarkerMethod method = imgproc::MarkerMethod::Linear;
};

struct ReconstructOptions {
  double ppmm = 10.0;
  float contact_threshold = imgproc::kDefaultContactThreshold;
  MarkerOptions markers;
};

struct Reconstruction {
  DepthMap depth;
  GradientField gradients;
  Mask contact;
};

/// diff -> mapper -> marker inpainting (on gradients) -> completion ->
/// Poisson. Failures are rethrown as StageError naming the stage. Marker
/// pixels are excluded from the contact mask.
Reconstruction reconstruct(const TactileFrame& frame, const TactileFrame& background, const nnet::MlpWeights& mapper,
                           const nnet::EncDecWeights* completion, const LightConfigMode& mode,
                           const ReconstructOptions& opts = {});

}  // namespace wedge::recon
