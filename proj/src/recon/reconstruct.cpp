#include "wedge/recon/reconstruct.hpp"

#include "wedge/core/error.hpp"
#include "wedge/recon/calibration.hpp"
#include "wedge/recon/completion.hpp"
#include "wedge/recon/poisson.hpp"

namespace wedge::recon {
namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

GradientField color_to_gradients(const TactileFrame& diff, const nnet::MlpWeights& mapper, const LightConfigMode& mode) {
  mode.validate();
  if (mapper.input_dim() != mode.mapper_inputs() || mapper.output_dim() != 2) {
    throw InvalidArgument("color_to_gradients: mapper takes " + std::to_string(mapper.input_dim()) + " inputs, mode " +
                          to_string(mode.lights) + " provides " + std::to_string(mode.mapper_inputs()));
  }
  const int h = diff.height(), w = diff.width();
  const auto channels = mode.channels();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(h) * w, mode.mapper_inputs());
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const Eigen::Index i = static_cast<Eigen::Index>(r) * w + c;
      Eigen::Index k = 0;
      for (auto ch : channels) x(i, k++) = diff.at(r, c, static_cast<int>(ch));
      x(i, k++) = x_norm(c, w);
      x(i, k) = y_norm(r, h);
    }
  const Eigen::MatrixXd y = nnet::mlp_infer(mapper, x);
  GradientField g(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const Eigen::Index i = static_cast<Eigen::Index>(r) * w + c;
      g.at(r, c, 0) = static_cast<float>(y(i, 0));
      g.at(r, c, 1) = static_cast<float>(y(i, 1));
    }
  return g;
}

Reconstruction reconstruct(const TactileFrame& frame, const TactileFrame& background, const nnet::MlpWeights& mapper,
                           const nnet::EncDecWeights* completion, const LightConfigMode& mode,
                           const ReconstructOptions& opts) {
  stage("config", [&] {
    mode.validate();
    return 0;
  });
  const TactileFrame diff = stage("diff", [&] {
    if (!frame.same_shape(background)) throw InvalidArgument("frame and background sizes differ");
    return imgproc::diff_image(frame, background);
  });
  Mask contact = imgproc::contact_mask(diff, opts.contact_threshold);

  GradientField g = stage("color_to_gradients", [&] { return color_to_gradients(diff, mapper, mode); });
  if (opts.markers.mask) {
    const Mask& markers = *opts.markers.mask;
    g = stage("marker_inpaint", [&] { return imgproc::interpolate_marker_gradients(g, markers, opts.markers.method); });
    for (std::size_t i = 0; i < contact.pixel_count(); ++i)
      if (markers.data()[i] != 0.0f) contact.data()[i] = 0.0f;
  }
  g = stage("complete_gradients", [&] { return complete_gradients(g, mode, completion); });
  DepthMap depth = stage("poisson_solve", [&] { return poisson_solve(g, opts.ppmm); });
  return {std::move(depth), std::move(g), std::move(contact)};
}

}  // namespace wedge::recon
