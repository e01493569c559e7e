#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "wedge/nnet/train.hpp"
#include "wedge/recon/modes.hpp"
#include "wedge/sim/ball_press.hpp"

namespace wedge::recon {

/// One calibration image: contact frame, blank background and the press that made it.
struct PressRecord {
  TactileFrame frame;
  TactileFrame background;
  sim::BallPress press;
};

/// One pixel's mapper training example. Colours are difference-image values
/// of all three channels; modes pick the ones their lights provide.
struct CalibrationSample {
  std::array<float, 3> rgb{};
  float x_norm = 0.0f;  // [-1, 1] across the raster
  float y_norm = 0.0f;
  float gx = 0.0f;
  float gy = 0.0f;
  bool in_contact = false;
};

struct CalibrationSet {
  std::vector<CalibrationSample> train;
  std::vector<CalibrationSample> test;
  std::vector<std::size_t> train_presses;  // indices into the input list
  std::vector<std::size_t> test_presses;
};

inline float x_norm(int col, int width) { return 2.0f * static_cast<float>(col) / static_cast<float>(width - 1) - 1.0f; }
inline float y_norm(int row, int height) { return 2.0f * static_cast<float>(row) / static_cast<float>(height - 1) - 1.0f; }

/// Pixels whose whole central-difference stencil lies inside the contact
/// disk. Finite differences straddling the rim see the slope kink of the
/// cap, so these are the pixels whose gradients are meaningfully "known".
Mask evaluation_region(const Mask& contact);

/// Splits presses 80/20 by whole press (max(1, round(0.2 n)) test presses)
/// using `split_seed`, then samples every press: all evaluation-region
/// pixels with analytic gradients, plus round(0.05 x that count) pixels
/// outside the contact disk (dilated by one pixel) with zero gradients.
CalibrationSet build_calibration_set(const std::vector<PressRecord>& presses, const sim::SensorConfig& config,
                                     std::uint64_t split_seed);

/// Mapper design matrix (present channels, x, y) and targets (gx, gy).
/// Without the Gx light (RB, R) the gx target is 0: the sign of Gx is not
/// observable there and that output is discarded downstream anyway.
Eigen::MatrixXd mapper_features(const std::vector<CalibrationSample>& samples, const LightConfigMode& mode);
Eigen::MatrixXd mapper_targets(const std::vector<CalibrationSample>& samples, const LightConfigMode& mode);

nnet::MlpTrainResult train_mapper(const std::vector<CalibrationSample>& train, const LightConfigMode& mode,
                                  const nnet::TrainConfig& cfg);

/// `count` presses with centres and depths spread over the sensor. The
/// contact circle keeps a 0.5 mm margin from the raster edge.
std::vector<sim::BallPress> random_presses(int count, const sim::SensorConfig& config, std::uint64_t seed,
                                           double min_depth = 0.3, double max_depth = 1.0);

/// Renders each press (and the shared background) with `config`.
std::vector<PressRecord> render_presses(const std::vector<sim::BallPress>& presses, const sim::SensorConfig& config);

}  // namespace wedge::recon
