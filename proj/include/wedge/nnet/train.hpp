#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "wedge/nnet/encdec.hpp"
#include "wedge/nnet/mlp.hpp"

namespace wedge::nnet {

/// Mini-batch gradient descent with momentum on mean squared error.
struct TrainConfig {
  double learning_rate = 1e-2;
  double momentum = 0.9;
  int batch_size = 256;
  int epochs = 200;
  /// Stop after this many epochs without a validation improvement; <= 0 disables.
  int patience = 20;
  /// Share of the dataset held out for validation (split by seeded shuffle).
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;

  static TrainConfig mlp_defaults();
  static TrainConfig encdec_defaults();
  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;       // per epoch, mean over mini-batches
  std::vector<double> validation_loss;  // per epoch; equals train_loss without a hold-out
  int best_epoch = 0;
  double final_train_loss = 0.0;
  double final_validation_loss = 0.0;
};

struct MlpTrainResult {
  MlpWeights weights;
  TrainHistory history;
};

struct EncDecSample {
  Raster<1> input;
  Raster<1> target;
};

struct EncDecTrainResult {
  EncDecWeights weights;
  TrainHistory history;
};

/// Returns the best-validation weights, rounded to f32 so they match what
/// weights_save writes. Throws TrainingDiverged on a non-finite loss.
MlpTrainResult mlp_train(const MlpSpec& spec, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                         const TrainConfig& cfg);

EncDecTrainResult encdec_train(const EncDecSpec& spec, const std::vector<EncDecSample>& dataset,
                               const TrainConfig& cfg);

}  // namespace wedge::nnet
