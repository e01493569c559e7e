#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace wedge::nnet {

/// Layer widths from input to output; tanh on hidden layers, identity output.
struct MlpSpec {
  std::vector<int> widths{5, 32, 32, 32, 2};

  void validate() const;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct MlpWeights {
  std::vector<DenseLayer> layers;

  int input_dim() const;
  int output_dim() const;
  MlpSpec spec() const;
  /// Chained dimensions and finite values; throws InvalidArgument.
  void validate() const;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
MlpWeights mlp_init(const MlpSpec& spec, std::uint64_t seed);
MlpWeights mlp_zeros(const MlpSpec& spec);

/// Forward pass; one sample per row of `inputs`.
Eigen::MatrixXd mlp_infer(const MlpWeights& w, const Eigen::MatrixXd& inputs);

/// Mean squared error over every output entry. When `grad` is non-null it
/// receives dLoss/dParam with the same layout as `w`.
double mlp_loss_and_grad(const MlpWeights& w, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                         MlpWeights* grad);

}  // namespace wedge::nnet
