#include "wedge/nnet/mlp.hpp"

#include <cmath>
#include <random>

#include "wedge/core/error.hpp"

namespace wedge::nnet {

void MlpSpec::validate() const {
  if (widths.size() < 2) throw InvalidArgument("mlp spec: need at least input and output widths");
  for (int w : widths)
    if (w < 1) throw InvalidArgument("mlp spec: layer widths must be positive");
}

int MlpWeights::input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols()); }
int MlpWeights::output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows()); }

MlpSpec MlpWeights::spec() const {
  MlpSpec s;
  s.widths.clear();
  s.widths.push_back(input_dim());
  for (const auto& l : layers) s.widths.push_back(static_cast<int>(l.weight.rows()));
  return s;
}

void MlpWeights::validate() const {
  if (layers.empty()) throw InvalidArgument("mlp weights: no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.weight.rows() < 1 || l.weight.cols() < 1 || l.bias.size() != l.weight.rows()) {
      throw InvalidArgument("mlp weights: layer " + std::to_string(i) + " has inconsistent shapes");
    }
    if (i > 0 && l.weight.cols() != layers[i - 1].weight.rows()) {
      throw InvalidArgument("mlp weights: layer " + std::to_string(i) + " does not chain with its predecessor");
    }
    if (!l.weight.allFinite() || !l.bias.allFinite()) throw InvalidArgument("mlp weights: non-finite values");
  }
}

MlpWeights mlp_zeros(const MlpSpec& spec) {
  spec.validate();
  MlpWeights w;
  for (std::size_t i = 0; i + 1 < spec.widths.size(); ++i) {
    w.layers.push_back({Eigen::MatrixXd::Zero(spec.widths[i + 1], spec.widths[i]), Eigen::VectorXd::Zero(spec.widths[i + 1])});
  }
  return w;
}

MlpWeights mlp_init(const MlpSpec& spec, std::uint64_t seed) {
  MlpWeights w = mlp_zeros(spec);
  std::mt19937_64 rng(seed);
  for (auto& l : w.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.weight.rows() + l.weight.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) l.weight(r, c) = dist(rng);
  }
  return w;
}

Eigen::MatrixXd mlp_infer(const MlpWeights& w, const Eigen::MatrixXd& inputs) {
  if (inputs.cols() != w.input_dim()) {
    throw InvalidArgument("mlp_infer: input width " + std::to_string(inputs.cols()) + " does not match network input " +
                          std::to_string(w.input_dim()));
  }
  // Samples are columns internally.
  Eigen::MatrixXd a = inputs.transpose();
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    Eigen::MatrixXd z = w.layers[i].weight * a;
    z.colwise() += w.layers[i].bias;
    a = (i + 1 < w.layers.size()) ? Eigen::MatrixXd(z.array().tanh()) : z;
  }
  return a.transpose();
}

double mlp_loss_and_grad(const MlpWeights& w, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                         MlpWeights* grad) {
  if (inputs.cols() != w.input_dim() || targets.cols() != w.output_dim() || inputs.rows() != targets.rows()) {
    throw InvalidArgument("mlp_loss_and_grad: dataset shape does not match network");
  }
  const std::size_t n_layers = w.layers.size();
  std::vector<Eigen::MatrixXd> acts;  // acts[i] = input of layer i
  acts.reserve(n_layers + 1);
  acts.push_back(inputs.transpose());
  for (std::size_t i = 0; i < n_layers; ++i) {
    Eigen::MatrixXd z = w.layers[i].weight * acts.back();
    z.colwise() += w.layers[i].bias;
    acts.push_back(i + 1 < n_layers ? Eigen::MatrixXd(z.array().tanh()) : z);
  }
  const Eigen::MatrixXd diff = acts.back() - targets.transpose();
  const double count = static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() / count;
  if (grad == nullptr) return loss;

  grad->layers.resize(n_layers);
  Eigen::MatrixXd delta = (2.0 / count) * diff;  // dL/dz of the output layer
  for (std::size_t i = n_layers; i-- > 0;) {
    grad->layers[i].weight = delta * acts[i].transpose();
    grad->layers[i].bias = delta.rowwise().sum();
    if (i > 0) {
      const Eigen::MatrixXd back = w.layers[i].weight.transpose() * delta;
      delta = back.array() * (1.0 - acts[i].array().square());
    }
  }
  return loss;
}

}  // namespace wedge::nnet
