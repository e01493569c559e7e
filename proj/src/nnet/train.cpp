#include "wedge/nnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>

#include "wedge/core/error.hpp"

namespace wedge::nnet {
namespace {

std::vector<std::span<double>> params_of(MlpWeights& w) {
  std::vector<std::span<double>> out;
  for (auto& l : w.layers) {
    out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
    out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  }
  return out;
}

std::vector<std::span<double>> params_of(EncDecWeights& w) {
  std::vector<std::span<double>> out;
  for (auto& c : w.convs) {
    out.emplace_back(c.weight.data(), static_cast<std::size_t>(c.weight.size()));
    out.emplace_back(c.bias.data(), static_cast<std::size_t>(c.bias.size()));
  }
  return out;
}

template <class W>
void round_to_f32(W& w) {
  for (auto p : params_of(w))
    for (double& v : p) v = static_cast<double>(static_cast<float>(v));
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

Split split_indices(std::size_t n, const TrainConfig& cfg, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::size_t n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(n)));
  if (n_val >= n) n_val = n - 1;
  Split s;
  s.validation.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
  s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  return s;
}

/// Shared SGD-with-momentum loop. `batch_grad(w, batch, grad)` returns the
/// batch loss; `eval(w, idx)` returns the mean loss over `idx`.
template <class W, class BatchGrad, class Eval>
TrainHistory run_sgd(W& weights, const Split& split, const TrainConfig& cfg, std::mt19937_64& rng,
                     BatchGrad&& batch_grad, Eval&& eval) {
  TrainHistory hist;
  W grad = weights;
  W velocity = weights;
  for (auto p : params_of(velocity)) std::fill(p.begin(), p.end(), 0.0);
  W best = weights;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  std::vector<std::size_t> order = split.train;
  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t len = std::min(bs, order.size() - start);
      const std::span<const std::size_t> batch(order.data() + start, len);
      const double loss = batch_grad(weights, batch, grad);
      if (!std::isfinite(loss)) throw TrainingDiverged(epoch, cfg.learning_rate);
      sum += loss * static_cast<double>(len);

      auto pw = params_of(weights);
      auto pg = params_of(grad);
      auto pv = params_of(velocity);
      for (std::size_t t = 0; t < pw.size(); ++t) {
        for (std::size_t i = 0; i < pw[t].size(); ++i) {
          pv[t][i] = cfg.momentum * pv[t][i] + pg[t][i];
          pw[t][i] -= cfg.learning_rate * pv[t][i];
        }
      }
    }
    const double train_loss = sum / static_cast<double>(order.size());
    const double val_loss = split.validation.empty() ? train_loss : eval(weights, split.validation);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) throw TrainingDiverged(epoch, cfg.learning_rate);
    hist.train_loss.push_back(train_loss);
    hist.validation_loss.push_back(val_loss);

    if (val_loss < best_val) {
      best_val = val_loss;
      best = weights;
      hist.best_epoch = epoch;
      since_best = 0;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      break;
    }
  }
  weights = std::move(best);
  round_to_f32(weights);
  hist.final_train_loss = hist.train_loss[static_cast<std::size_t>(hist.best_epoch)];
  hist.final_validation_loss = hist.validation_loss[static_cast<std::size_t>(hist.best_epoch)];
  return hist;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

}  // namespace

TrainConfig TrainConfig::mlp_defaults() {
  TrainConfig c;
  c.learning_rate = 0.1;
  return c;
}

TrainConfig TrainConfig::encdec_defaults() {
  TrainConfig c;
  c.learning_rate = 3e-2;
  c.batch_size = 8;
  c.epochs = 40;
  return c;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InvalidArgument("learning rate must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw InvalidArgument("momentum must lie in [0, 1)");
  if (batch_size < 1) throw InvalidArgument("batch size must be at least 1");
  if (epochs < 1) throw InvalidArgument("epoch count must be at least 1");
  if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
    throw InvalidArgument("validation fraction must lie in [0, 1)");
  }
}

MlpTrainResult mlp_train(const MlpSpec& spec, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                         const TrainConfig& cfg) {
  cfg.validate();
  spec.validate();
  if (inputs.rows() < 1 || inputs.rows() != targets.rows()) {
    throw InvalidArgument("mlp_train: need equally many (non-zero) input and target rows");
  }
  if (inputs.cols() != spec.widths.front() || targets.cols() != spec.widths.back()) {
    throw InvalidArgument("mlp_train: data width does not match the network spec");
  }
  if (!inputs.allFinite() || !targets.allFinite()) throw InvalidArgument("mlp_train: non-finite training data");

  std::mt19937_64 rng(cfg.seed);
  MlpTrainResult r;
  r.weights = mlp_init(spec, rng());
  const Split split = split_indices(static_cast<std::size_t>(inputs.rows()), cfg, rng);
  const Eigen::MatrixXd val_x = gather_rows(inputs, split.validation);
  const Eigen::MatrixXd val_y = gather_rows(targets, split.validation);

  r.history = run_sgd(
      r.weights, split, cfg, rng,
      [&](const MlpWeights& w, std::span<const std::size_t> batch, MlpWeights& grad) {
        return mlp_loss_and_grad(w, gather_rows(inputs, batch), gather_rows(targets, batch), &grad);
      },
      [&](const MlpWeights& w, const std::vector<std::size_t>&) { return mlp_loss_and_grad(w, val_x, val_y, nullptr); });
  return r;
}

EncDecTrainResult encdec_train(const EncDecSpec& spec, const std::vector<EncDecSample>& dataset,
                               const TrainConfig& cfg) {
  cfg.validate();
  spec.validate();
  if (dataset.empty()) throw InvalidArgument("encdec_train: empty dataset");

  std::mt19937_64 rng(cfg.seed);
  EncDecTrainResult r;
  r.weights = encdec_init(spec, rng());
  const Split split = split_indices(dataset.size(), cfg, rng);

  auto gather = [&](std::span<const std::size_t> idx, std::vector<Raster<1>>& in, std::vector<Raster<1>>& tg) {
    in.clear();
    tg.clear();
    for (std::size_t i : idx) {
      in.push_back(dataset[i].input);
      tg.push_back(dataset[i].target);
    }
  };
  std::vector<Raster<1>> in, tg;
  r.history = run_sgd(
      r.weights, split, cfg, rng,
      [&](const EncDecWeights& w, std::span<const std::size_t> batch, EncDecWeights& grad) {
        gather(batch, in, tg);
        return encdec_loss_and_grad(w, in, tg, &grad);
      },
      [&](const EncDecWeights& w, const std::vector<std::size_t>& idx) {
        gather(idx, in, tg);
        return encdec_loss_and_grad(w, in, tg, nullptr);
      });
  return r;
}

}  // namespace wedge::nnet
