#include "wedge/nnet/encdec.hpp"

#include <cmath>
#include <random>

#include "wedge/core/error.hpp"

namespace wedge::nnet {
namespace {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

/// Pixels x channels, pixels in row-major order; each channel is a contiguous column.
template <class S>
struct Feature {
  int h = 0;
  int w = 0;
  Mat<S> m;
};

template <class S>
Mat<S> im2col(const Feature<S>& x) {
  const int h = x.h, w = x.w;
  const int channels = static_cast<int>(x.m.cols());
  Mat<S> cols(static_cast<Eigen::Index>(h) * w, static_cast<Eigen::Index>(channels) * 9);
  for (int ci = 0; ci < channels; ++ci) {
    const S* src = x.m.col(ci).data();
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        S* dst = cols.col(ci * 9 + ky * 3 + kx).data();
        const int dy = ky - 1, dx = kx - 1;
        for (int y = 0; y < h; ++y) {
          S* row = dst + static_cast<std::ptrdiff_t>(y) * w;
          const int yy = y + dy;
          if (yy < 0 || yy >= h) {
            std::fill(row, row + w, S(0));
            continue;
          }
          const S* srow = src + static_cast<std::ptrdiff_t>(yy) * w;
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(w, w - dx);
          for (int xi = 0; xi < x0; ++xi) row[xi] = S(0);
          for (int xi = x0; xi < x1; ++xi) row[xi] = srow[xi + dx];
          for (int xi = x1; xi < w; ++xi) row[xi] = S(0);
        }
      }
    }
  }
  return cols;
}

template <class S>
Feature<S> col2im(const Mat<S>& dcols, int h, int w) {
  const int channels = static_cast<int>(dcols.cols() / 9);
  Feature<S> out{h, w, Mat<S>::Zero(static_cast<Eigen::Index>(h) * w, channels)};
  for (int ci = 0; ci < channels; ++ci) {
    S* dst = out.m.col(ci).data();
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const S* src = dcols.col(ci * 9 + ky * 3 + kx).data();
        const int dy = ky - 1, dx = kx - 1;
        for (int y = 0; y < h; ++y) {
          const int yy = y + dy;
          if (yy < 0 || yy >= h) continue;
          const S* srow = src + static_cast<std::ptrdiff_t>(y) * w;
          S* drow = dst + static_cast<std::ptrdiff_t>(yy) * w;
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(w, w - dx);
          for (int xi = x0; xi < x1; ++xi) drow[xi + dx] += srow[xi];
        }
      }
    }
  }
  return out;
}

template <class S>
Feature<S> avg_pool(const Feature<S>& x) {
  const int h = x.h / 2, w = x.w / 2;
  Feature<S> out{h, w, Mat<S>(static_cast<Eigen::Index>(h) * w, x.m.cols())};
  for (Eigen::Index ch = 0; ch < x.m.cols(); ++ch) {
    const S* src = x.m.col(ch).data();
    S* dst = out.m.col(ch).data();
    for (int y = 0; y < h; ++y)
      for (int xi = 0; xi < w; ++xi) {
        const S* p = src + static_cast<std::ptrdiff_t>(2 * y) * x.w + 2 * xi;
        dst[y * w + xi] = S(0.25) * (p[0] + p[1] + p[x.w] + p[x.w + 1]);
      }
  }
  return out;
}

template <class S>
Feature<S> avg_pool_backward(const Feature<S>& d, int h, int w) {
  Feature<S> out{h, w, Mat<S>(static_cast<Eigen::Index>(h) * w, d.m.cols())};
  for (Eigen::Index ch = 0; ch < d.m.cols(); ++ch) {
    const S* src = d.m.col(ch).data();
    S* dst = out.m.col(ch).data();
    for (int y = 0; y < h; ++y)
      for (int xi = 0; xi < w; ++xi) dst[y * w + xi] = S(0.25) * src[(y / 2) * d.w + xi / 2];
  }
  return out;
}

template <class S>
Feature<S> upsample(const Feature<S>& x) {
  const int h = x.h * 2, w = x.w * 2;
  Feature<S> out{h, w, Mat<S>(static_cast<Eigen::Index>(h) * w, x.m.cols())};
  for (Eigen::Index ch = 0; ch < x.m.cols(); ++ch) {
    const S* src = x.m.col(ch).data();
    S* dst = out.m.col(ch).data();
    for (int y = 0; y < h; ++y)
      for (int xi = 0; xi < w; ++xi) dst[y * w + xi] = src[(y / 2) * x.w + xi / 2];
  }
  return out;
}

template <class S>
Feature<S> upsample_backward(const Feature<S>& d) {
  const int h = d.h / 2, w = d.w / 2;
  Feature<S> out{h, w, Mat<S>(static_cast<Eigen::Index>(h) * w, d.m.cols())};
  for (Eigen::Index ch = 0; ch < d.m.cols(); ++ch) {
    const S* src = d.m.col(ch).data();
    S* dst = out.m.col(ch).data();
    for (int y = 0; y < h; ++y)
      for (int xi = 0; xi < w; ++xi) {
        const S* p = src + static_cast<std::ptrdiff_t>(2 * y) * d.w + 2 * xi;
        dst[y * w + xi] = p[0] + p[1] + p[d.w] + p[d.w + 1];
      }
  }
  return out;
}

template <class S>
Feature<S> concat(const Feature<S>& a, const Feature<S>& b) {
  Feature<S> out{a.h, a.w, Mat<S>(a.m.rows(), a.m.cols() + b.m.cols())};
  out.m << a.m, b.m;
  return out;
}

template <class S>
struct Layer {
  Mat<S> weight;
  Eigen::Matrix<S, 1, Eigen::Dynamic> bias;
};

template <class S>
struct Net {
  std::array<int, 3> channels;
  std::vector<Layer<S>> convs;
};

template <class S>
Net<S> cast_net(const EncDecWeights& w) {
  Net<S> n{w.spec.channels, {}};
  for (const auto& c : w.convs) n.convs.push_back({c.weight.cast<S>(), c.bias.transpose().cast<S>()});
  return n;
}

template <class S>
struct Cache {
  std::array<Mat<S>, kConvCount> cols;
  std::array<Feature<S>, kConvCount> out;
};

/// Convolution followed by an optional ReLU; caches the im2col input.
template <class S>
Feature<S> conv(const Layer<S>& layer, const Feature<S>& x, bool relu, Mat<S>* cols_cache) {
  Mat<S> cols = im2col(x);
  Feature<S> y{x.h, x.w, Mat<S>(cols.rows(), layer.weight.rows())};
  y.m.noalias() = cols * layer.weight.transpose();
  y.m.rowwise() += layer.bias;
  if (relu) y.m = y.m.cwiseMax(S(0));
  if (cols_cache != nullptr) *cols_cache = std::move(cols);
  return y;
}

template <class S>
Feature<S> forward(const Net<S>& w, const Feature<S>& x, Cache<S>& cache, bool keep_cols) {
  auto run = [&](int idx, const Feature<S>& in, bool relu) -> const Feature<S>& {
    cache.out[idx] = conv(w.convs[idx], in, relu, keep_cols ? &cache.cols[idx] : nullptr);
    return cache.out[idx];
  };
  const Feature<S>& a = run(kEnc0a, x, true);
  const Feature<S>& s0 = run(kEnc0b, a, true);
  const Feature<S>& b = run(kEnc1a, avg_pool(s0), true);
  const Feature<S>& s1 = run(kEnc1b, b, true);
  const Feature<S>& c = run(kEnc2a, avg_pool(s1), true);
  const Feature<S>& c2 = run(kEnc2b, c, true);
  const Feature<S>& u1 = run(kUp1, upsample(c2), true);
  const Feature<S>& d1 = run(kDec1, concat(u1, s1), true);
  const Feature<S>& u0 = run(kUp0, upsample(d1), true);
  const Feature<S>& d0 = run(kDec0, concat(u0, s0), true);
  return run(kOut, d0, false);
}

/// Accumulates parameter gradients of conv `idx` into `grad` and returns
/// dLoss/dInput (skipped when `need_input_grad` is false).
template <class S>
Feature<S> conv_backward(const Net<S>& w, const Cache<S>& cache, int idx, const Feature<S>& dout, Net<S>& grad,
                         bool need_input_grad) {
  grad.convs[idx].weight.noalias() += dout.m.transpose() * cache.cols[idx];
  grad.convs[idx].bias += dout.m.colwise().sum();
  if (!need_input_grad) return {};
  Mat<S> dcols(dout.m.rows(), w.convs[idx].weight.cols());
  dcols.noalias() = dout.m * w.convs[idx].weight;
  return col2im(dcols, dout.h, dout.w);
}

template <class S>
void relu_backward(Feature<S>& d, const Feature<S>& activated) {
  d.m = (activated.m.array() > S(0)).select(d.m, S(0));
}

template <class S>
void backward(const Net<S>& w, const Cache<S>& cache, const Feature<S>& dy, Net<S>& grad) {
  const int c0 = w.channels[0];
  const int c1 = w.channels[1];
  const auto& out = cache.out;

  Feature<S> d = conv_backward(w, cache, kOut, dy, grad, true);
  relu_backward(d, out[kDec0]);
  Feature<S> dcat0 = conv_backward(w, cache, kDec0, d, grad, true);
  Feature<S> du0{dcat0.h, dcat0.w, dcat0.m.leftCols(c0)};
  Feature<S> ds0{dcat0.h, dcat0.w, dcat0.m.rightCols(c0)};

  relu_backward(du0, out[kUp0]);
  d = upsample_backward(conv_backward(w, cache, kUp0, du0, grad, true));
  relu_backward(d, out[kDec1]);
  Feature<S> dcat1 = conv_backward(w, cache, kDec1, d, grad, true);
  Feature<S> du1{dcat1.h, dcat1.w, dcat1.m.leftCols(c1)};
  Feature<S> ds1{dcat1.h, dcat1.w, dcat1.m.rightCols(c1)};

  relu_backward(du1, out[kUp1]);
  d = upsample_backward(conv_backward(w, cache, kUp1, du1, grad, true));
  relu_backward(d, out[kEnc2b]);
  d = conv_backward(w, cache, kEnc2b, d, grad, true);
  relu_backward(d, out[kEnc2a]);
  d = conv_backward(w, cache, kEnc2a, d, grad, true);
  d = avg_pool_backward(d, ds1.h, ds1.w);
  d.m += ds1.m;

  relu_backward(d, out[kEnc1b]);
  d = conv_backward(w, cache, kEnc1b, d, grad, true);
  relu_backward(d, out[kEnc1a]);
  d = conv_backward(w, cache, kEnc1a, d, grad, true);
  d = avg_pool_backward(d, ds0.h, ds0.w);
  d.m += ds0.m;

  relu_backward(d, out[kEnc0b]);
  d = conv_backward(w, cache, kEnc0b, d, grad, true);
  relu_backward(d, out[kEnc0a]);
  conv_backward(w, cache, kEnc0a, d, grad, false);
}

template <class S>
Feature<S> to_feature(const Raster<1>& r) {
  Feature<S> f{r.height(), r.width(), Mat<S>(static_cast<Eigen::Index>(r.pixel_count()), 1)};
  for (std::size_t i = 0; i < r.pixel_count(); ++i) f.m(static_cast<Eigen::Index>(i), 0) = static_cast<S>(r.data()[i]);
  return f;
}

void check_input(const EncDecWeights& w, const Raster<1>& input) {
  if (w.convs.size() != kConvCount) throw InvalidArgument("encdec: weights are incomplete");
  if (w.spec.in_channels != 1 || w.spec.out_channels != 1) {
    throw InvalidArgument("encdec: raster interface supports single-channel networks only");
  }
  if (input.height() % 4 != 0 || input.width() % 4 != 0) {
    throw InvalidArgument("encdec: input " + std::to_string(input.height()) + "x" + std::to_string(input.width()) +
                          " is not divisible by 4; pad it first");
  }
}

template <class S>
double loss_and_grad(const EncDecWeights& w, std::span<const Raster<1>> inputs, std::span<const Raster<1>> targets,
                     EncDecWeights* grad) {
  if (inputs.empty() || inputs.size() != targets.size()) throw InvalidArgument("encdec: need equally many inputs and targets");
  const Net<S> net = cast_net<S>(w);
  Net<S> g;
  if (grad != nullptr) {
    *grad = encdec_zeros(w.spec);
    g = cast_net<S>(*grad);
  }

  double count = 0.0;
  for (const auto& in : inputs) count += static_cast<double>(in.pixel_count());

  double total = 0.0;
  Cache<S> cache;
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    check_input(w, inputs[s]);
    if (!inputs[s].same_shape(targets[s])) throw InvalidArgument("encdec: input and target sizes differ");
    Feature<S> dy = forward(net, to_feature<S>(inputs[s]), cache, grad != nullptr);
    dy.m -= to_feature<S>(targets[s]).m;
    total += static_cast<double>(dy.m.template cast<double>().squaredNorm());
    if (grad != nullptr) {
      dy.m *= static_cast<S>(2.0 / count);
      backward(net, cache, dy, g);
    }
  }
  if (grad != nullptr) {
    for (int i = 0; i < kConvCount; ++i) {
      grad->convs[i].weight = g.convs[i].weight.template cast<double>();
      grad->convs[i].bias = g.convs[i].bias.transpose().template cast<double>();
    }
  }
  return total / count;
}

}  // namespace

void EncDecSpec::validate() const {
  if (in_channels < 1 || out_channels < 1) throw InvalidArgument("encdec spec: channel counts must be positive");
  for (int c : channels)
    if (c < 1) throw InvalidArgument("encdec spec: level widths must be positive");
}

std::array<std::pair<int, int>, kConvCount> conv_shapes(const EncDecSpec& s) {
  const auto [c0, c1, c2] = s.channels;
  return {{{s.in_channels, c0},
           {c0, c0},
           {c0, c1},
           {c1, c1},
           {c1, c2},
           {c2, c2},
           {c2, c1},
           {2 * c1, c1},
           {c1, c0},
           {2 * c0, c0},
           {c0, s.out_channels}}};
}

void EncDecWeights::validate() const {
  spec.validate();
  if (convs.size() != kConvCount) throw InvalidArgument("encdec weights: expected 11 convolutions");
  const auto shapes = conv_shapes(spec);
  for (int i = 0; i < kConvCount; ++i) {
    const auto& c = convs[i];
    if (c.weight.cols() != shapes[i].first * 9 || c.weight.rows() != shapes[i].second || c.bias.size() != shapes[i].second) {
      throw InvalidArgument("encdec weights: convolution " + std::to_string(i) + " has the wrong shape");
    }
    if (!c.weight.allFinite() || !c.bias.allFinite()) throw InvalidArgument("encdec weights: non-finite values");
  }
}

EncDecWeights encdec_zeros(const EncDecSpec& spec) {
  spec.validate();
  EncDecWeights w;
  w.spec = spec;
  for (const auto& [in, out] : conv_shapes(spec)) {
    w.convs.push_back({Eigen::MatrixXd::Zero(out, static_cast<Eigen::Index>(in) * 9), Eigen::VectorXd::Zero(out)});
  }
  return w;
}

EncDecWeights encdec_init(const EncDecSpec& spec, std::uint64_t seed) {
  EncDecWeights w = encdec_zeros(spec);
  std::mt19937_64 rng(seed);
  for (auto& c : w.convs) {
    const double fan_in = static_cast<double>(c.weight.cols());
    const double fan_out = static_cast<double>(c.weight.rows()) * 9.0;
    std::uniform_real_distribution<double> dist(-std::sqrt(6.0 / (fan_in + fan_out)), std::sqrt(6.0 / (fan_in + fan_out)));
    for (Eigen::Index col = 0; col < c.weight.cols(); ++col)
      for (Eigen::Index row = 0; row < c.weight.rows(); ++row) c.weight(row, col) = dist(rng);
  }
  return w;
}

Raster<1> encdec_infer(const EncDecWeights& w, const Raster<1>& input, Precision precision) {
  check_input(w, input);
  Raster<1> out(input.height(), input.width());
  auto store = [&](const auto& y) {
    for (std::size_t i = 0; i < out.pixel_count(); ++i) out.data()[i] = static_cast<float>(y.m(static_cast<Eigen::Index>(i), 0));
  };
  if (precision == Precision::F32) {
    Cache<float> cache;
    store(forward(cast_net<float>(w), to_feature<float>(input), cache, false));
  } else {
    Cache<double> cache;
    store(forward(cast_net<double>(w), to_feature<double>(input), cache, false));
  }
  return out;
}

double encdec_loss_and_grad(const EncDecWeights& w, std::span<const Raster<1>> inputs,
                            std::span<const Raster<1>> targets, EncDecWeights* grad, Precision precision) {
  return precision == Precision::F32 ? loss_and_grad<float>(w, inputs, targets, grad)
                                     : loss_and_grad<double>(w, inputs, targets, grad);
}

}  // namespace wedge::nnet
