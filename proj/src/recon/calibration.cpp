#include "wedge/recon/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wedge/core/error.hpp"
#include "wedge/imgproc/contact.hpp"
#include "wedge/sim/render.hpp"

namespace wedge::recon {
namespace {

constexpr double kNonContactShare = 0.05;
constexpr double kTestShare = 0.2;

void sample_press(const PressRecord& rec, const sim::SensorConfig& config, std::mt19937_64& rng,
                  std::vector<CalibrationSample>& out) {
  const sim::BallPressImage truth = sim::gen_ball_press(rec.press, config);
  const TactileFrame diff = imgproc::diff_image(rec.frame, rec.background);
  const Mask region = evaluation_region(truth.contact);
  const Mask near = imgproc::dilate4(truth.contact);
  const int h = config.height, w = config.width;

  auto make = [&](int r, int c, float gx, float gy, bool contact) {
    CalibrationSample s;
    for (int ch = 0; ch < 3; ++ch) s.rgb[ch] = diff.at(r, c, ch);
    s.x_norm = x_norm(c, w);
    s.y_norm = y_norm(r, h);
    s.gx = gx;
    s.gy = gy;
    s.in_contact = contact;
    return s;
  };

  std::size_t n_contact = 0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (is_set(region, r, c)) {
        out.push_back(make(r, c, truth.analytic.at(r, c, 0), truth.analytic.at(r, c, 1), true));
        ++n_contact;
      }

  std::vector<int> free;
  for (int i = 0; i < h * w; ++i)
    if (near.data()[static_cast<std::size_t>(i)] == 0.0f) free.push_back(i);
  const std::size_t n_free = std::min(free.size(), static_cast<std::size_t>(std::lround(kNonContactShare * n_contact)));
  // Partial Fisher-Yates: a uniform draw without replacement.
  for (std::size_t k = 0; k < n_free; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, free.size() - 1);
    std::swap(free[k], free[pick(rng)]);
    out.push_back(make(free[k] / w, free[k] % w, 0.0f, 0.0f, false));
  }
}

}  // namespace

Mask evaluation_region(const Mask& contact) { return imgproc::erode4(contact); }

CalibrationSet build_calibration_set(const std::vector<PressRecord>& presses, const sim::SensorConfig& config,
                                     std::uint64_t split_seed) {
  if (presses.size() < 2) throw InvalidArgument("build_calibration_set: need at least 2 presses");
  config.validate();
  for (const auto& p : presses) {
    if (p.frame.height() != config.height || p.frame.width() != config.width || !p.frame.same_shape(p.background)) {
      throw InvalidArgument("build_calibration_set: frame size does not match the sensor config");
    }
  }

  std::mt19937_64 rng(split_seed);
  std::vector<std::size_t> order(presses.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_test =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(kTestShare * static_cast<double>(presses.size()))));

  CalibrationSet set;
  set.test_presses.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  set.train_presses.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(set.test_presses.begin(), set.test_presses.end());
  std::sort(set.train_presses.begin(), set.train_presses.end());
  for (std::size_t i : set.train_presses) sample_press(presses[i], config, rng, set.train);
  for (std::size_t i : set.test_presses) sample_press(presses[i], config, rng, set.test);
  return set;
}

Eigen::MatrixXd mapper_features(const std::vector<CalibrationSample>& samples, const LightConfigMode& mode) {
  const auto channels = mode.channels();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), mode.mapper_inputs());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    Eigen::Index k = 0;
    for (auto ch : channels) x(r, k++) = samples[i].rgb[static_cast<int>(ch)];
    x(r, k++) = samples[i].x_norm;
    x(r, k) = samples[i].y_norm;
  }
  return x;
}

Eigen::MatrixXd mapper_targets(const std::vector<CalibrationSample>& samples, const LightConfigMode& mode) {
  const bool keep_gx = !mode.lacks_gx_light();
  Eigen::MatrixXd y(static_cast<Eigen::Index>(samples.size()), 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    y(static_cast<Eigen::Index>(i), 0) = keep_gx ? samples[i].gx : 0.0f;
    y(static_cast<Eigen::Index>(i), 1) = samples[i].gy;
  }
  return y;
}

nnet::MlpTrainResult train_mapper(const std::vector<CalibrationSample>& train, const LightConfigMode& mode,
                                  const nnet::TrainConfig& cfg) {
  if (train.empty()) throw InvalidArgument("train_mapper: empty calibration set");
  nnet::MlpSpec spec;
  spec.widths.front() = mode.mapper_inputs();
  return nnet::mlp_train(spec, mapper_features(train, mode), mapper_targets(train, mode), cfg);
}

std::vector<sim::BallPress> random_presses(int count, const sim::SensorConfig& config, std::uint64_t seed,
                                           double min_depth, double max_depth) {
  if (count < 0) throw InvalidArgument("random_presses: negative count");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> depth(min_depth, max_depth);
  std::vector<sim::BallPress> out;
  for (int i = 0; i < count; ++i) {
    sim::BallPress p;
    p.press_depth = depth(rng);
    const double margin = p.contact_radius() + 0.5;
    const double max_x = (config.width - 1) / config.ppmm - margin;
    const double max_y = (config.height - 1) / config.ppmm - margin;
    if (max_x < margin || max_y < margin) throw InvalidArgument("random_presses: sensor too small for the ball");
    p.center_x = std::uniform_real_distribution<double>(margin, max_x)(rng);
    p.center_y = std::uniform_real_distribution<double>(margin, max_y)(rng);
    out.push_back(p);
  }
  return out;
}

std::vector<PressRecord> render_presses(const std::vector<sim::BallPress>& presses, const sim::SensorConfig& config) {
  const TactileFrame background = sim::render_background(config);
  std::vector<PressRecord> out;
  out.reserve(presses.size());
  for (const auto& p : presses) {
    out.push_back({sim::render_frame(sim::gen_ball_press(p, config).depth, config), background, p});
  }
  return out;
}

}  // namespace wedge::recon
