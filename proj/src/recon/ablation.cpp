#include "wedge/recon/ablation.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "wedge/core/error.hpp"
#include "wedge/imgproc/contact.hpp"
#include "wedge/recon/completion.hpp"
#include "wedge/recon/reconstruct.hpp"

namespace wedge::recon {

void ErrorAccumulator::add(const GradientField& estimate, const GradientField& truth, const Mask& region) {
  if (!estimate.same_shape(truth) || estimate.height() != region.height() || estimate.width() != region.width()) {
    throw InvalidArgument("gradient_errors: raster sizes differ");
  }
  const double to_deg = 180.0 / std::numbers::pi;
  for (int r = 0; r < region.height(); ++r)
    for (int c = 0; c < region.width(); ++c) {
      if (!is_set(region, r, c)) continue;
      const double ex = static_cast<double>(estimate.at(r, c, 0)) - truth.at(r, c, 0);
      const double ey = static_cast<double>(estimate.at(r, c, 1)) - truth.at(r, c, 1);
      sx2_ += ex * ex;
      sy2_ += ey * ey;
      ax_ += std::abs(ex);
      ay_ += std::abs(ey);
      tx_ += std::abs(std::atan(double(estimate.at(r, c, 0))) - std::atan(double(truth.at(r, c, 0)))) * to_deg;
      ty_ += std::abs(std::atan(double(estimate.at(r, c, 1))) - std::atan(double(truth.at(r, c, 1)))) * to_deg;
      ++n_;
    }
}

GradientErrors ErrorAccumulator::result() const {
  GradientErrors e;
  e.pixels = n_;
  if (n_ == 0) return e;
  const double n = static_cast<double>(n_);
  e.gx_rmse = std::sqrt(sx2_ / n);
  e.gy_rmse = std::sqrt(sy2_ / n);
  e.gx_mae = ax_ / n;
  e.gy_mae = ay_ / n;
  e.theta_x_deg = tx_ / n;
  e.theta_y_deg = ty_ / n;
  return e;
}

GradientErrors gradient_errors(const GradientField& estimate, const GradientField& truth, const Mask& region) {
  ErrorAccumulator acc;
  acc.add(estimate, truth, region);
  return acc.result();
}

const AblationRow& AblationReport::row(Lights lights, bool use_nn) const {
  for (const auto& r : rows)
    if (r.mode.lights == lights && r.mode.use_completion == use_nn) return r;
  throw InvalidArgument("ablation report has no row for " + LightConfigMode{lights, use_nn}.label());
}

std::string AblationReport::to_csv() const {
  std::string out = "mode,use_nn,gx_rmse,gy_rmse,theta_x_deg,theta_y_deg,gx_mae,gy_mae\n";
  char line[256];
  for (const auto& r : rows) {
    const auto& e = r.errors;
    std::snprintf(line, sizeof line, "%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", to_string(r.mode.lights).c_str(),
                  r.mode.use_completion ? 1 : 0, e.gx_rmse, e.gy_rmse, e.theta_x_deg, e.theta_y_deg, e.gx_mae, e.gy_mae);
    out += line;
  }
  return out;
}

AblationReport ablate_configs(const std::vector<PressRecord>& test_presses, const sim::SensorConfig& config,
                              const TrainedComponents& components, const std::vector<Lights>& modes) {
  if (test_presses.empty()) throw InvalidArgument("ablate_configs: no test presses");
  std::vector<LightConfigMode> rows;
  for (Lights l : modes) {
    if (!components.mappers.count(l)) throw InvalidArgument("ablate_configs: no trained mapper for " + to_string(l));
    rows.push_back({l, false});
    if (LightConfigMode{l, false}.lacks_gx_light() && components.completion) rows.push_back({l, true});
  }

  std::vector<ErrorAccumulator> acc(rows.size());
  for (const auto& rec : test_presses) {
    const sim::BallPressImage truth = sim::gen_ball_press(rec.press, config);
    const Mask region = evaluation_region(truth.contact);
    const TactileFrame diff = imgproc::diff_image(rec.frame, rec.background);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const LightConfigMode& mode = rows[i];
      const GradientField g = color_to_gradients(diff, components.mappers.at(mode.lights), LightConfigMode{mode.lights, false});
      const GradientField done = complete_gradients(g, mode, mode.use_completion ? &*components.completion : nullptr);
      acc[i].add(done, truth.analytic, region);
    }
  }
  AblationReport report;
  for (std::size_t i = 0; i < rows.size(); ++i) report.rows.push_back({rows[i], acc[i].result()});
  return report;
}

}  // namespace wedge::recon
