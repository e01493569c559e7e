#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wedge/nnet/encdec.hpp"
#include "wedge/nnet/mlp.hpp"
#include "wedge/recon/calibration.hpp"

namespace wedge::recon {

struct GradientErrors {
  double gx_rmse = 0.0;
  double gy_rmse = 0.0;
  double theta_x_deg = 0.0;  // mean |atan(est) - atan(truth)|
  double theta_y_deg = 0.0;
  double gx_mae = 0.0;
  double gy_mae = 0.0;
  std::size_t pixels = 0;
};

/// Errors over the pixels set in `region`.
GradientErrors gradient_errors(const GradientField& estimate, const GradientField& truth, const Mask& region);

/// Accumulates squared / absolute / angular errors over several images.
class ErrorAccumulator {
 public:
  void add(const GradientField& estimate, const GradientField& truth, const Mask& region);
  GradientErrors result() const;

 private:
  double sx2_ = 0.0, sy2_ = 0.0, ax_ = 0.0, ay_ = 0.0, tx_ = 0.0, ty_ = 0.0;
  std::size_t n_ = 0;
};

struct AblationRow {
  LightConfigMode mode;
  GradientErrors errors;
};

struct AblationReport {
  std::vector<AblationRow> rows;

  /// Throws InvalidArgument when the row is absent.
  const AblationRow& row(Lights lights, bool use_nn) const;
  /// Header `mode,use_nn,gx_rmse,gy_rmse,theta_x_deg,theta_y_deg,gx_mae,gy_mae`.
  std::string to_csv() const;
};

struct TrainedComponents {
  std::map<Lights, nnet::MlpWeights> mappers;
  std::optional<nnet::EncDecWeights> completion;
};

/// Evaluates every requested light configuration on the test presses
/// against the analytic ball gradients over the evaluation region. RB and R
/// get a zero-fill row and, when completion weights exist, a completion row.
AblationReport ablate_configs(const std::vector<PressRecord>& test_presses, const sim::SensorConfig& config,
                              const TrainedComponents& components, const std::vector<Lights>& modes);

}  // namespace wedge::recon
