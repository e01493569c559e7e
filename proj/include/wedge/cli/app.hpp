#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wedge/imgproc/inpaint.hpp"
#include "wedge/recon/modes.hpp"
#include "wedge/sim/sensor_config.hpp"

namespace wedge::cli {

/// Bad flags or flag values; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings shared by every verb; loaded from --config and overridden by flags.
struct PipelineConfig {
  sim::SensorConfig sensor = sim::SensorConfig::wedge_rgb();
  recon::LightConfigMode mode;
  imgproc::MarkerMethod marker_method = imgproc::MarkerMethod::Linear;
  std::string mapper_weights;
  std::string completion_weights;
  float contact_threshold = 0.05f;
  std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);
PipelineConfig load_config(const std::filesystem::path& path);

/// FNV-1a over a canonical JSON dump; recorded in manifests.
std::string config_hash(const nlohmann::json& j);

/// Runs one command line (args exclude the program name). Returns the exit
/// code: 0 success, 1 runtime failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wedge::cli
