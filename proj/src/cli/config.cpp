#include <cstdio>
#include <fstream>

#include "wedge/cli/app.hpp"
#include "wedge/core/error.hpp"

namespace wedge::cli {

void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = nlohmann::json{{"sensor", c.sensor},
                     {"mode", recon::to_string(c.mode.lights)},
                     {"use_completion", c.mode.use_completion},
                     {"marker_method", imgproc::to_string(c.marker_method)},
                     {"mapper_weights", c.mapper_weights},
                     {"completion_weights", c.completion_weights},
                     {"contact_threshold", c.contact_threshold},
                     {"seed", c.seed}};
}

// Every field is optional; absent ones keep their defaults.
void from_json(const nlohmann::json& j, PipelineConfig& c) {
  if (j.contains("sensor")) j.at("sensor").get_to(c.sensor);
  if (j.contains("mode")) c.mode.lights = recon::lights_from_string(j.at("mode").get<std::string>());
  if (j.contains("use_completion")) j.at("use_completion").get_to(c.mode.use_completion);
  if (j.contains("marker_method")) c.marker_method = imgproc::marker_method_from_string(j.at("marker_method").get<std::string>());
  if (j.contains("mapper_weights")) j.at("mapper_weights").get_to(c.mapper_weights);
  if (j.contains("completion_weights")) j.at("completion_weights").get_to(c.completion_weights);
  if (j.contains("contact_threshold")) j.at("contact_threshold").get_to(c.contact_threshold);
  if (j.contains("seed")) j.at("seed").get_to(c.seed);
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  PipelineConfig c;
  try {
    from_json(nlohmann::json::parse(in), c);
    c.sensor.validate();
    c.mode.validate();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return c;
}

std::string config_hash(const nlohmann::json& j) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wedge::cli
