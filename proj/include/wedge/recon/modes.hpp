#pragma once

#include <string>
#include <vector>

#include "wedge/sim/sensor_config.hpp"

namespace wedge::recon {

/// Which coloured lights are installed.
enum class Lights { RGB, RG, RB, R };

std::string to_string(Lights l);
Lights lights_from_string(const std::string& s);
/// Parses a comma-separated list such as "RGB,RG,RB,R".
std::vector<Lights> lights_list_from_string(const std::string& s);

struct LightConfigMode {
  Lights lights = Lights::RGB;
  /// Learned Gx completion; only RB and R lack a light along x.
  bool use_completion = false;

  /// Throws InvalidArgument for completion on RGB or RG.
  void validate() const;

  std::vector<sim::Channel> channels() const;
  /// Mapper input width: present channels plus (x, y).
  int mapper_inputs() const { return static_cast<int>(channels().size()) + 2; }
  bool lacks_gx_light() const { return lights == Lights::RB || lights == Lights::R; }
  /// "RGB", "RB", "RB+NN", ...
  std::string label() const;

  bool operator==(const LightConfigMode&) const = default;
};

}  // namespace wedge::recon
