#include "wedge/recon/modes.hpp"

#include <sstream>

#include "wedge/core/error.hpp"

namespace wedge::recon {

std::string to_string(Lights l) {
  switch (l) {
    case Lights::RGB: return "RGB";
    case Lights::RG: return "RG";
    case Lights::RB: return "RB";
    case Lights::R: return "R";
  }
  return "?";
}

Lights lights_from_string(const std::string& s) {
  if (s == "RGB") return Lights::RGB;
  if (s == "RG") return Lights::RG;
  if (s == "RB") return Lights::RB;
  if (s == "R") return Lights::R;
  throw InvalidArgument("unknown light configuration '" + s + "' (expected RGB|RG|RB|R)");
}

std::vector<Lights> lights_list_from_string(const std::string& s) {
  std::vector<Lights> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(lights_from_string(item));
  }
  if (out.empty()) throw InvalidArgument("empty light configuration list");
  return out;
}

void LightConfigMode::validate() const {
  if (use_completion && !lacks_gx_light()) {
    throw InvalidArgument("gradient completion applies to RB and R only, not " + to_string(lights));
  }
}

std::vector<sim::Channel> LightConfigMode::channels() const {
  using sim::Channel;
  switch (lights) {
    case Lights::RGB: return {Channel::R, Channel::G, Channel::B};
    case Lights::RG: return {Channel::R, Channel::G};
    case Lights::RB: return {Channel::R, Channel::B};
    case Lights::R: return {Channel::R};
  }
  return {};
}

std::string LightConfigMode::label() const { return to_string(lights) + (use_completion ? "+NN" : ""); }

}  // namespace wedge::recon
