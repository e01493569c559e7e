#include "wedge/sim/sensor_config.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "wedge/core/error.hpp"

namespace wedge::sim {

std::string to_string(Channel c) {
  switch (c) {
    case Channel::R: return "R";
    case Channel::G: return "G";
    case Channel::B: return "B";
  }
  return "?";
}

std::string to_string(Edge e) {
  switch (e) {
    case Edge::Top: return "top";
    case Edge::Bottom: return "bottom";
    case Edge::Left: return "left";
    case Edge::Right: return "right";
  }
  return "?";
}

Channel channel_from_string(const std::string& s) {
  if (s == "R") return Channel::R;
  if (s == "G") return Channel::G;
  if (s == "B") return Channel::B;
  throw InvalidArgument("unknown channel '" + s + "'");
}

Edge edge_from_string(const std::string& s) {
  if (s == "top") return Edge::Top;
  if (s == "bottom") return Edge::Bottom;
  if (s == "left") return Edge::Left;
  if (s == "right") return Edge::Right;
  throw InvalidArgument("unknown entry edge '" + s + "'");
}

LightSpec edge_light(Channel channel, Edge edge, double elevation_deg, double lambda_mm) {
  const double e = elevation_deg * std::numbers::pi / 180.0;
  double hx = 0.0;
  double hy = 0.0;
  switch (edge) {
    case Edge::Left: hx = 1.0; break;
    case Edge::Right: hx = -1.0; break;
    case Edge::Top: hy = 1.0; break;
    case Edge::Bottom: hy = -1.0; break;
  }
  LightSpec l;
  l.channel = channel;
  l.entry_edge = edge;
  l.direction = Eigen::Vector3d(std::cos(e) * hx, std::cos(e) * hy, -std::sin(e));
  l.attenuation_lambda = lambda_mm;
  return l;
}

SensorConfig SensorConfig::wedge_rgb() { return wedge_with({Channel::R, Channel::G, Channel::B}); }

SensorConfig SensorConfig::wedge_with(const std::vector<Channel>& channels) {
  SensorConfig c;
  for (Channel ch : channels) {
    switch (ch) {
      case Channel::R: c.lights.push_back(edge_light(Channel::R, Edge::Top)); break;
      case Channel::G: c.lights.push_back(edge_light(Channel::G, Edge::Left)); break;
      case Channel::B: c.lights.push_back(edge_light(Channel::B, Edge::Bottom)); break;
    }
  }
  return c;
}

const LightSpec* SensorConfig::light_for(Channel c) const {
  for (const auto& l : lights)
    if (l.channel == c) return &l;
  return nullptr;
}

void SensorConfig::validate() const {
  if (height < 2 || width < 2) throw InvalidArgument("sensor config: raster must be at least 2x2");
  if (!(ppmm > 0.0)) throw InvalidArgument("sensor config: ppmm must be positive");
  if (lights.empty() || lights.size() > 3) throw InvalidArgument("sensor config: need 1 to 3 lights");
  if (!(ambient >= 0.0 && ambient <= 0.2)) throw InvalidArgument("sensor config: ambient must be in [0, 0.2]");
  if (!(albedo > 0.0 && albedo <= 1.0)) throw InvalidArgument("sensor config: albedo must be in (0, 1]");
  std::array<bool, 3> used{};
  for (const auto& l : lights) {
    const auto idx = static_cast<std::size_t>(l.channel);
    if (used[idx]) throw InvalidArgument("sensor config: two lights bound to channel " + to_string(l.channel));
    used[idx] = true;
    if (std::abs(l.direction.norm() - 1.0) > 1e-6) throw InvalidArgument("sensor config: light direction must be unit length");
    if (!(l.direction.z() < 0.0)) throw InvalidArgument("sensor config: light direction must point into the surface (z < 0)");
    if (!(l.attenuation_lambda > 0.0)) throw InvalidArgument("sensor config: attenuation_lambda must be positive");
  }
}

void to_json(nlohmann::json& j, const LightSpec& l) {
  j = nlohmann::json{{"channel", to_string(l.channel)},
                     {"direction", {l.direction.x(), l.direction.y(), l.direction.z()}},
                     {"entry_edge", to_string(l.entry_edge)},
                     {"attenuation_lambda", l.attenuation_lambda}};
}

void from_json(const nlohmann::json& j, LightSpec& l) {
  l.channel = channel_from_string(j.at("channel").get<std::string>());
  const auto d = j.at("direction").get<std::vector<double>>();
  if (d.size() != 3) throw InvalidArgument("light direction must have 3 components");
  l.direction = Eigen::Vector3d(d[0], d[1], d[2]);
  l.entry_edge = edge_from_string(j.at("entry_edge").get<std::string>());
  l.attenuation_lambda = j.value("attenuation_lambda", 40.0);
}

void to_json(nlohmann::json& j, const SensorConfig& c) {
  j = nlohmann::json{{"height", c.height}, {"width", c.width},     {"ppmm", c.ppmm},
                     {"lights", c.lights}, {"ambient", c.ambient}, {"albedo", c.albedo}};
}

void from_json(const nlohmann::json& j, SensorConfig& c) {
  SensorConfig defaults = SensorConfig::wedge_rgb();
  c.height = j.value("height", defaults.height);
  c.width = j.value("width", defaults.width);
  c.ppmm = j.value("ppmm", defaults.ppmm);
  c.lights = j.contains("lights") ? j.at("lights").get<std::vector<LightSpec>>() : defaults.lights;
  c.ambient = j.value("ambient", defaults.ambient);
  c.albedo = j.value("albedo", defaults.albedo);
}

}  // namespace wedge::sim
