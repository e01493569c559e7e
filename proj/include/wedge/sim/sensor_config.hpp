#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace wedge::sim {

enum class Channel { R = 0, G = 1, B = 2 };
enum class Edge { Top, Bottom, Left, Right };

std::string to_string(Channel c);
std::string to_string(Edge e);
Channel channel_from_string(const std::string& s);
Edge edge_from_string(const std::string& s);

struct LightSpec {
  Channel channel = Channel::R;
  /// Direction the light travels when it reaches the gel; unit length, z < 0.
  Eigen::Vector3d direction{0.0, 0.0, -1.0};
  Edge entry_edge = Edge::Top;
  /// Exponential decay length across the sensor, mm.
  double attenuation_lambda = 40.0;
};

/// A light entering from `edge`, travelling across the sensor at
/// `elevation_deg` above the surface plane.
LightSpec edge_light(Channel channel, Edge edge, double elevation_deg = 30.0, double lambda_mm = 40.0);

struct SensorConfig {
  int height = 150;
  int width = 200;
  double ppmm = 10.0;
  std::vector<LightSpec> lights;
  double ambient = 0.05;
  double albedo = 0.9;

  /// Three lights: green from the left edge (encodes Gx), red from the top
  /// and blue from the bottom (both encode Gy, opposing).
  static SensorConfig wedge_rgb();

  /// Same geometry restricted to the given channels.
  static SensorConfig wedge_with(const std::vector<Channel>& channels);

  const LightSpec* light_for(Channel c) const;

  /// Throws InvalidArgument when any invariant is violated.
  void validate() const;
};

void to_json(nlohmann::json& j, const LightSpec& l);
void from_json(const nlohmann::json& j, LightSpec& l);
void to_json(nlohmann::json& j, const SensorConfig& c);
void from_json(const nlohmann::json& j, SensorConfig& c);

}  // namespace wedge::sim
