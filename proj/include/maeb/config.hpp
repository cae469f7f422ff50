#pragma once

#include "maeb/heading.hpp"
#include "maeb/ics.hpp"
#include "maeb/maeb.hpp"
#include "maeb/sensors.hpp"
#include "maeb/stereo.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace maeb {

struct EvalConfig {
  double distance = 8.0;  // along-path PTW front to crash point, m
  PairId heading_pair = PairId::inner;
  std::vector<PairId> pairs = {PairId::outer, PairId::middle, PairId::inner};
  int blur_px = 0;
  double roi_margin = 1.0;
  double opponent_height = 1.5;
  double max_depth = 30.0;  // depth metrics consider ground truth up to this range
  std::uint64_t texture_seed = 86;
  int frames = 1;
  double frame_interval = 0.1;  // s between sampled approach frames
  HeadingParams heading;
};

struct HarnessConfig {
  ManeuverSetParams maneuvers;
  MaebConfig maeb;
  RigConfig rig;
  LidarConfig lidar;
  MatchingParams matching;
  EvalConfig eval;

  void validate() const;
};

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Missing keys keep their defaults; unknown keys and ill-typed values are
// errors naming the field.
HarnessConfig parse_config(std::string_view text);
HarnessConfig load_config(const std::string& path);

// Every parameter, in a fixed key order.
nlohmann::ordered_json config_to_json(const HarnessConfig& cfg);

// Replaces every stochastic seed (sensor noise, texture, consensus fit).
void apply_seed(HarnessConfig& cfg, std::uint64_t seed);

}  // namespace maeb
