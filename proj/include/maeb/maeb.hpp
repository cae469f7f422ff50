#pragma once

#include "maeb/ics.hpp"
#include "maeb/kinematics.hpp"
#include "maeb/scenario.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace maeb {

enum class RiderOverride {
  // Strongest braking wins: MAEB adds deceleration up to its target but never
  // weakens what the rider already applies.
  never_reduce,
  // From the trigger on the rider's recorded input is ignored and only the
  // automatic command acts (passive-rider counterfactual).
  ignore_rider,
};

std::string to_string(RiderOverride r);
RiderOverride rider_override_from_string(const std::string& s);

struct MaebConfig {
  double auto_decel_target = 0.3 * kGravity;  // 2.943 m/s^2
  double ramp_time = 0.1;
  RiderOverride rider_override = RiderOverride::never_reduce;
};

void validate(const MaebConfig& cfg);

// Automatic deceleration command (<= 0) at time t for a trigger at trigger_t:
// linear ramp from 0 to -target over ramp_time.
double auto_command(const MaebConfig& cfg, double trigger_t, double t);

// PTW state timeline from the trigger on, replaying the recorded path under
// the MAEB speed profile. Speed is the base speed minus the integrated
// braking deficit, so it can never exceed the base profile.
class MaebTimeline {
public:
  static constexpr double kStep = 1e-3;

  MaebTimeline(const ScenarioSpec& spec, double trigger_t, const MaebConfig& cfg, double horizon = 4.0);

  VehicleState at(double t) const;
  // Speed of the profile MAEB acts on (recorded, or constant for ignore_rider).
  double base_speed(double t) const;
  double trigger_time() const { return t0_; }
  double end_time() const { return t0_ + kStep * static_cast<double>(deficit_.size() - 1); }

private:
  double base_rate(double t) const;
  double deficit_at(double t, std::size_t* index = nullptr) const;

  const ScenarioSpec* spec_;
  double t0_;
  double v0_;
  MaebConfig cfg_;
  std::shared_ptr<PathTable> path_;
  std::vector<double> deficit_;   // integrated speed deficit vs base
  std::vector<double> lag_;       // integrated distance deficit vs base
};

// PTW timeline when MAEB triggers at trigger_t.
MaebTimeline apply_maeb(const ScenarioSpec& spec, double trigger_t, const MaebConfig& cfg);

struct ImpactReport {
  double impact_speed_baseline = 0.0;  // m/s
  double impact_speed_maeb = 0.0;      // m/s, 0 when the collision is avoided
  double delta_v = 0.0;                // km/h
  std::optional<double> trigger_t;
  std::optional<double> trigger_ttc;
  std::optional<double> trigger_distance;
  double baseline_collision_time = 0.0;
  std::optional<double> maeb_collision_time;
  bool triggered = false;
  bool collision_avoided = false;
  bool trigger_monotone = true;

  // Same trigger, rider input ignored: coasting PTW vs automatic braking only.
  struct PassiveRider {
    double impact_speed_coast = 0.0;
    double impact_speed_maeb = 0.0;
    double delta_v = 0.0;  // km/h
    bool collision_avoided = false;
  };
  std::optional<PassiveRider> passive_rider;
};

class NoBaselineCollision : public std::runtime_error {
public:
  NoBaselineCollision() : std::runtime_error("no baseline collision") {}
};

// MAEB outcome for a known trigger time (no ICS search).
ImpactReport impact_outcome_at(const ScenarioSpec& spec, std::optional<double> trigger_t, const MaebConfig& cfg,
                               double dt = kDefaultDt);

// Full pipeline: ICS trigger search, then baseline and MAEB impact speeds.
ImpactReport impact_outcome(const ScenarioSpec& spec, const ManeuverSetParams& p, const MaebConfig& cfg);

}  // namespace maeb
