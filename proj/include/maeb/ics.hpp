#pragma once

#include "maeb/kinematics.hpp"
#include "maeb/scenario.hpp"

#include <optional>
#include <vector>

namespace maeb {

// Sampled evasive-maneuver set used as the inevitable-collision criterion:
// {full brake, coast} x n_lateral_levels symmetric lateral accelerations.
struct ManeuverSetParams {
  double max_brake = 8.0;
  double max_lateral = 4.0;
  int n_lateral_levels = 5;
  double actuation_delay = 0.0;
  double horizon = 3.0;
  double dt = kDefaultDt;
};

// Throws std::invalid_argument on a malformed parameter set.
void validate(const ManeuverSetParams& p);

struct Maneuver {
  double longitudinal = 0.0;
  double lateral = 0.0;
};

std::vector<Maneuver> maneuver_set(const ManeuverSetParams& p);

// Control profile for one maneuver started at t0; during the actuation delay
// the PTW keeps its recorded acceleration and heading.
ControlProfile maneuver_control(const Maneuver& m, double t0, double recorded_accel, double delay);

// True iff every maneuver of the set, applied to the PTW from its recorded
// state at t, collides with the (non-reactive) opponent within the horizon.
bool is_inevitable(const ScenarioSpec& spec, double t, const ManeuverSetParams& p);

// Same criterion over an explicit maneuver list.
bool is_inevitable(const ScenarioSpec& spec, double t, const std::vector<Maneuver>& maneuvers,
                   const ManeuverSetParams& p);

struct TriggerResult {
  double t = 0.0;
  double distance_to_crash = 0.0;
  double ttc = 0.0;
  double collision_time = 0.0;
  // False when an inevitable state was followed by an evitable one on the
  // scan grid; the trigger then comes from the final all-inevitable run.
  bool monotone = true;
};

inline constexpr double kTriggerScanStep = 0.010;
inline constexpr double kTriggerResolution = 0.001;

// Earliest time from which the collision is inevitable up to impact, on a
// 10 ms scan refined by bisection to 1 ms. nullopt when the collision stays
// avoidable up to impact or the recorded scenario never collides.
std::optional<TriggerResult> find_trigger_time(const ScenarioSpec& spec, const ManeuverSetParams& p);
std::optional<TriggerResult> find_trigger_time(const ScenarioSpec& spec, const std::vector<Maneuver>& maneuvers,
                                               const ManeuverSetParams& p);

}  // namespace maeb
