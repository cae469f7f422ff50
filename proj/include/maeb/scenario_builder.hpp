#pragma once

#include "maeb/scenario.hpp"

#include <string>
#include <vector>

namespace maeb {

// Constant-acceleration phase of a straight run, active until `until`.
struct Phase {
  double until = 0.0;
  double accel = 0.0;
};

// Straight run along `yaw` starting at t0 from `start` (footprint center).
// One waypoint at t0 and one at the end of every phase, positions and speeds
// from the exact stop-clamped constant-acceleration motion.
VehicleSpec straight_run(const std::string& name, double length, double width, Vec2 start, double yaw,
                         double speed, double t0, const std::vector<Phase>& phases);

// Vehicle that never moves (a single waypoint at speed 0).
VehicleSpec parked(const std::string& name, double length, double width, Vec2 center, double yaw, double t0);

// Straight run placed so its footprint center is at `center_at_t` at time t,
// at constant speed.
VehicleSpec constant_speed_through(const std::string& name, double length, double width, Vec2 center_at_t,
                                   double t, double yaw, double speed, double t0, double t1);

// PTW heading +x at y = 0 toward a full-width stationary wall whose near face
// is `gap` m ahead of the PTW front at t = t0.
ScenarioSpec wall_scenario(double speed, double gap, double wall_width, double t0 = -3.0,
                           double ptw_length = 2.1, double ptw_width = 0.8);

}  // namespace maeb
