#pragma once

#include "maeb/geometry.hpp"
#include "maeb/vehicle_state.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace maeb {

struct Waypoint {
  double t = 0.0;      // s, impact at t = 0 by convention
  double x = 0.0;      // m
  double y = 0.0;      // m
  double yaw = 0.0;    // rad, (-pi, pi]
  double speed = 0.0;  // m/s
  double accel = 0.0;  // m/s^2, longitudinal, governs speed until the next waypoint

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct VehicleSpec {
  std::string name;
  double length = 0.0;
  double width = 0.0;
  std::vector<Waypoint> trajectory;

  friend bool operator==(const VehicleSpec&, const VehicleSpec&) = default;
};

struct ScenarioSpec {
  std::string id;
  VehicleSpec ptw;
  VehicleSpec opponent;
  Vec2 crash_point;
  double impact_time = 0.0;
  std::string notes;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

// One schema violation or warning, tied to the offending field path
// (e.g. "ptw.trajectory[1].t").
struct Issue {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;

  bool ok() const { return errors.empty(); }
};

class ScenarioError : public std::runtime_error {
public:
  explicit ScenarioError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const { return issues_; }

private:
  std::vector<Issue> issues_;
};

// Parses and validates scenario JSON. Throws ScenarioError listing every
// violation found (syntax errors report the byte offset). Never crashes on
// malformed input.
ScenarioSpec parse_scenario(std::string_view text);
ScenarioSpec load_scenario(const std::string& path);

// Semantic checks on an in-memory spec. Warnings flag waypoints whose
// position disagrees with the constant-acceleration prediction by > 0.25 m.
ValidationReport validate_scenario(const ScenarioSpec& spec);

std::string serialize_scenario(const ScenarioSpec& spec);

// Piecewise interpolation of a recorded trajectory.
//  - inside a segment: speed from the stored accel, position along the
//    constant-acceleration arc at mean yaw, yaw by shortest-angle lerp; any
//    disagreement with the next waypoint is blended out linearly so the state
//    is continuous and exact at every waypoint time.
//  - before the first waypoint: first state held.
//  - after the last waypoint: constant speed along the last yaw.
VehicleState state_at(const VehicleSpec& vehicle, double t);

// d(speed)/dt of the interpolated trajectory at t (right derivative).
double speed_rate_at(const VehicleSpec& vehicle, double t);

// Front-center point of the vehicle footprint.
Vec2 front_point(const VehicleState& s, double length);

// Arc length travelled between t0 and t1 (t0 <= t1), by 1 ms chords.
double path_length(const VehicleSpec& vehicle, double t0, double t1);

}  // namespace maeb
