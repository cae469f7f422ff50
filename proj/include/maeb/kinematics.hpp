#pragma once

#include "maeb/geometry.hpp"
#include "maeb/scenario.hpp"
#include "maeb/vehicle_state.hpp"

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace maeb {

inline constexpr double kDefaultDt = 0.005;
inline constexpr double kMaxHorizon = 10.0;
inline constexpr double kControlLimit = 10.0;
// Below this speed a lateral command produces no yaw rate.
inline constexpr double kMinSteerSpeed = 0.5;

struct OrientedBox {
  Vec2 center;
  double half_length = 0.5;
  double half_width = 0.5;
  double yaw = 0.0;
};

OrientedBox footprint(const VehicleState& s, double length, double width);

// Closed-box overlap by the separating-axis test on the four edge normals.
// Touching boxes count as overlapping.
bool obb_intersect(const OrientedBox& a, const OrientedBox& b);

// Longitudinal and lateral acceleration commands as functions of absolute
// scenario time. Commands are clamped to +/- kControlLimit.
struct ControlProfile {
  std::function<double(double)> longitudinal;
  std::function<double(double)> lateral;

  static ControlProfile constant(double a_long, double a_lat = 0.0);
  double longitudinal_at(double t) const;
  double lateral_at(double t) const;
};

// Semi-implicit step: speed' = max(0, v + a dt); yaw' = yaw + (a_lat / v) dt;
// position advances by the travelled distance along the mean yaw.
VehicleState propagate(const VehicleState& s, const ControlProfile& c, double t, double dt);

// Free rollout under a control profile, sampled every dt from t0. Queries in
// between samples sub-step from the preceding sample.
class Rollout {
public:
  Rollout(const VehicleState& start, double t0, ControlProfile control, double dt);
  VehicleState at(double t);

private:
  std::vector<VehicleState> samples_;
  double t0_;
  double dt_;
  ControlProfile control_;
};

struct FollowTrajectory {};
using PtwMotion = std::variant<FollowTrajectory, ControlProfile>;

using StateQuery = std::function<VehicleState(double)>;

// Earliest t >= from_t at which the PTW and opponent footprints overlap,
// sampled at dt and refined by bisection to well under dt / 10. The opponent
// always follows its recorded trajectory. Throws std::invalid_argument when
// dt is outside [1e-4, 0.05] or horizon exceeds 10 s.
std::optional<double> first_collision_time(const ScenarioSpec& spec, double from_t,
                                           const PtwMotion& ptw, double dt = kDefaultDt,
                                           double horizon = kMaxHorizon);

std::optional<double> first_collision_time(const ScenarioSpec& spec, double from_t,
                                           const StateQuery& ptw, double dt = kDefaultDt,
                                           double horizon = kMaxHorizon);

// Earliest time any trajectory data is available for both vehicles.
double scenario_start_time(const ScenarioSpec& spec);

// Collision when both vehicles follow their recorded trajectories, searched
// from the scenario start.
std::optional<double> baseline_collision_time(const ScenarioSpec& spec, double dt = kDefaultDt);

// Along-path distance from the PTW front at time t to the crash point:
// path length up to collision_t plus the residual gap from the front point at
// collision_t to crash_point.
double distance_to_crash(const ScenarioSpec& spec, double t, double collision_t);

// Recorded PTW path indexed by arc length; used to replay the same path
// under a different speed profile.
class PathTable {
public:
  PathTable(const VehicleSpec& vehicle, double t0, double t1, double step = 1e-3);

  double arc_length_at_time(double t) const;
  VehicleState pose_at_arc_length(double s) const;
  double t0() const { return t0_; }

private:
  std::vector<double> times_;
  std::vector<double> arc_;
  std::vector<VehicleState> states_;
  double t0_;
  double step_;
};

}  // namespace maeb
