#include "maeb/scenario_builder.hpp"

#include "maeb/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace maeb {

VehicleSpec straight_run(const std::string& name, double length, double width, Vec2 start, double yaw,
                         double speed, double t0, const std::vector<Phase>& phases)
{
  VehicleSpec v;
  v.name = name;
  v.length = length;
  v.width = width;
  const Vec2 dir = heading_vector(yaw);
  double t = t0;
  double s = 0.0;
  double speed_now = speed;
  Waypoint w{t0, start.x, start.y, wrap_angle(yaw), speed, phases.empty() ? 0.0 : phases.front().accel};
  v.trajectory.push_back(w);
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const Phase& p = phases[i];
    if (!(p.until > t)) {
      throw std::invalid_argument("straight_run: phase ends must be strictly increasing");
    }
    const SpeedAdvance adv = advance_speed(speed_now, p.accel, p.until - t);
    s += adv.distance;
    speed_now = adv.speed;
    t = p.until;
    const Vec2 pos = start + s * dir;
    const double next_accel = i + 1 < phases.size() ? phases[i + 1].accel : 0.0;
    v.trajectory.push_back({t, pos.x, pos.y, wrap_angle(yaw), speed_now, speed_now > 0.0 ? next_accel : 0.0});
  }
  return v;
}

VehicleSpec parked(const std::string& name, double length, double width, Vec2 center, double yaw, double t0)
{
  VehicleSpec v;
  v.name = name;
  v.length = length;
  v.width = width;
  v.trajectory.push_back({t0, center.x, center.y, wrap_angle(yaw), 0.0, 0.0});
  return v;
}

VehicleSpec constant_speed_through(const std::string& name, double length, double width, Vec2 center_at_t,
                                   double t, double yaw, double speed, double t0, double t1)
{
  const Vec2 start = center_at_t - (speed * (t - t0)) * heading_vector(yaw);
  return straight_run(name, length, width, start, yaw, speed, t0, {{t1, 0.0}});
}

ScenarioSpec wall_scenario(double speed, double gap, double wall_width, double t0, double ptw_length,
                           double ptw_width)
{
  ScenarioSpec spec;
  spec.id = "wall";
  spec.ptw = straight_run("ptw", ptw_length, ptw_width, {-0.5 * ptw_length, 0.0}, 0.0, speed, t0,
                          {{t0 + 10.0, 0.0}});
  const double depth = 1.0;
  spec.opponent = parked("wall", depth, wall_width, {gap + 0.5 * depth, 0.0}, 0.0, t0);
  spec.crash_point = {gap, 0.0};
  spec.impact_time = speed > 0.0 ? t0 + gap / speed : t0 + 10.0;
  spec.notes = "synthetic wall";
  return spec;
}

}  // namespace maeb
