#include "maeb/ics.hpp"

#include <cmath>
#include <stdexcept>

namespace maeb {

void validate(const ManeuverSetParams& p)
{
  if (!(p.max_brake > 0.0) || p.max_brake > kControlLimit) {
    throw std::invalid_argument("maneuvers.max_brake must lie in (0, 10] m/s^2");
  }
  if (!(p.max_lateral >= 0.0) || p.max_lateral > kControlLimit) {
    throw std::invalid_argument("maneuvers.max_lateral must lie in [0, 10] m/s^2");
  }
  if (p.n_lateral_levels < 1 || p.n_lateral_levels % 2 == 0) {
    throw std::invalid_argument("maneuvers.n_lateral_levels must be odd and >= 1");
  }
  if (!(p.actuation_delay >= 0.0)) {
    throw std::invalid_argument("maneuvers.actuation_delay must be >= 0");
  }
  if (!(p.horizon > 0.0) || p.horizon > kMaxHorizon) {
    throw std::invalid_argument("maneuvers.horizon must lie in (0, 10] s");
  }
  if (!(p.dt >= 1e-4 && p.dt <= 0.05)) {
    throw std::invalid_argument("maneuvers.dt must lie in [1e-4, 0.05] s");
  }
}

std::vector<Maneuver> maneuver_set(const ManeuverSetParams& p)
{
  validate(p);
  std::vector<double> lateral;
  const int half = p.n_lateral_levels / 2;
  for (int i = -half; i <= half; ++i) {
    lateral.push_back(half == 0 ? 0.0 : p.max_lateral * static_cast<double>(i) / half);
  }
  std::vector<Maneuver> out;
  // Straight braking first: it is the escape found most often.
  for (double along : {-p.max_brake, 0.0}) {
    out.push_back({along, 0.0});
    for (double lat : lateral) {
      if (lat != 0.0) {
        out.push_back({along, lat});
      }
    }
  }
  return out;
}

ControlProfile maneuver_control(const Maneuver& m, double t0, double recorded_accel, double delay)
{
  const double t_on = t0 + delay;
  ControlProfile c;
  c.longitudinal = [=](double t) { return t < t_on ? recorded_accel : m.longitudinal; };
  c.lateral = [=](double t) { return t < t_on ? 0.0 : m.lateral; };
  return c;
}

bool is_inevitable(const ScenarioSpec& spec, double t, const std::vector<Maneuver>& maneuvers,
                   const ManeuverSetParams& p)
{
  const VehicleState start = state_at(spec.ptw, t);
  // Logical AND over independent rollouts; stops at the first escape.
  for (const Maneuver& m : maneuvers) {
    const ControlProfile c = maneuver_control(m, t, start.accel, p.actuation_delay);
    if (!first_collision_time(spec, t, PtwMotion{c}, p.dt, p.horizon)) {
      return false;
    }
  }
  return !maneuvers.empty();
}

bool is_inevitable(const ScenarioSpec& spec, double t, const ManeuverSetParams& p)
{
  return is_inevitable(spec, t, maneuver_set(p), p);
}

std::optional<TriggerResult> find_trigger_time(const ScenarioSpec& spec, const std::vector<Maneuver>& maneuvers,
                                               const ManeuverSetParams& p)
{
  validate(p);
  const auto collision = baseline_collision_time(spec, p.dt);
  if (!collision) {
    return std::nullopt;
  }
  const double tc = *collision;
  const double window_start = std::max(scenario_start_time(spec), tc - p.horizon);

  // Grid t_k = tc - k * step, k = 1..K, scanned completely so that a
  // non-monotone inevitability profile is detected rather than assumed away.
  std::vector<double> grid;
  for (int k = 1;; ++k) {
    const double t = tc - k * kTriggerScanStep;
    if (t < window_start - 1e-12) {
      break;
    }
    grid.push_back(t);
  }
  if (grid.empty()) {
    return std::nullopt;
  }
  std::vector<char> inevitable(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    inevitable[i] = is_inevitable(spec, grid[i], maneuvers, p) ? 1 : 0;
  }
  if (!inevitable[0]) {
    return std::nullopt;
  }
  // Length of the all-inevitable run adjacent to impact.
  std::size_t run = 0;
  while (run < grid.size() && inevitable[run]) {
    ++run;
  }
  bool monotone = true;
  for (std::size_t i = run; i < grid.size(); ++i) {
    if (inevitable[i]) {
      monotone = false;
      break;
    }
  }

  double hi = grid[run - 1];
  if (run < grid.size()) {
    double lo = grid[run];
    while (hi - lo > kTriggerResolution) {
      const double mid = 0.5 * (lo + hi);
      if (is_inevitable(spec, mid, maneuvers, p)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }

  TriggerResult r;
  r.t = hi;
  r.collision_time = tc;
  r.ttc = tc - hi;
  r.distance_to_crash = distance_to_crash(spec, hi, tc);
  r.monotone = monotone;
  return r;
}

std::optional<TriggerResult> find_trigger_time(const ScenarioSpec& spec, const ManeuverSetParams& p)
{
  return find_trigger_time(spec, maneuver_set(p), p);
}

}  // namespace maeb
