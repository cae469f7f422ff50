#include "maeb/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace maeb {

namespace {

double clamp_control(double a)
{
  return std::clamp(a, -kControlLimit, kControlLimit);
}

bool footprints_overlap(const ScenarioSpec& spec, const VehicleState& ptw, double t)
{
  const OrientedBox a = footprint(ptw, spec.ptw.length, spec.ptw.width);
  const OrientedBox b = footprint(state_at(spec.opponent, t), spec.opponent.length, spec.opponent.width);
  return obb_intersect(a, b);
}

}  // namespace

OrientedBox footprint(const VehicleState& s, double length, double width)
{
  return {s.position(), 0.5 * length, 0.5 * width, s.yaw};
}

bool obb_intersect(const OrientedBox& a, const OrientedBox& b)
{
  const Vec2 ax[2] = {heading_vector(a.yaw), heading_vector(a.yaw + 0.5 * kPi)};
  const Vec2 bx[2] = {heading_vector(b.yaw), heading_vector(b.yaw + 0.5 * kPi)};
  const double ae[2] = {a.half_length, a.half_width};
  const double be[2] = {b.half_length, b.half_width};
  const Vec2 d = b.center - a.center;

  auto separated_on = [&](Vec2 n) {
    const double ra = ae[0] * std::fabs(ax[0].dot(n)) + ae[1] * std::fabs(ax[1].dot(n));
    const double rb = be[0] * std::fabs(bx[0].dot(n)) + be[1] * std::fabs(bx[1].dot(n));
    return std::fabs(d.dot(n)) > ra + rb;
  };
  for (const Vec2& n : ax) {
    if (separated_on(n)) {
      return false;
    }
  }
  for (const Vec2& n : bx) {
    if (separated_on(n)) {
      return false;
    }
  }
  return true;
}

ControlProfile ControlProfile::constant(double a_long, double a_lat)
{
  return {[a_long](double) { return a_long; }, [a_lat](double) { return a_lat; }};
}

double ControlProfile::longitudinal_at(double t) const
{
  return longitudinal ? clamp_control(longitudinal(t)) : 0.0;
}

double ControlProfile::lateral_at(double t) const
{
  return lateral ? clamp_control(lateral(t)) : 0.0;
}

VehicleState propagate(const VehicleState& s, const ControlProfile& c, double t, double dt)
{
  const double a_long = c.longitudinal_at(t);
  const double a_lat = c.lateral_at(t);
  const double yaw_rate = s.speed < kMinSteerSpeed ? 0.0 : a_lat / s.speed;
  const SpeedAdvance adv = advance_speed(s.speed, a_long, dt);
  const double mean_yaw = s.yaw + 0.5 * yaw_rate * dt;

  VehicleState out;
  const Vec2 p = s.position() + adv.distance * heading_vector(mean_yaw);
  out.x = p.x;
  out.y = p.y;
  out.yaw = wrap_angle(s.yaw + yaw_rate * dt);
  out.speed = adv.speed;
  out.accel = (adv.speed == 0.0 && a_long < 0.0) ? 0.0 : a_long;
  return out;
}

Rollout::Rollout(const VehicleState& start, double t0, ControlProfile control, double dt)
  : samples_{start}, t0_(t0), dt_(dt), control_(std::move(control))
{
}

VehicleState Rollout::at(double t)
{
  if (t <= t0_) {
    return samples_.front();
  }
  const auto k = static_cast<std::size_t>(std::floor((t - t0_) / dt_ + 1e-9));
  while (samples_.size() <= k) {
    const std::size_t i = samples_.size() - 1;
    samples_.push_back(propagate(samples_[i], control_, t0_ + static_cast<double>(i) * dt_, dt_));
  }
  const double tk = t0_ + static_cast<double>(k) * dt_;
  const double tau = t - tk;
  if (tau <= 1e-12) {
    return samples_[k];
  }
  return propagate(samples_[k], control_, tk, tau);
}

std::optional<double> first_collision_time(const ScenarioSpec& spec, double from_t,
                                           const StateQuery& ptw, double dt, double horizon)
{
  if (!(dt >= 1e-4 && dt <= 0.05)) {
    throw std::invalid_argument("first_collision_time: dt must lie in [1e-4, 0.05]");
  }
  if (!(horizon >= 0.0 && horizon <= kMaxHorizon)) {
    throw std::invalid_argument("first_collision_time: horizon must lie in [0, 10] s");
  }
  auto hit = [&](double t) { return footprints_overlap(spec, ptw(t), t); };

  if (hit(from_t)) {
    return from_t;
  }
  const auto n = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  double prev = from_t;
  for (long k = 1; k <= n; ++k) {
    const double t = std::min(from_t + static_cast<double>(k) * dt, from_t + horizon);
    if (hit(t)) {
      double lo = prev;
      double hi = t;
      const double tol = dt * 1e-3;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (hit(mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return hi;
    }
    prev = t;
  }
  return std::nullopt;
}

std::optional<double> first_collision_time(const ScenarioSpec& spec, double from_t,
                                           const PtwMotion& ptw, double dt, double horizon)
{
  if (std::holds_alternative<FollowTrajectory>(ptw)) {
    const StateQuery q = [&spec](double t) { return state_at(spec.ptw, t); };
    return first_collision_time(spec, from_t, q, dt, horizon);
  }
  auto rollout = std::make_shared<Rollout>(state_at(spec.ptw, from_t), from_t,
                                           std::get<ControlProfile>(ptw), dt);
  const StateQuery q = [rollout](double t) { return rollout->at(t); };
  return first_collision_time(spec, from_t, q, dt, horizon);
}

double scenario_start_time(const ScenarioSpec& spec)
{
  return std::max(spec.ptw.trajectory.front().t, spec.opponent.trajectory.front().t);
}

std::optional<double> baseline_collision_time(const ScenarioSpec& spec, double dt)
{
  const double from = std::max(scenario_start_time(spec), spec.impact_time - (kMaxHorizon - 1.0));
  return first_collision_time(spec, from, PtwMotion{FollowTrajectory{}}, dt, kMaxHorizon);
}

double distance_to_crash(const ScenarioSpec& spec, double t, double collision_t)
{
  const Vec2 front = front_point(state_at(spec.ptw, collision_t), spec.ptw.length);
  const double residual = (spec.crash_point - front).norm();
  if (t <= collision_t) {
    return path_length(spec.ptw, t, collision_t) + residual;
  }
  return residual - path_length(spec.ptw, collision_t, t);
}

PathTable::PathTable(const VehicleSpec& vehicle, double t0, double t1, double step)
  : t0_(t0), step_(step)
{
  const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / step)) + 1;
  times_.reserve(n);
  arc_.reserve(n);
  states_.reserve(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * step;
    const VehicleState st = state_at(vehicle, t);
    if (i > 0) {
      s += (st.position() - states_.back().position()).norm();
    }
    times_.push_back(t);
    arc_.push_back(s);
    states_.push_back(st);
  }
}

double PathTable::arc_length_at_time(double t) const
{
  if (t <= times_.front()) {
    return arc_.front();
  }
  const double f = (t - t0_) / step_;
  const auto i = static_cast<std::size_t>(std::floor(f));
  if (i + 1 >= times_.size()) {
    return arc_.back() + states_.back().speed * (t - times_.back());
  }
  const double w = f - static_cast<double>(i);
  return arc_[i] + w * (arc_[i + 1] - arc_[i]);
}

VehicleState PathTable::pose_at_arc_length(double s) const
{
  if (s <= arc_.front()) {
    return states_.front();
  }
  if (s >= arc_.back()) {
    VehicleState st = states_.back();
    const Vec2 p = st.position() + (s - arc_.back()) * heading_vector(st.yaw);
    st.x = p.x;
    st.y = p.y;
    return st;
  }
  const auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
  const auto i = static_cast<std::size_t>(it - arc_.begin()) - 1;
  const double seg = arc_[i + 1] - arc_[i];
  const double w = seg > 0.0 ? (s - arc_[i]) / seg : 0.0;
  const VehicleState& a = states_[i];
  const VehicleState& b = states_[i + 1];
  VehicleState st = a;
  st.x = a.x + w * (b.x - a.x);
  st.y = a.y + w * (b.y - a.y);
  st.yaw = wrap_angle(a.yaw + w * wrap_angle(b.yaw - a.yaw));
  return st;
}

}  // namespace maeb
