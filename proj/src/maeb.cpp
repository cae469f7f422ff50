#include "maeb/maeb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maeb {

std::string to_string(RiderOverride r)
{
  switch (r) {
    case RiderOverride::never_reduce:
      return "never_reduce";
    case RiderOverride::ignore_rider:
      return "ignore_rider";
  }
  return "never_reduce";
}

RiderOverride rider_override_from_string(const std::string& s)
{
  if (s == "never_reduce") {
    return RiderOverride::never_reduce;
  }
  if (s == "ignore_rider") {
    return RiderOverride::ignore_rider;
  }
  throw std::invalid_argument("maeb.rider_override must be 'never_reduce' or 'ignore_rider'");
}

void validate(const MaebConfig& cfg)
{
  if (!(cfg.auto_decel_target > 0.0) || cfg.auto_decel_target > kControlLimit) {
    throw std::invalid_argument("maeb.auto_decel_target must lie in (0, 10] m/s^2");
  }
  if (!(cfg.ramp_time >= 0.0)) {
    throw std::invalid_argument("maeb.ramp_time must be >= 0");
  }
}

double auto_command(const MaebConfig& cfg, double trigger_t, double t)
{
  if (t < trigger_t) {
    return 0.0;
  }
  const double frac = cfg.ramp_time > 0.0 ? std::min(1.0, (t - trigger_t) / cfg.ramp_time) : 1.0;
  return -cfg.auto_decel_target * frac;
}

MaebTimeline::MaebTimeline(const ScenarioSpec& spec, double trigger_t, const MaebConfig& cfg, double horizon)
  : spec_(&spec), t0_(trigger_t), v0_(state_at(spec.ptw, trigger_t).speed), cfg_(cfg)
{
  const auto n = static_cast<std::size_t>(std::ceil(horizon / kStep)) + 1;
  path_ = std::make_shared<PathTable>(spec.ptw, trigger_t, trigger_t + horizon + 0.5);

  deficit_.assign(n, 0.0);
  lag_.assign(n, 0.0);
  auto integrand = [&](double t) { return std::max(0.0, base_rate(t) - auto_command(cfg_, t0_, t)); };
  auto speed_gap = [&](double t, double deficit) {
    const double base = base_speed(t);
    return base - std::max(0.0, base - deficit);
  };
  double f_prev = integrand(t0_);
  double g_prev = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double t = t0_ + kStep * static_cast<double>(i);
    const double f = integrand(t);
    deficit_[i] = deficit_[i - 1] + 0.5 * (f_prev + f) * kStep;
    const double g = speed_gap(t, deficit_[i]);
    lag_[i] = lag_[i - 1] + 0.5 * (g_prev + g) * kStep;
    f_prev = f;
    g_prev = g;
  }
}

double MaebTimeline::base_speed(double t) const
{
  if (cfg_.rider_override == RiderOverride::ignore_rider) {
    return v0_;
  }
  return state_at(spec_->ptw, t).speed;
}

double MaebTimeline::base_rate(double t) const
{
  if (cfg_.rider_override == RiderOverride::ignore_rider) {
    return 0.0;
  }
  return speed_rate_at(spec_->ptw, t);
}

double MaebTimeline::deficit_at(double t, std::size_t* index) const
{
  const double f = std::max(0.0, (t - t0_) / kStep);
  auto i = static_cast<std::size_t>(std::floor(f));
  if (i + 1 >= deficit_.size()) {
    if (index != nullptr) {
      *index = deficit_.size() - 1;
    }
    return deficit_.back();
  }
  if (index != nullptr) {
    *index = i;
  }
  const double w = f - static_cast<double>(i);
  return deficit_[i] + w * (deficit_[i + 1] - deficit_[i]);
}

VehicleState MaebTimeline::at(double t) const
{
  if (t <= t0_) {
    return state_at(spec_->ptw, t);
  }
  std::size_t i = 0;
  const double deficit = deficit_at(t, &i);
  double lag = 0.0;
  if (i + 1 < lag_.size()) {
    const double w = (t - t0_) / kStep - static_cast<double>(i);
    lag = lag_[i] + w * (lag_[i + 1] - lag_[i]);
  } else {
    lag = lag_.back();
  }

  const bool replay_recorded = cfg_.rider_override != RiderOverride::ignore_rider;
  if (replay_recorded && deficit == 0.0 && lag == 0.0) {
    return state_at(spec_->ptw, t);
  }
  const double base_arc = replay_recorded ? path_->arc_length_at_time(t) : v0_ * (t - t0_);
  VehicleState st = path_->pose_at_arc_length(base_arc - lag);
  const double base = base_speed(t);
  st.speed = std::max(0.0, base - deficit);
  st.accel = st.speed > 0.0 ? std::min(base_rate(t), auto_command(cfg_, t0_, t)) : 0.0;
  return st;
}

MaebTimeline apply_maeb(const ScenarioSpec& spec, double trigger_t, const MaebConfig& cfg)
{
  validate(cfg);
  return MaebTimeline(spec, trigger_t, cfg);
}

namespace {

struct TimelineImpact {
  std::optional<double> time;
  double speed = 0.0;
};

TimelineImpact timeline_impact(const ScenarioSpec& spec, const MaebTimeline& tl, double dt)
{
  const StateQuery q = [&tl](double t) { return tl.at(t); };
  const double horizon = std::min(kMaxHorizon, tl.end_time() - tl.trigger_time());
  TimelineImpact out;
  out.time = first_collision_time(spec, tl.trigger_time(), q, dt, horizon);
  if (out.time) {
    out.speed = tl.at(*out.time).speed;
  }
  return out;
}

}  // namespace

ImpactReport impact_outcome_at(const ScenarioSpec& spec, std::optional<double> trigger_t, const MaebConfig& cfg,
                               double dt)
{
  validate(cfg);
  const auto tb = baseline_collision_time(spec, dt);
  if (!tb) {
    throw NoBaselineCollision();
  }
  ImpactReport rep;
  rep.baseline_collision_time = *tb;
  rep.impact_speed_baseline = state_at(spec.ptw, *tb).speed;
  rep.impact_speed_maeb = rep.impact_speed_baseline;
  rep.maeb_collision_time = *tb;
  if (!trigger_t || *trigger_t >= *tb) {
    return rep;
  }
  rep.triggered = true;
  rep.trigger_t = *trigger_t;
  rep.trigger_ttc = *tb - *trigger_t;

  const MaebTimeline tl(spec, *trigger_t, cfg);
  const TimelineImpact hit = timeline_impact(spec, tl, dt);
  rep.maeb_collision_time = hit.time;
  rep.collision_avoided = !hit.time.has_value();
  rep.impact_speed_maeb = hit.speed;
  rep.delta_v = mps_to_kmh(rep.impact_speed_baseline - rep.impact_speed_maeb);

  MaebConfig passive = cfg;
  passive.rider_override = RiderOverride::ignore_rider;
  MaebConfig coast = passive;
  coast.auto_decel_target = 0.0;
  const TimelineImpact coast_hit = timeline_impact(spec, MaebTimeline(spec, *trigger_t, coast), dt);
  const TimelineImpact passive_hit = timeline_impact(spec, MaebTimeline(spec, *trigger_t, passive), dt);
  if (coast_hit.time) {
    ImpactReport::PassiveRider pr;
    pr.impact_speed_coast = coast_hit.speed;
    pr.impact_speed_maeb = passive_hit.speed;
    pr.collision_avoided = !passive_hit.time.has_value();
    pr.delta_v = mps_to_kmh(pr.impact_speed_coast - pr.impact_speed_maeb);
    rep.passive_rider = pr;
  }
  return rep;
}

ImpactReport impact_outcome(const ScenarioSpec& spec, const ManeuverSetParams& p, const MaebConfig& cfg)
{
  if (!baseline_collision_time(spec, p.dt)) {
    throw NoBaselineCollision();
  }
  const auto trig = find_trigger_time(spec, p);
  ImpactReport rep = impact_outcome_at(spec, trig ? std::optional<double>(trig->t) : std::nullopt, cfg, p.dt);
  if (trig) {
    rep.trigger_distance = trig->distance_to_crash;
    rep.trigger_ttc = trig->ttc;
    rep.trigger_monotone = trig->monotone;
  }
  return rep;
}

}  // namespace maeb
