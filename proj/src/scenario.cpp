#include "maeb/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace maeb {

namespace {

using nlohmann::json;

constexpr double kPositionWarnThreshold = 0.25;

std::string join_issues(const std::vector<Issue>& issues)
{
  std::ostringstream os;
  os << "scenario invalid:";
  for (const auto& i : issues) {
    os << "\n  " << (i.field.empty() ? "<document>" : i.field) << ": " << i.message;
  }
  return os.str();
}

// Pulls typed fields out of a json tree, recording every problem instead of
// stopping at the first.
class FieldReader {
public:
  explicit FieldReader(std::vector<Issue>& issues) : issues_(issues) {}

  const json* child(const json& obj, const std::string& key, const std::string& path)
  {
    auto it = obj.find(key);
    if (it == obj.end()) {
      issues_.push_back({path, "missing required key '" + key + "'"});
      return nullptr;
    }
    return &*it;
  }

  double number(const json& obj, const std::string& key, const std::string& path)
  {
    const json* v = child(obj, key, path);
    if (v == nullptr) {
      return 0.0;
    }
    if (!v->is_number()) {
      issues_.push_back({path, "expected a number"});
      return 0.0;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      issues_.push_back({path, "must be finite"});
    }
    return d;
  }

  std::string string(const json& obj, const std::string& key, const std::string& path,
                     bool required = true)
  {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) {
        issues_.push_back({path, "missing required key '" + key + "'"});
      }
      return {};
    }
    if (!it->is_string()) {
      issues_.push_back({path, "expected a string"});
      return {};
    }
    return it->get<std::string>();
  }

  void warn_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix,
                    std::vector<Issue>& warnings)
  {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!known.count(it.key())) {
        warnings.push_back({prefix + it.key(), "unknown key ignored"});
      }
    }
  }

private:
  std::vector<Issue>& issues_;
};

Waypoint read_waypoint(FieldReader& r, const json& j, const std::string& path)
{
  Waypoint w;
  w.t = r.number(j, "t", path + ".t");
  w.x = r.number(j, "x", path + ".x");
  w.y = r.number(j, "y", path + ".y");
  w.yaw = wrap_angle(r.number(j, "yaw", path + ".yaw"));
  w.speed = r.number(j, "speed", path + ".speed");
  w.accel = r.number(j, "accel", path + ".accel");
  return w;
}

VehicleSpec read_vehicle(FieldReader& r, const json& j, const std::string& path,
                         std::vector<Issue>& errors)
{
  VehicleSpec v;
  if (!j.is_object()) {
    errors.push_back({path, "expected an object"});
    return v;
  }
  v.name = r.string(j, "name", path + ".name");
  v.length = r.number(j, "length", path + ".length");
  v.width = r.number(j, "width", path + ".width");
  const json* traj = r.child(j, "trajectory", path + ".trajectory");
  if (traj != nullptr) {
    if (!traj->is_array()) {
      errors.push_back({path + ".trajectory", "expected an array"});
    } else {
      for (std::size_t i = 0; i < traj->size(); ++i) {
        const std::string wp_path = path + ".trajectory[" + std::to_string(i) + "]";
        const json& wj = (*traj)[i];
        if (!wj.is_object()) {
          errors.push_back({wp_path, "expected an object"});
          continue;
        }
        v.trajectory.push_back(read_waypoint(r, wj, wp_path));
      }
    }
  }
  return v;
}

void validate_vehicle(const VehicleSpec& v, const std::string& path, double impact_time,
                      ValidationReport& rep)
{
  if (!(v.length > 0.0) || !std::isfinite(v.length)) {
    rep.errors.push_back({path + ".length", "must be > 0"});
  }
  if (!(v.width > 0.0) || !std::isfinite(v.width)) {
    rep.errors.push_back({path + ".width", "must be > 0"});
  }
  if (v.trajectory.empty()) {
    rep.errors.push_back({path + ".trajectory", "must contain at least one waypoint"});
    return;
  }
  for (std::size_t i = 0; i < v.trajectory.size(); ++i) {
    const auto& w = v.trajectory[i];
    const std::string wp = path + ".trajectory[" + std::to_string(i) + "]";
    for (double f : {w.t, w.x, w.y, w.yaw, w.speed, w.accel}) {
      if (!std::isfinite(f)) {
        rep.errors.push_back({wp, "all waypoint fields must be finite"});
        break;
      }
    }
    if (w.speed < 0.0) {
      rep.errors.push_back({wp + ".speed", "must be >= 0"});
    }
    if (i > 0 && !(w.t > v.trajectory[i - 1].t)) {
      rep.errors.push_back({wp + ".t", "waypoint times strictly increasing"});
    }
  }
  if (v.trajectory.front().t > impact_time) {
    rep.errors.push_back({path + ".trajectory[0].t", "trajectory must start at or before impact_time"});
  }
  if (!rep.errors.empty()) {
    return;
  }
  for (std::size_t i = 0; i + 1 < v.trajectory.size(); ++i) {
    const auto& a = v.trajectory[i];
    const auto& b = v.trajectory[i + 1];
    const double dt = b.t - a.t;
    const double s = advance_speed(a.speed, a.accel, dt).distance;
    const double mean_yaw = a.yaw + 0.5 * wrap_angle(b.yaw - a.yaw);
    const Vec2 pred = Vec2{a.x, a.y} + s * heading_vector(mean_yaw);
    const double miss = (pred - Vec2{b.x, b.y}).norm();
    if (miss > kPositionWarnThreshold) {
      std::ostringstream os;
      os << "position disagrees with constant-acceleration prediction by " << miss << " m";
      rep.warnings.push_back({path + ".trajectory[" + std::to_string(i + 1) + "]", os.str()});
    }
  }
}

json waypoint_json(const Waypoint& w)
{
  json j = json::object();
  j["t"] = w.t;
  j["x"] = w.x;
  j["y"] = w.y;
  j["yaw"] = w.yaw;
  j["speed"] = w.speed;
  j["accel"] = w.accel;
  return j;
}

json vehicle_json(const VehicleSpec& v)
{
  json j = json::object();
  j["name"] = v.name;
  j["length"] = v.length;
  j["width"] = v.width;
  json traj = json::array();
  for (const auto& w : v.trajectory) {
    traj.push_back(waypoint_json(w));
  }
  j["trajectory"] = std::move(traj);
  return j;
}

struct Segment {
  const Waypoint* a = nullptr;
  const Waypoint* b = nullptr;
};

// Pieces of a segment evaluation shared by state_at and speed_rate_at.
struct SegmentEval {
  VehicleState state;
  double rate = 0.0;
};

SegmentEval eval_segment(const Waypoint& a, const Waypoint& b, double tau)
{
  const double dt = b.t - a.t;
  const double w = tau / dt;
  const double dyaw = wrap_angle(b.yaw - a.yaw);

  const SpeedAdvance end = advance_speed(a.speed, a.accel, dt);
  const SpeedAdvance mid = advance_speed(a.speed, a.accel, tau);

  const double mean_yaw_end = a.yaw + 0.5 * dyaw;
  const Vec2 pred_end = Vec2{a.x, a.y} + end.distance * heading_vector(mean_yaw_end);
  const Vec2 residual = Vec2{b.x, b.y} - pred_end;

  const double mean_yaw = a.yaw + 0.5 * dyaw * w;
  const Vec2 p = Vec2{a.x, a.y} + mid.distance * heading_vector(mean_yaw) + w * residual;

  const double speed_residual = b.speed - end.speed;
  const double v = mid.speed + w * speed_residual;

  SegmentEval out;
  out.state.x = p.x;
  out.state.y = p.y;
  out.state.yaw = wrap_angle(a.yaw + dyaw * w);
  out.state.speed = std::max(0.0, v);
  out.state.accel = a.accel;
  if (v > 0.0) {
    const bool stopped = a.accel < 0.0 && mid.speed <= 0.0;
    out.rate = (stopped ? 0.0 : a.accel) + speed_residual / dt;
  }
  return out;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<Issue> issues)
  : std::runtime_error(join_issues(issues)), issues_(std::move(issues))
{
}

ScenarioSpec parse_scenario(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "syntax error at byte " << e.byte << ": " << e.what();
    throw ScenarioError(std::vector<Issue>{{"", os.str()}});
  }
  if (!doc.is_object()) {
    throw ScenarioError(std::vector<Issue>{{"", "top-level value must be an object"}});
  }

  std::vector<Issue> errors;
  std::vector<Issue> warnings;
  FieldReader r(errors);
  ScenarioSpec spec;
  spec.id = r.string(doc, "id", "id");
  spec.notes = r.string(doc, "notes", "notes", false);
  spec.impact_time = r.number(doc, "impact_time", "impact_time");

  if (const json* cp = r.child(doc, "crash_point", "crash_point")) {
    if (!cp->is_array() || cp->size() != 2 || !(*cp)[0].is_number() || !(*cp)[1].is_number()) {
      errors.push_back({"crash_point", "expected [x, y] numbers"});
    } else {
      spec.crash_point = {(*cp)[0].get<double>(), (*cp)[1].get<double>()};
      if (!std::isfinite(spec.crash_point.x) || !std::isfinite(spec.crash_point.y)) {
        errors.push_back({"crash_point", "must be finite"});
      }
    }
  }
  if (const json* p = r.child(doc, "ptw", "ptw")) {
    spec.ptw = read_vehicle(r, *p, "ptw", errors);
  }
  if (const json* o = r.child(doc, "opponent", "opponent")) {
    spec.opponent = read_vehicle(r, *o, "opponent", errors);
  }
  r.warn_unknown(doc, {"id", "crash_point", "impact_time", "ptw", "opponent", "notes"}, "", warnings);

  if (!errors.empty()) {
    throw ScenarioError(std::move(errors));
  }
  ValidationReport rep = validate_scenario(spec);
  if (!rep.ok()) {
    throw ScenarioError(std::move(rep.errors));
  }
  return spec;
}

ScenarioSpec load_scenario(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScenarioError({{"", "cannot read scenario file '" + path + "'"}});
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

ValidationReport validate_scenario(const ScenarioSpec& spec)
{
  ValidationReport rep;
  if (!std::isfinite(spec.impact_time)) {
    rep.errors.push_back({"impact_time", "must be finite"});
  }
  if (!std::isfinite(spec.crash_point.x) || !std::isfinite(spec.crash_point.y)) {
    rep.errors.push_back({"crash_point", "must be finite"});
  }
  validate_vehicle(spec.ptw, "ptw", spec.impact_time, rep);
  validate_vehicle(spec.opponent, "opponent", spec.impact_time, rep);
  return rep;
}

std::string serialize_scenario(const ScenarioSpec& spec)
{
  json j = json::object();
  j["id"] = spec.id;
  j["crash_point"] = json::array({spec.crash_point.x, spec.crash_point.y});
  j["impact_time"] = spec.impact_time;
  j["notes"] = spec.notes;
  j["ptw"] = vehicle_json(spec.ptw);
  j["opponent"] = vehicle_json(spec.opponent);
  return j.dump(2) + "\n";
}

VehicleState state_at(const VehicleSpec& vehicle, double t)
{
  const auto& traj = vehicle.trajectory;
  const Waypoint& first = traj.front();
  if (t <= first.t) {
    return {first.x, first.y, first.yaw, first.speed, first.accel};
  }
  const Waypoint& last = traj.back();
  if (t >= last.t) {
    if (t == last.t) {
      return {last.x, last.y, last.yaw, last.speed, last.accel};
    }
    const Vec2 p = Vec2{last.x, last.y} + (last.speed * (t - last.t)) * heading_vector(last.yaw);
    return {p.x, p.y, last.yaw, last.speed, 0.0};
  }
  // first waypoint with time > t
  auto it = std::upper_bound(traj.begin(), traj.end(), t,
                             [](double tv, const Waypoint& w) { return tv < w.t; });
  const Waypoint& b = *it;
  const Waypoint& a = *(it - 1);
  if (t == a.t) {
    return {a.x, a.y, a.yaw, a.speed, a.accel};
  }
  return eval_segment(a, b, t - a.t).state;
}

double speed_rate_at(const VehicleSpec& vehicle, double t)
{
  const auto& traj = vehicle.trajectory;
  if (t < traj.front().t || t >= traj.back().t) {
    return 0.0;
  }
  auto it = std::upper_bound(traj.begin(), traj.end(), t,
                             [](double tv, const Waypoint& w) { return tv < w.t; });
  return eval_segment(*(it - 1), *it, t - (it - 1)->t).rate;
}

Vec2 front_point(const VehicleState& s, double length)
{
  return s.position() + (0.5 * length) * heading_vector(s.yaw);
}

double path_length(const VehicleSpec& vehicle, double t0, double t1)
{
  constexpr double kStep = 1e-3;
  if (!(t1 > t0)) {
    return 0.0;
  }
  const auto n = static_cast<long>(std::ceil((t1 - t0) / kStep));
  double total = 0.0;
  Vec2 prev = state_at(vehicle, t0).position();
  for (long i = 1; i <= n; ++i) {
    const double t = (i == n) ? t1 : t0 + static_cast<double>(i) * kStep;
    const Vec2 p = state_at(vehicle, t).position();
    total += (p - prev).norm();
    prev = p;
  }
  return total;
}

}  // namespace maeb
