#include "maeb/config.hpp"

#include "maeb/image.hpp"
#include "maeb/scene_io.hpp"

#include <cmath>
#include <set>

namespace maeb {

namespace {

using json = nlohmann::ordered_json;

class Section {
public:
  Section(const json& doc, std::string name) : name_(std::move(name))
  {
    if (!doc.is_object()) {
      throw ConfigError("config section '" + name_ + "' must be an object");
    }
    obj_ = &doc;
  }

  ~Section() noexcept(false)
  {
    if (std::uncaught_exceptions() > 0) {
      return;
    }
    for (const auto& [key, value] : obj_->items()) {
      (void)value;
      if (!seen_.count(key)) {
        throw ConfigError("unknown config key '" + name_ + "." + key + "'");
      }
    }
  }

  const json* get(const std::string& key)
  {
    seen_.insert(key);
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out)
  {
    if (const json* v = get(key)) {
      if (!v->is_number() || !std::isfinite(v->get<double>())) {
        fail(key, "a finite number");
      }
      out = v->get<double>();
    }
  }

  void integer(const std::string& key, int& out)
  {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) {
        fail(key, "an integer");
      }
      out = v->get<int>();
    }
  }

  void count(const std::string& key, std::size_t& out)
  {
    if (const json* v = get(key)) {
      if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
        fail(key, "a non-negative integer");
      }
      out = v->get<std::size_t>();
    }
  }

  void seed(const std::string& key, std::uint64_t& out)
  {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
        fail(key, "a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void string(const std::string& key, std::string& out)
  {
    if (const json* v = get(key)) {
      if (!v->is_string()) {
        fail(key, "a string");
      }
      out = v->get<std::string>();
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const
  {
    throw ConfigError("config key '" + name_ + "." + key + "' must be " + what);
  }

  const std::string& name() const { return name_; }

private:
  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> seen_;
};

void read_maneuvers(const json& j, ManeuverSetParams& p)
{
  Section s(j, "maneuvers");
  s.number("max_brake", p.max_brake);
  s.number("max_lateral", p.max_lateral);
  s.integer("n_lateral_levels", p.n_lateral_levels);
  s.number("actuation_delay", p.actuation_delay);
  s.number("horizon", p.horizon);
  s.number("dt", p.dt);
}

void read_maeb(const json& j, MaebConfig& c)
{
  Section s(j, "maeb");
  s.number("auto_decel_target", c.auto_decel_target);
  s.number("ramp_time", c.ramp_time);
  std::string rider = to_string(c.rider_override);
  s.string("rider_override", rider);
  try {
    c.rider_override = rider_override_from_string(rider);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void read_rig(const json& j, RigConfig& r)
{
  Section s(j, "rig");
  s.integer("width", r.width);
  s.integer("height", r.height);
  s.integer("native_width", r.native_width);
  std::string scaling = r.focal_scaling == FocalScaling::native ? "native" : "scale_to_width";
  s.string("focal_scaling", scaling);
  if (scaling == "native") {
    r.focal_scaling = FocalScaling::native;
  } else if (scaling == "scale_to_width") {
    r.focal_scaling = FocalScaling::scale_to_width;
  } else {
    s.fail("focal_scaling", "'native' or 'scale_to_width'");
  }
  if (const json* m = s.get("mount")) {
    Section ms(*m, "rig.mount");
    std::vector<double> pos = {r.mount.translation.x(), r.mount.translation.y(), r.mount.translation.z()};
    const Vec3 rpy0 = rpy_from_rotation(r.mount.rotation);
    std::vector<double> rpy = {rpy0.x(), rpy0.y(), rpy0.z()};
    for (auto [key, vec] : {std::pair<const char*, std::vector<double>*>{"position", &pos}, {"rpy", &rpy}}) {
      if (const json* v = ms.get(key)) {
        if (!v->is_array() || v->size() != 3) {
          ms.fail(key, "an array of 3 numbers");
        }
        for (std::size_t i = 0; i < 3; ++i) {
          if (!(*v)[i].is_number()) {
            ms.fail(key, "an array of 3 numbers");
          }
          (*vec)[i] = (*v)[i].get<double>();
        }
      }
    }
    r.mount = Pose3::from_xyz_rpy(Vec3(pos[0], pos[1], pos[2]), rpy[0], rpy[1], rpy[2]);
  }
  s.integer("supersample", r.supersample);
  s.number("noise_amplitude", r.noise_amplitude);
  s.seed("noise_seed", r.noise_seed);
}

void read_lidar(const json& j, LidarConfig& l)
{
  Section s(j, "lidar");
  s.number("hfov_deg", l.hfov_deg);
  s.number("angular_step_deg", l.angular_step_deg);
  s.number("max_range", l.max_range);
  s.number("mount_height", l.mount_height);
  s.number("mount_forward", l.mount_forward);
}

void read_matching(const json& j, MatchingParams& m)
{
  Section s(j, "matching");
  s.integer("d_max", m.d_max);
  s.integer("census_window", m.census_window);
  s.integer("census_threshold", m.census_threshold);
  s.integer("block_window", m.block_window);
  s.integer("p1", m.p1);
  s.integer("p2", m.p2);
  s.integer("paths", m.paths);
  s.number("lr_threshold", m.lr_threshold);
  s.number("uniqueness", m.uniqueness);
}

PairId parse_pair(Section& s, const std::string& key, const json& v)
{
  if (!v.is_string()) {
    s.fail(key, "'outer', 'middle' or 'inner'");
  }
  try {
    return pair_from_string(v.get<std::string>());
  } catch (const std::invalid_argument&) {
    s.fail(key, "'outer', 'middle' or 'inner'");
  }
}

void read_eval(const json& j, EvalConfig& e)
{
  Section s(j, "eval");
  s.number("distance", e.distance);
  if (const json* v = s.get("heading_pair")) {
    e.heading_pair = parse_pair(s, "heading_pair", *v);
  }
  if (const json* v = s.get("pairs")) {
    if (!v->is_array() || v->empty()) {
      s.fail("pairs", "a non-empty array of pair names");
    }
    e.pairs.clear();
    for (const auto& item : *v) {
      e.pairs.push_back(parse_pair(s, "pairs", item));
    }
  }
  s.integer("blur_px", e.blur_px);
  s.number("roi_margin", e.roi_margin);
  s.number("opponent_height", e.opponent_height);
  s.number("max_depth", e.max_depth);
  s.seed("texture_seed", e.texture_seed);
  s.integer("frames", e.frames);
  s.number("frame_interval", e.frame_interval);
  if (const json* h = s.get("heading")) {
    Section hs(*h, "eval.heading");
    hs.number("ground_threshold", e.heading.ground_threshold);
    hs.number("inlier_threshold", e.heading.inlier_threshold);
    hs.integer("iterations", e.heading.iterations);
    hs.seed("seed", e.heading.seed);
    hs.count("min_inliers", e.heading.min_inliers);
  }
}

json pose_echo(const Pose3& p)
{
  const Vec3 rpy = rpy_from_rotation(p.rotation);
  json j;
  j["position"] = {p.translation.x(), p.translation.y(), p.translation.z()};
  j["rpy"] = {rpy.x(), rpy.y(), rpy.z()};
  return j;
}

}  // namespace

void HarnessConfig::validate() const
{
  try {
    maeb::validate(maneuvers);
    maeb::validate(maeb);
    rig.validate();
    lidar.validate();
    matching.validate();
    eval.heading.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(eval.distance > 0.0)) {
    throw ConfigError("eval.distance must be > 0");
  }
  if (eval.blur_px < 0 || eval.blur_px > 64) {
    throw ConfigError("eval.blur_px must lie in [0, 64]");
  }
  if (!(eval.roi_margin >= 0.0) || !(eval.opponent_height > 0.0) || !(eval.max_depth > 0.0)) {
    throw ConfigError("eval.roi_margin must be >= 0; opponent_height and max_depth must be > 0");
  }
  if (eval.frames < 1 || eval.frames > 100) {
    throw ConfigError("eval.frames must lie in [1, 100]");
  }
  if (!(eval.frame_interval > 0.0)) {
    throw ConfigError("eval.frame_interval must be > 0");
  }
}

HarnessConfig parse_config(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("config syntax error at byte " + std::to_string(e.byte));
  }
  HarnessConfig cfg;
  Section top(doc, "config");
  if (const json* j = top.get("maneuvers")) {
    read_maneuvers(*j, cfg.maneuvers);
  }
  if (const json* j = top.get("maeb")) {
    read_maeb(*j, cfg.maeb);
  }
  if (const json* j = top.get("rig")) {
    read_rig(*j, cfg.rig);
  }
  if (const json* j = top.get("lidar")) {
    read_lidar(*j, cfg.lidar);
  }
  if (const json* j = top.get("matching")) {
    read_matching(*j, cfg.matching);
  }
  if (const json* j = top.get("eval")) {
    read_eval(*j, cfg.eval);
  }
  top.get("seed");
  if (const json* j = doc.contains("seed") ? &doc["seed"] : nullptr) {
    if (!j->is_number_unsigned() && !(j->is_number_integer() && j->get<std::int64_t>() >= 0)) {
      throw ConfigError("config key 'seed' must be a non-negative integer");
    }
    apply_seed(cfg, j->get<std::uint64_t>());
  }
  cfg.validate();
  return cfg;
}

HarnessConfig load_config(const std::string& path)
{
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

void apply_seed(HarnessConfig& cfg, std::uint64_t seed)
{
  cfg.rig.noise_seed = seed;
  cfg.eval.texture_seed = seed ^ 0x7e57u;
  cfg.eval.heading.seed = seed ^ 0x4ead1259u;
}

nlohmann::ordered_json config_to_json(const HarnessConfig& cfg)
{
  json j;
  const auto& m = cfg.maneuvers;
  j["maneuvers"] = {{"max_brake", m.max_brake},
                    {"max_lateral", m.max_lateral},
                    {"n_lateral_levels", m.n_lateral_levels},
                    {"actuation_delay", m.actuation_delay},
                    {"horizon", m.horizon},
                    {"dt", m.dt}};
  j["maeb"] = {{"auto_decel_target", cfg.maeb.auto_decel_target},
               {"ramp_time", cfg.maeb.ramp_time},
               {"rider_override", to_string(cfg.maeb.rider_override)}};
  const auto& r = cfg.rig;
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    const CameraModel cam = r.camera(p.id);
    pairs.push_back({{"id", to_string(p.id)},
                     {"cameras", p.cameras},
                     {"baseline", p.baseline},
                     {"declared_hfov_deg", p.hfov_deg},
                     {"native_focal", p.native_focal},
                     {"focal", cam.focal},
                     {"pinhole_hfov_deg", cam.pinhole_hfov_deg()}});
  }
  j["rig"] = {{"width", r.width},
              {"height", r.height},
              {"native_width", r.native_width},
              {"focal_scaling", r.focal_scaling == FocalScaling::native ? "native" : "scale_to_width"},
              {"mount", pose_echo(r.mount)},
              {"supersample", r.supersample},
              {"noise_amplitude", r.noise_amplitude},
              {"noise_seed", r.noise_seed},
              {"pairs", pairs}};
  const auto& l = cfg.lidar;
  j["lidar"] = {{"hfov_deg", l.hfov_deg},
                {"angular_step_deg", l.angular_step_deg},
                {"max_range", l.max_range},
                {"mount_height", l.mount_height},
                {"mount_forward", l.mount_forward}};
  const auto& mp = cfg.matching;
  j["matching"] = {{"d_max", mp.d_max},
                   {"census_window", mp.census_window},
                   {"census_threshold", mp.census_threshold},
                   {"block_window", mp.block_window},
                   {"p1", mp.p1},
                   {"p2", mp.p2},
                   {"paths", mp.paths},
                   {"lr_threshold", mp.lr_threshold},
                   {"uniqueness", mp.uniqueness},
                   {"min_disparity", kMinDisparity}};
  const auto& e = cfg.eval;
  json pair_names = json::array();
  for (PairId id : e.pairs) {
    pair_names.push_back(to_string(id));
  }
  j["eval"] = {{"distance", e.distance},
               {"heading_pair", to_string(e.heading_pair)},
               {"pairs", pair_names},
               {"blur_px", e.blur_px},
               {"roi_margin", e.roi_margin},
               {"opponent_height", e.opponent_height},
               {"max_depth", e.max_depth},
               {"texture_seed", e.texture_seed},
               {"frames", e.frames},
               {"frame_interval", e.frame_interval},
               {"heading",
                {{"camera_height", r.mount.translation.z()},
                 {"ground_threshold", e.heading.ground_threshold},
                 {"inlier_threshold", e.heading.inlier_threshold},
                 {"iterations", e.heading.iterations},
                 {"seed", e.heading.seed},
                 {"min_inliers", e.heading.min_inliers}}}};
  return j;
}

}  // namespace maeb
