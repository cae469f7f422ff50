#include "maeb/scene_io.hpp"

#include "maeb/image.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maeb {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& msg)
{
  throw std::invalid_argument("scene field '" + field + "': " + msg);
}

double number(const json& j, const std::string& field)
{
  if (!j.is_number()) {
    fail(field, "expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    fail(field, "must be finite");
  }
  return v;
}

Vec3 vec3(const json& j, const std::string& field)
{
  if (!j.is_array() || j.size() != 3) {
    fail(field, "expected an array of 3 numbers");
  }
  return Vec3(number(j[0], field + "[0]"), number(j[1], field + "[1]"), number(j[2], field + "[2]"));
}

Pose3 pose(const json& j, const std::string& field)
{
  if (!j.is_object()) {
    fail(field, "expected an object");
  }
  Vec3 xyz = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
  if (j.contains("position")) {
    xyz = vec3(j["position"], field + ".position");
  }
  if (j.contains("rpy")) {
    rpy = vec3(j["rpy"], field + ".rpy");
  }
  return Pose3::from_xyz_rpy(xyz, rpy[0], rpy[1], rpy[2]);
}

std::uint64_t seed(const json& j, const std::string& field)
{
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    fail(field, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

bool boolean(const json& j, const std::string& field)
{
  if (!j.is_boolean()) {
    fail(field, "expected true or false");
  }
  return j.get<bool>();
}

json pose_json(const Pose3& p)
{
  const Vec3 rpy = rpy_from_rotation(p.rotation);
  json j;
  j["position"] = {p.translation.x(), p.translation.y(), p.translation.z()};
  j["rpy"] = {rpy.x(), rpy.y(), rpy.z()};
  return j;
}

}  // namespace

Vec3 rpy_from_rotation(const Mat3& r)
{
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return Vec3(roll, pitch, yaw);
}

SceneModel parse_scene(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("scene syntax error at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) {
    fail("", "top-level value must be an object");
  }
  SceneModel scene;
  if (doc.contains("ground")) {
    const json& g = doc["ground"];
    if (g.is_null()) {
      scene.ground.enabled = false;
    } else {
      if (!g.is_object()) {
        fail("ground", "expected an object or null");
      }
      if (g.contains("enabled")) {
        scene.ground.enabled = boolean(g["enabled"], "ground.enabled");
      }
      if (g.contains("pose")) {
        scene.ground.pose = pose(g["pose"], "ground.pose");
      }
      if (g.contains("seed")) {
        scene.ground.seed = seed(g["seed"], "ground.seed");
      }
      if (g.contains("textured")) {
        scene.ground.textured = boolean(g["textured"], "ground.textured");
      }
    }
  }
  if (doc.contains("boxes")) {
    const json& boxes = doc["boxes"];
    if (!boxes.is_array()) {
      fail("boxes", "expected an array");
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const std::string f = "boxes[" + std::to_string(i) + "]";
      const json& b = boxes[i];
      if (!b.is_object()) {
        fail(f, "expected an object");
      }
      TexturedBox box;
      if (!b.contains("size")) {
        fail(f + ".size", "missing");
      }
      box.size = vec3(b["size"], f + ".size");
      if (b.contains("pose")) {
        box.pose = pose(b["pose"], f + ".pose");
      }
      if (b.contains("seed")) {
        box.seed = seed(b["seed"], f + ".seed");
      }
      if (b.contains("textured")) {
        box.textured = boolean(b["textured"], f + ".textured");
      }
      scene.boxes.push_back(box);
    }
  }
  if (doc.contains("background")) {
    scene.background = number(doc["background"], "background");
  }
  if (doc.contains("texture_cell")) {
    scene.texture_cell = number(doc["texture_cell"], "texture_cell");
  }
  scene.validate();
  return scene;
}

SceneModel load_scene(const std::string& path)
{
  return parse_scene(read_file(path));
}

std::string serialize_scene(const SceneModel& scene)
{
  json doc;
  json g;
  g["enabled"] = scene.ground.enabled;
  g["pose"] = pose_json(scene.ground.pose);
  g["seed"] = scene.ground.seed;
  g["textured"] = scene.ground.textured;
  doc["ground"] = g;
  json boxes = json::array();
  for (const auto& b : scene.boxes) {
    json jb;
    jb["pose"] = pose_json(b.pose);
    jb["size"] = {b.size.x(), b.size.y(), b.size.z()};
    jb["seed"] = b.seed;
    jb["textured"] = b.textured;
    boxes.push_back(jb);
  }
  doc["boxes"] = boxes;
  doc["background"] = scene.background;
  doc["texture_cell"] = scene.texture_cell;
  return doc.dump(2) + "\n";
}

}  // namespace maeb
