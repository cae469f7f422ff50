#pragma once

#include "maeb/sensors.hpp"

#include <string>
#include <string_view>

namespace maeb {

// Scene JSON: {"ground": {...}, "boxes": [{"pose": {"position": [x,y,z],
// "rpy": [r,p,y]}, "size": [sx,sy,sz], "seed": n}], "background": g,
// "texture_cell": m}. Throws std::invalid_argument naming the bad field.
SceneModel parse_scene(std::string_view text);
SceneModel load_scene(const std::string& path);
std::string serialize_scene(const SceneModel& scene);

// Roll, pitch, yaw of R = Rz(yaw) * Ry(pitch) * Rx(roll).
Vec3 rpy_from_rotation(const Mat3& r);

}  // namespace maeb
