#pragma once

#include "maeb/geometry.hpp"

namespace maeb {

// Planar pose, speed and longitudinal acceleration of a vehicle reference
// point (footprint center) at one instant.
struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double speed = 0.0;
  double accel = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct SpeedAdvance {
  double speed = 0.0;
  double distance = 0.0;
};

// Constant-acceleration advance over dt that stops at standstill instead of
// reversing. Exact for the piecewise motion it describes.
inline SpeedAdvance advance_speed(double v, double a, double dt)
{
  const double v1 = v + a * dt;
  if (v1 >= 0.0 || a >= 0.0) {
    return {v1 < 0.0 ? 0.0 : v1, 0.5 * (v + v1) * dt};
  }
  return {0.0, v * v / (2.0 * -a)};
}

}  // namespace maeb
