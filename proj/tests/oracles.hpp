#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library code it checks.

#include "maeb/kinematics.hpp"
#include "maeb/scenario.hpp"
#include "maeb/scenario_builder.hpp"
#include "maeb/sensors.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

namespace oracle {

using maeb::OrientedBox;
using maeb::Vec2;
using maeb::Vec3;

inline double stopping_distance(double v, double a)
{
  return v * v / (2.0 * a);
}

inline bool point_in_box(const OrientedBox& b, Vec2 p, double eps = 1e-12)
{
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double dx = p.x - b.center.x;
  const double dy = p.y - b.center.y;
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  return std::fabs(lx) <= b.half_length + eps && std::fabs(ly) <= b.half_width + eps;
}

inline Vec2 box_boundary_point(const OrientedBox& b, double u)
{
  // u in [0, 1) walks the perimeter counter-clockwise from the front-right corner.
  const double L = 2.0 * b.half_length;
  const double W = 2.0 * b.half_width;
  double d = u * 2.0 * (L + W);
  double lx = 0.0;
  double ly = 0.0;
  if (d < W) {
    lx = b.half_length;
    ly = -b.half_width + d;
  } else if ((d -= W) < L) {
    lx = b.half_length - d;
    ly = b.half_width;
  } else if ((d -= L) < W) {
    lx = -b.half_length;
    ly = b.half_width - d;
  } else {
    d -= W;
    lx = -b.half_length + d;
    ly = -b.half_width;
  }
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  return {b.center.x + c * lx - s * ly, b.center.y + s * lx + c * ly};
}

// Overlap by boundary sampling: two convex boxes overlap iff a boundary point
// of one lies in the other or one contains the other's center.
inline bool sampled_overlap(const OrientedBox& a, const OrientedBox& b, int samples = 10000)
{
  if (point_in_box(a, b.center) || point_in_box(b, a.center)) {
    return true;
  }
  for (int i = 0; i < samples; ++i) {
    const double u = (i + 0.5) / samples;
    if (point_in_box(b, box_boundary_point(a, u)) || point_in_box(a, box_boundary_point(b, u))) {
      return true;
    }
  }
  return false;
}

// Nearest positive intersection with a box by testing its six face
// rectangles one at a time.
inline std::optional<double> ray_box_faces(const maeb::TexturedBox& box, const Vec3& o, const Vec3& d)
{
  const Vec3 lo = box.pose.rotation.transpose() * (o - box.pose.translation);
  const Vec3 ld = box.pose.rotation.transpose() * d;
  const Vec3 h = 0.5 * box.size;
  std::optional<double> best;
  for (int axis = 0; axis < 3; ++axis) {
    if (ld[axis] == 0.0) {
      continue;
    }
    for (double side : {-1.0, 1.0}) {
      const double t = (side * h[axis] - lo[axis]) / ld[axis];
      if (!(t > 0.0)) {
        continue;
      }
      const Vec3 p = lo + t * ld;
      bool inside = true;
      for (int k = 0; k < 3; ++k) {
        if (k != axis && std::fabs(p[k]) > h[k] * (1.0 + 1e-12)) {
          inside = false;
        }
      }
      if (inside && (!best || t < *best)) {
        best = t;
      }
    }
  }
  return best;
}

inline std::optional<double> ray_ground(double ground_z, const Vec3& o, const Vec3& d)
{
  if (d.z() == 0.0) {
    return std::nullopt;
  }
  const double t = (ground_z - o.z()) / d.z();
  return t > 0.0 ? std::optional<double>(t) : std::nullopt;
}

inline double kmh(double mps)
{
  return mps * 3.6;
}

// Random perpendicular crossing that collides near t = 0: the PTW front
// reaches x = 0 at t = 0 and the car's side spans the PTW lane then.
struct RandomCrossing {
  maeb::ScenarioSpec spec;
  double ptw_speed = 0.0;
  double rider_accel = 0.0;
};

inline RandomCrossing random_crossing(std::mt19937_64& rng, int index)
{
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto uni = [&](double a, double b) { return a + (b - a) * u01(rng); };
  RandomCrossing rc;
  rc.ptw_speed = uni(4.0, 17.0);
  rc.rider_accel = u01(rng) < 0.5 ? 0.0 : -uni(0.5, 4.0);
  const double brake_window = uni(0.3, 1.5);
  const double car_speed = uni(3.0, 14.0);
  const double offset = uni(-1.4, 1.4);
  const double side = u01(rng) < 0.5 ? 1.0 : -1.0;

  // Closed-form back-integration so the PTW front is at x = 0 at t = 0.
  double v_brake_start = rc.ptw_speed;
  double d_brake = 0.0;
  if (rc.rider_accel < 0.0) {
    const double v_end = rc.ptw_speed + rc.rider_accel * brake_window;
    if (v_end > 0.5) {
      d_brake = 0.5 * (rc.ptw_speed + v_end) * brake_window;
    } else {
      rc.rider_accel = 0.0;
    }
  }
  const double t0 = -4.0;
  const double x_brake = -1.05 - d_brake;
  const double x0 = rc.rider_accel < 0.0 ? x_brake - v_brake_start * (4.0 - brake_window) : -1.05 - 4.0 * rc.ptw_speed;
  std::vector<maeb::Phase> phases;
  if (rc.rider_accel < 0.0) {
    phases = {{-brake_window, 0.0}, {0.0, rc.rider_accel}, {1.5, 0.0}};
  } else {
    phases = {{1.5, 0.0}};
  }
  rc.spec.id = "random_" + std::to_string(index);
  rc.spec.ptw = maeb::straight_run("ptw", 2.1, 0.8, {x0, 0.0}, 0.0, rc.ptw_speed, t0, phases);
  rc.spec.opponent = maeb::constant_speed_through("car", 3.7, 1.6, {0.8, offset}, 0.0,
                                                  side > 0 ? -maeb::kPi / 2 : maeb::kPi / 2, car_speed, t0, 1.5);
  rc.spec.crash_point = {0.0, 0.0};
  rc.spec.impact_time = 0.0;
  return rc;
}

// A long box sweeping sideways into a coasting PTW: the impact instant is set
// by the box alone, so braking does not shift it.
inline maeb::ScenarioSpec side_sweep(double v)
{
  maeb::ScenarioSpec s;
  s.id = "side_sweep";
  s.ptw = maeb::straight_run("ptw", 2.1, 0.8, {-3.0 * v, 0}, 0, v, -3, {{1.5, 0}});
  s.opponent = maeb::constant_speed_through("sweeper", 2.0, 60.0, {0.0, 1.4}, 0.0, -maeb::kPi / 2, 5.0, -3, 1.5);
  s.crash_point = {0, 0.4};
  return s;
}

}  // namespace oracle
