#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

namespace maeb {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.81;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }
inline constexpr double mps_to_kmh(double v) { return v * 3.6; }
inline constexpr double kmh_to_mps(double v) { return v / 3.6; }

// Wraps to (-pi, pi].
double wrap_angle(double a);
// Wraps to (-180, 180].
double wrap_degrees(double a);
// Smallest difference between two undirected line directions, in [0, 90] deg.
double axial_difference_deg(double a_deg, double b_deg);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 heading_vector(double yaw) { return {std::cos(yaw), std::sin(yaw)}; }

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Rigid transform mapping child-frame coordinates into the parent frame.
// Frames follow the vehicle convention: x forward, y left, z up.
struct Pose3 {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  // R = Rz(yaw) * Ry(pitch) * Rx(roll)
  static Pose3 from_xyz_rpy(const Vec3& xyz, double roll, double pitch, double yaw);
  static Pose3 planar(double x, double y, double z, double yaw);

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_inverse(const Vec3& p) const { return rotation.transpose() * (p - translation); }
  Pose3 compose(const Pose3& child) const;
  Pose3 inverse() const;
};

Mat3 rotation_rpy(double roll, double pitch, double yaw);

}  // namespace maeb
