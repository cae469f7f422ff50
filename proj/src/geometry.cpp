#include "maeb/geometry.hpp"

namespace maeb {

double wrap_angle(double a)
{
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) {
    r += 2.0 * kPi;
  }
  return r;
}

double wrap_degrees(double a)
{
  double r = std::remainder(a, 360.0);
  if (r <= -180.0) {
    r += 360.0;
  }
  return r;
}

double axial_difference_deg(double a_deg, double b_deg)
{
  double d = std::fabs(std::remainder(a_deg - b_deg, 180.0));
  return d;
}

Mat3 rotation_rpy(double roll, double pitch, double yaw)
{
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
    .toRotationMatrix();
}

Pose3 Pose3::from_xyz_rpy(const Vec3& xyz, double roll, double pitch, double yaw)
{
  Pose3 p;
  p.rotation = rotation_rpy(roll, pitch, yaw);
  p.translation = xyz;
  return p;
}

Pose3 Pose3::planar(double x, double y, double z, double yaw)
{
  return from_xyz_rpy(Vec3(x, y, z), 0.0, 0.0, yaw);
}

Pose3 Pose3::compose(const Pose3& child) const
{
  Pose3 out;
  out.rotation = rotation * child.rotation;
  out.translation = rotation * child.translation + translation;
  return out;
}

Pose3 Pose3::inverse() const
{
  Pose3 out;
  out.rotation = rotation.transpose();
  out.translation = -(out.rotation * translation);
  return out;
}

}  // namespace maeb
