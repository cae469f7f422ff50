#pragma once

#include "maeb/geometry.hpp"
#include "maeb/image.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace maeb {

// Pinhole camera. Continuous pixel coordinates put the center of pixel
// (i, j) at (i + 0.5, j + 0.5); the default principal point is the image
// center, which is why image dimensions must be even.
struct CameraModel {
  double focal = 950.0;
  double cx = 320.0;
  double cy = 180.0;
  int width = 640;
  int height = 360;
  double declared_hfov_deg = 0.0;  // from the optics table; informational

  static CameraModel centered(double focal, int width, int height, double declared_hfov_deg = 0.0);

  double pinhole_hfov_deg() const;
  // |pinhole hfov - declared| / declared at this image width.
  double hfov_mismatch() const;
  void validate() const;
};

// Pinhole projection of a world point seen from a camera whose body frame
// (x along the optical axis, y left, z up) has pose camera_pose in the world.
// nullopt when the point is at or behind the image plane or off-image.
std::optional<Vec2> project_point(const CameraModel& cam, const Pose3& camera_pose, const Vec3& p);

// Optical frame <-> body frame: optical (x right, y down, z forward).
Vec3 body_to_optical(const Vec3& body);
Vec3 optical_to_body(const Vec3& optical);

enum class PairId { outer, middle, inner };

std::string to_string(PairId id);
PairId pair_from_string(const std::string& s);

struct StereoPairSpec {
  PairId id = PairId::inner;
  std::string cameras;       // "I&VI", ...
  double baseline = 0.0;     // m
  double hfov_deg = 0.0;     // declared
  double native_focal = 0.0; // px at native_width
};

// The trifocal rig optics table: outer I&VI, middle II&V, inner III&IV.
std::array<StereoPairSpec, 3> trifocal_pairs();

enum class FocalScaling {
  native,          // keep the native focal; a smaller image is a centered crop
  scale_to_width,  // scale focal with width; the full native field of view
};

struct RigConfig {
  std::array<StereoPairSpec, 3> pairs = trifocal_pairs();
  int width = 640;
  int height = 360;
  int native_width = 1920;
  FocalScaling focal_scaling = FocalScaling::scale_to_width;
  // Pose of the rig frame (x forward, y left, z up; cameras at y = +/-B/2)
  // in the PTW body frame. Roll enters here.
  Pose3 mount = Pose3::planar(0.65, 0.0, 0.8, 0.0);
  int supersample = 2;
  double noise_amplitude = 1.0;  // uniform +/- gray levels
  std::uint64_t noise_seed = 0x5eed;

  const StereoPairSpec& pair(PairId id) const;
  CameraModel camera(PairId id) const;
  void validate() const;
};

struct StereoCameraPoses {
  Pose3 left;
  Pose3 right;
};

// World poses of the two cameras of a pair for a rig placed at rig_world.
StereoCameraPoses camera_poses(const RigConfig& rig, PairId id, const Pose3& rig_world);

struct TexturedBox {
  Pose3 pose;  // box center
  Vec3 size = Vec3(1.0, 1.0, 1.0);  // full extents along local x, y, z
  std::uint64_t seed = 1;
  bool textured = true;
};

// Infinite plane z = 0 of its local frame.
struct GroundPlane {
  bool enabled = true;
  Pose3 pose;
  std::uint64_t seed = 11;
  bool textured = true;
};

struct SceneModel {
  GroundPlane ground;
  std::vector<TexturedBox> boxes;
  double background = 180.0;     // gray level where rays escape
  double texture_cell = 0.035;   // m, lattice spacing of the procedural texture

  void validate() const;
  // Same scene with every pose premultiplied by `transform`.
  SceneModel transformed(const Pose3& transform) const;
};

struct RayHit {
  double t = 0.0;   // ray parameter (distance if the direction is unit)
  int surface = -1; // -1 ground, otherwise box index
  int face = 0;
  Vec3 local;       // hit point in the surface frame
};

std::optional<RayHit> cast_ray(const SceneModel& scene, const Vec3& origin, const Vec3& dir);

// Deterministic shade in [0, 255] for a hit: pure function of surface seed
// and surface-local hit coordinates.
double surface_shade(const SceneModel& scene, const RayHit& hit);

struct RenderView {
  Image image;
  DepthMap depth;
};

RenderView render_view(const CameraModel& cam, const Pose3& camera_pose, const SceneModel& scene,
                       int supersample, int blur_px, double noise_amplitude, std::uint64_t noise_seed);

struct StereoRender {
  Image left;
  Image right;
  DepthMap depth;  // ground truth for the left camera
  CameraModel camera;
  double baseline = 0.0;
};

// Rectified-by-construction pair render. Every view goes through a small
// binomial lens PSF; blur_px > 1 then applies a horizontal box filter of
// that width to both views before sensor noise.
StereoRender render_stereo_pair(const RigConfig& rig, PairId id, const Pose3& rig_world, const SceneModel& scene,
                                int blur_px = 0);

void box_blur_horizontal(std::vector<float>& values, int width, int height, int blur_px);
void lens_psf(std::vector<float>& values, int width, int height);

struct LidarConfig {
  double hfov_deg = 110.0;
  double angular_step_deg = 0.25;
  double max_range = 200.0;
  double mount_height = 0.6;
  // Sensor offset ahead of the PTW footprint center (front wheel axle).
  double mount_forward = 0.65;

  void validate() const;
  std::size_t beam_count() const;
  double bearing(std::size_t i) const;  // rad, CCW positive
};

struct LidarReturn {
  double bearing = 0.0;
  std::optional<double> range;

  friend bool operator==(const LidarReturn&, const LidarReturn&) = default;
};

using LidarScan = std::vector<LidarReturn>;

// One planar ray per angular step across the field of view, cast in the
// sensor's x-y plane; nearest hit within max_range or no return.
LidarScan lidar_scan(const LidarConfig& cfg, const Pose3& sensor_pose, const SceneModel& scene);

}  // namespace maeb
