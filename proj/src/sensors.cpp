#include "maeb/sensors.hpp"

#include "maeb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maeb {

namespace {

constexpr double kRayEps = 1e-9;

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash3(std::uint64_t seed, std::int64_t i, std::int64_t j)
{
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(i));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(j) * 0x2545f4914f6cdd1dULL));
  return h;
}

double unit_from_hash(std::uint64_t h)
{
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

double lattice_value(std::uint64_t seed, std::int64_t i, std::int64_t j)
{
  return unit_from_hash(hash3(seed, i, j));
}

// Bilinear value noise with smoothstep weights, in [0, 1).
double value_noise(std::uint64_t seed, double u, double v)
{
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  const auto i = static_cast<std::int64_t>(fu);
  const auto j = static_cast<std::int64_t>(fv);
  double a = u - fu;
  double b = v - fv;
  a = a * a * (3.0 - 2.0 * a);
  b = b * b * (3.0 - 2.0 * b);
  const double v00 = lattice_value(seed, i, j);
  const double v10 = lattice_value(seed, i + 1, j);
  const double v01 = lattice_value(seed, i, j + 1);
  const double v11 = lattice_value(seed, i + 1, j + 1);
  return (1 - a) * (1 - b) * v00 + a * (1 - b) * v10 + (1 - a) * b * v01 + a * b * v11;
}

double high_contrast(double n)
{
  return std::clamp(0.5 + 2.2 * (n - 0.5), 0.0, 1.0);
}

std::optional<double> ray_box(const TexturedBox& box, const Vec3& o_world, const Vec3& d_world, Vec3* local_hit)
{
  const Vec3 o = box.pose.apply_inverse(o_world);
  const Vec3 d = box.pose.rotation.transpose() * d_world;
  const Vec3 h = 0.5 * box.size;
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (std::fabs(d[k]) < 1e-15) {
      if (std::fabs(o[k]) > h[k]) {
        return std::nullopt;
      }
      continue;
    }
    double t1 = (-h[k] - o[k]) / d[k];
    double t2 = (h[k] - o[k]) / d[k];
    if (t1 > t2) {
      std::swap(t1, t2);
    }
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
    if (t_near > t_far) {
      return std::nullopt;
    }
  }
  if (!(t_near > kRayEps)) {
    return std::nullopt;
  }
  if (local_hit != nullptr) {
    *local_hit = o + t_near * d;
  }
  return t_near;
}

int box_face(const TexturedBox& box, const Vec3& local)
{
  const Vec3 h = 0.5 * box.size;
  int best = 0;
  double best_ratio = -1.0;
  for (int k = 0; k < 3; ++k) {
    const double r = std::fabs(local[k]) / h[k];
    if (r > best_ratio) {
      best_ratio = r;
      best = k;
    }
  }
  return 2 * best + (local[best] >= 0.0 ? 0 : 1);
}

}  // namespace

CameraModel CameraModel::centered(double focal, int width, int height, double declared_hfov_deg)
{
  CameraModel c;
  c.focal = focal;
  c.width = width;
  c.height = height;
  c.cx = 0.5 * width;
  c.cy = 0.5 * height;
  c.declared_hfov_deg = declared_hfov_deg;
  return c;
}

double CameraModel::pinhole_hfov_deg() const
{
  return rad2deg(2.0 * std::atan(0.5 * width / focal));
}

double CameraModel::hfov_mismatch() const
{
  if (declared_hfov_deg <= 0.0) {
    return 0.0;
  }
  return std::fabs(pinhole_hfov_deg() - declared_hfov_deg) / declared_hfov_deg;
}

void CameraModel::validate() const
{
  if (!(focal > 0.0)) {
    throw std::invalid_argument("camera focal must be > 0");
  }
  if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0) {
    throw std::invalid_argument("camera image dimensions must be positive and even");
  }
}

Vec3 body_to_optical(const Vec3& b)
{
  return Vec3(-b.y(), -b.z(), b.x());
}

Vec3 optical_to_body(const Vec3& o)
{
  return Vec3(o.z(), -o.x(), -o.y());
}

std::optional<Vec2> project_point(const CameraModel& cam, const Pose3& camera_pose, const Vec3& p)
{
  const Vec3 c = body_to_optical(camera_pose.apply_inverse(p));
  if (!(c.z() > 1e-12)) {
    return std::nullopt;
  }
  const double u = cam.focal * c.x() / c.z() + cam.cx;
  const double v = cam.focal * c.y() / c.z() + cam.cy;
  if (!(u >= 0.0 && u < cam.width && v >= 0.0 && v < cam.height)) {
    return std::nullopt;
  }
  return Vec2{u, v};
}

std::string to_string(PairId id)
{
  switch (id) {
    case PairId::outer:
      return "outer";
    case PairId::middle:
      return "middle";
    case PairId::inner:
      return "inner";
  }
  return "inner";
}

PairId pair_from_string(const std::string& s)
{
  if (s == "outer") {
    return PairId::outer;
  }
  if (s == "middle") {
    return PairId::middle;
  }
  if (s == "inner") {
    return PairId::inner;
  }
  throw std::invalid_argument("stereo pair must be 'outer', 'middle' or 'inner'");
}

std::array<StereoPairSpec, 3> trifocal_pairs()
{
  return {{
    {PairId::outer, "I&VI", 0.597, 80.0, 1600.0},
    {PairId::middle, "II&V", 0.387, 110.0, 850.0},
    {PairId::inner, "III&IV", 0.149, 170.0, 950.0},
  }};
}

const StereoPairSpec& RigConfig::pair(PairId id) const
{
  for (const auto& p : pairs) {
    if (p.id == id) {
      return p;
    }
  }
  throw std::invalid_argument("rig has no pair " + to_string(id));
}

CameraModel RigConfig::camera(PairId id) const
{
  const StereoPairSpec& p = pair(id);
  double focal = p.native_focal;
  if (focal_scaling == FocalScaling::scale_to_width) {
    focal *= static_cast<double>(width) / static_cast<double>(native_width);
  }
  return CameraModel::centered(focal, width, height, p.hfov_deg);
}

void RigConfig::validate() const
{
  if (!(pairs[0].baseline > pairs[1].baseline && pairs[1].baseline > pairs[2].baseline && pairs[2].baseline > 0.0)) {
    throw std::invalid_argument("rig baselines must be strictly decreasing from outer to inner pair");
  }
  for (const auto& p : pairs) {
    if (!(p.native_focal > 0.0)) {
      throw std::invalid_argument("rig focal lengths must be > 0");
    }
  }
  if (native_width <= 0) {
    throw std::invalid_argument("rig native_width must be > 0");
  }
  if (supersample < 1 || supersample > 8) {
    throw std::invalid_argument("rig supersample must lie in [1, 8]");
  }
  if (!(noise_amplitude >= 0.0)) {
    throw std::invalid_argument("rig noise_amplitude must be >= 0");
  }
  camera(PairId::inner).validate();
}

StereoCameraPoses camera_poses(const RigConfig& rig, PairId id, const Pose3& rig_world)
{
  const double half = 0.5 * rig.pair(id).baseline;
  StereoCameraPoses out;
  out.left = rig_world.compose(Pose3::planar(0.0, half, 0.0, 0.0));
  out.right = rig_world.compose(Pose3::planar(0.0, -half, 0.0, 0.0));
  return out;
}

void SceneModel::validate() const
{
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const Vec3& s = boxes[i].size;
    if (!(s.x() > 0.0 && s.y() > 0.0 && s.z() > 0.0) || !s.allFinite()) {
      throw std::invalid_argument("scene box " + std::to_string(i) + " has a degenerate size");
    }
  }
  if (!(texture_cell > 0.0)) {
    throw std::invalid_argument("scene texture_cell must be > 0");
  }
}

SceneModel SceneModel::transformed(const Pose3& transform) const
{
  SceneModel out = *this;
  out.ground.pose = transform.compose(ground.pose);
  for (auto& b : out.boxes) {
    b.pose = transform.compose(b.pose);
  }
  return out;
}

std::optional<RayHit> cast_ray(const SceneModel& scene, const Vec3& origin, const Vec3& dir)
{
  std::optional<RayHit> best;
  if (scene.ground.enabled) {
    const Vec3 n = scene.ground.pose.rotation.col(2);
    const double denom = n.dot(dir);
    if (std::fabs(denom) > 1e-15) {
      const double t = n.dot(scene.ground.pose.translation - origin) / denom;
      if (t > kRayEps) {
        RayHit h;
        h.t = t;
        h.surface = -1;
        h.local = scene.ground.pose.apply_inverse(origin + t * dir);
        best = h;
      }
    }
  }
  for (std::size_t i = 0; i < scene.boxes.size(); ++i) {
    Vec3 local;
    const auto t = ray_box(scene.boxes[i], origin, dir, &local);
    if (t && (!best || *t < best->t)) {
      RayHit h;
      h.t = *t;
      h.surface = static_cast<int>(i);
      h.local = local;
      h.face = box_face(scene.boxes[i], local);
      best = h;
    }
  }
  return best;
}

double surface_shade(const SceneModel& scene, const RayHit& hit)
{
  const double inv_cell = 1.0 / scene.texture_cell;
  if (hit.surface < 0) {
    if (!scene.ground.textured) {
      return 110.0;
    }
    const double n = value_noise(scene.ground.seed, hit.local.x() * inv_cell, hit.local.y() * inv_cell);
    return 30.0 + 170.0 * high_contrast(n);
  }
  const TexturedBox& box = scene.boxes[static_cast<std::size_t>(hit.surface)];
  // Faces are told apart by a fixed brightness factor.
  static constexpr double kFaceGain[6] = {1.0, 0.93, 0.86, 0.96, 0.9, 0.8};
  const double gain = kFaceGain[hit.face];
  if (!box.textured) {
    return 150.0 * gain;
  }
  const int axis = hit.face / 2;
  const int ua = (axis + 1) % 3;
  const int va = (axis + 2) % 3;
  const std::uint64_t seed = splitmix64(box.seed * 6 + static_cast<std::uint64_t>(hit.face));
  const double n = value_noise(seed, hit.local[ua] * inv_cell, hit.local[va] * inv_cell);
  return gain * (20.0 + 225.0 * high_contrast(n));
}

void box_blur_horizontal(std::vector<float>& values, int width, int height, int blur_px)
{
  if (blur_px <= 1) {
    return;
  }
  const int left = blur_px / 2;
  const int right = blur_px - 1 - left;
  std::vector<float> row(static_cast<std::size_t>(width));
  for (int y = 0; y < height; ++y) {
    float* r = values.data() + static_cast<std::size_t>(y) * width;
    std::copy(r, r + width, row.begin());
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -left; k <= right; ++k) {
        const int xx = std::clamp(x + k, 0, width - 1);
        acc += row[static_cast<std::size_t>(xx)];
      }
      r[x] = static_cast<float>(acc / blur_px);
    }
  }
}

void lens_psf(std::vector<float>& values, int width, int height)
{
  // [1 2 1]/4 both ways; clamped border.
  std::vector<float> tmp(values.size());
  auto pass = [&](const std::vector<float>& in, std::vector<float>& out, int dx, int dy) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        auto at = [&](int k) {
          const int xx = std::clamp(x + k * dx, 0, width - 1);
          const int yy = std::clamp(y + k * dy, 0, height - 1);
          return in[static_cast<std::size_t>(yy) * width + xx];
        };
        out[static_cast<std::size_t>(y) * width + x] = 0.25f * at(-1) + 0.5f * at(0) + 0.25f * at(1);
      }
    }
  };
  pass(values, tmp, 1, 0);
  pass(tmp, values, 0, 1);
}

RenderView render_view(const CameraModel& cam, const Pose3& camera_pose, const SceneModel& scene,
                       int supersample, int blur_px, double noise_amplitude, std::uint64_t noise_seed)
{
  cam.validate();
  scene.validate();
  const int w = cam.width;
  const int h = cam.height;
  const int ss = std::max(1, supersample);
  std::vector<float> radiance(static_cast<std::size_t>(w) * h, 0.0f);
  RenderView out;
  out.depth = DepthMap(w, h);
  const Vec3 origin = camera_pose.translation;
  const Mat3& R = camera_pose.rotation;

  auto ray_dir = [&](double u, double v) {
    return Vec3(R * optical_to_body(Vec3((u - cam.cx) / cam.focal, (v - cam.cy) / cam.focal, 1.0)));
  };

  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int sy = 0; sy < ss; ++sy) {
        for (int sx = 0; sx < ss; ++sx) {
          const double u = x + (sx + 0.5) / ss;
          const double v = y + (sy + 0.5) / ss;
          const auto hit = cast_ray(scene, origin, ray_dir(u, v));
          acc += hit ? surface_shade(scene, *hit) : scene.background;
        }
      }
      radiance[static_cast<std::size_t>(y) * w + x] = static_cast<float>(acc / (ss * ss));
      // Direction has unit optical z, so the ray parameter is the depth.
      const auto center = cast_ray(scene, origin, ray_dir(x + 0.5, y + 0.5));
      if (center) {
        out.depth.at(x, y) = static_cast<float>(center->t);
      }
    }
  });

  lens_psf(radiance, w, h);
  box_blur_horizontal(radiance, w, h, blur_px);

  out.image = Image(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = radiance[static_cast<std::size_t>(y) * w + x];
      if (noise_amplitude > 0.0) {
        v += noise_amplitude * (2.0 * unit_from_hash(hash3(noise_seed, x, y)) - 1.0);
      }
      out.image.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

StereoRender render_stereo_pair(const RigConfig& rig, PairId id, const Pose3& rig_world, const SceneModel& scene,
                                int blur_px)
{
  rig.validate();
  const CameraModel cam = rig.camera(id);
  const StereoCameraPoses poses = camera_poses(rig, id, rig_world);
  const auto pair_index = static_cast<std::uint64_t>(id);
  RenderView left = render_view(cam, poses.left, scene, rig.supersample, blur_px, rig.noise_amplitude,
                                splitmix64(rig.noise_seed + 2 * pair_index));
  RenderView right = render_view(cam, poses.right, scene, rig.supersample, blur_px, rig.noise_amplitude,
                                 splitmix64(rig.noise_seed + 2 * pair_index + 1));
  StereoRender out;
  out.left = std::move(left.image);
  out.right = std::move(right.image);
  out.depth = std::move(left.depth);
  out.camera = cam;
  out.baseline = rig.pair(id).baseline;
  return out;
}

void LidarConfig::validate() const
{
  if (!(angular_step_deg > 0.0)) {
    throw std::invalid_argument("lidar angular_step_deg must be > 0");
  }
  if (!(hfov_deg > 0.0 && hfov_deg <= 180.0)) {
    throw std::invalid_argument("lidar hfov_deg must lie in (0, 180]");
  }
  if (!(max_range > 0.0)) {
    throw std::invalid_argument("lidar max_range must be > 0");
  }
}

std::size_t LidarConfig::beam_count() const
{
  return static_cast<std::size_t>(std::floor(hfov_deg / angular_step_deg + 1e-9)) + 1;
}

double LidarConfig::bearing(std::size_t i) const
{
  return deg2rad(-0.5 * hfov_deg + angular_step_deg * static_cast<double>(i));
}

LidarScan lidar_scan(const LidarConfig& cfg, const Pose3& sensor_pose, const SceneModel& scene)
{
  cfg.validate();
  LidarScan scan(cfg.beam_count());
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const double b = cfg.bearing(i);
    const Vec3 dir = sensor_pose.rotation * Vec3(std::cos(b), std::sin(b), 0.0);
    scan[i].bearing = b;
    const auto hit = cast_ray(scene, sensor_pose.translation, dir);
    if (hit && hit->t <= cfg.max_range) {
      scan[i].range = hit->t;
    }
  }
  return scan;
}

}  // namespace maeb
