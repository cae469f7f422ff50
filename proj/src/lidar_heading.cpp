#include "maeb/lidar_heading.hpp"

#include <cmath>

namespace maeb {

std::vector<Vec2> scan_points(const LidarScan& scan)
{
  std::vector<Vec2> out;
  for (const auto& r : scan) {
    if (r.range) {
      out.push_back({*r.range * std::cos(r.bearing), *r.range * std::sin(r.bearing)});
    }
  }
  return out;
}

LidarTrackFrame lidar_heading(const LidarScan& scan, const GroundRoi& roi, double gap_threshold)
{
  std::vector<std::vector<Vec2>> clusters;
  std::vector<Vec2> current;
  auto close_cluster = [&] {
    if (!current.empty()) {
      clusters.push_back(std::move(current));
      current.clear();
    }
  };
  for (const auto& r : scan) {
    if (!r.range) {
      close_cluster();
      continue;
    }
    const Vec2 p{*r.range * std::cos(r.bearing), *r.range * std::sin(r.bearing)};
    if (!roi.contains(p)) {
      close_cluster();
      continue;
    }
    if (!current.empty() && (p - current.back()).norm() > gap_threshold) {
      close_cluster();
    }
    current.push_back(p);
  }
  close_cluster();

  const std::vector<Vec2>* best = nullptr;
  for (const auto& c : clusters) {
    if (c.size() >= 2 && (best == nullptr || c.size() > best->size())) {
      best = &c;
    }
  }
  if (best == nullptr) {
    throw NoClusterInRoi();
  }
  const LineFit fit = fit_line_tls(*best);
  Vec2 dir = fit.direction;
  if (dir.dot(best->back() - best->front()) < 0.0) {
    dir = -1.0 * dir;
  }
  LidarTrackFrame f;
  f.position = fit.centroid;
  f.heading_deg = wrap_degrees(rad2deg(std::atan2(dir.y, dir.x)));
  f.point_count = best->size();
  return f;
}

}  // namespace maeb
