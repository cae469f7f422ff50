#pragma once

#include "maeb/geometry.hpp"
#include "maeb/heading.hpp"
#include "maeb/sensors.hpp"

#include <stdexcept>
#include <vector>

namespace maeb {

struct LidarTrackFrame {
  Vec2 position;             // cluster centroid, sensor frame
  double heading_deg = 0.0;  // (-180, 180], line direction in scan order
  std::size_t point_count = 0;
};

class NoClusterInRoi : public std::runtime_error {
public:
  NoClusterInRoi() : std::runtime_error("no cluster in roi") {}
};

inline constexpr double kClusterGap = 0.5;

// Sensor-frame points of every return, in scan order.
std::vector<Vec2> scan_points(const LidarScan& scan);

// Clusters consecutive returns inside the roi (a jump above gap_threshold or
// a missing return starts a new cluster), keeps the largest cluster and fits
// one line to it.
LidarTrackFrame lidar_heading(const LidarScan& scan, const GroundRoi& roi, double gap_threshold = kClusterGap);

}  // namespace maeb
