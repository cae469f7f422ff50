#pragma once

#include "maeb/geometry.hpp"
#include "maeb/stereo.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace maeb {

// Axis-aligned rectangle in the levelled rig ground frame (x forward, y left).
struct GroundRoi {
  double min_x = 0.0;
  double max_x = 0.0;
  double min_y = 0.0;
  double max_y = 0.0;

  bool contains(Vec2 p) const { return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y; }
};

struct HeadingParams {
  double camera_height = 0.8;     // rig origin above ground, m
  double ground_threshold = 0.3;  // points lower than this are ground
  double inlier_threshold = 0.05;
  int iterations = 500;
  std::uint64_t seed = 0x4ead1259;
  std::size_t min_inliers = 50;

  void validate() const;
};

struct HeadingEstimate {
  double heading_deg = 0.0;  // (-180, 180]
  Vec2 direction;            // unit, levelled rig ground frame
  std::size_t inlier_count = 0;
  double rms_plane_residual = 0.0;  // m
  // Axis-aligned extent of the inliers along rig x and y.
  double extent_x = 0.0;
  double extent_y = 0.0;
};

class InsufficientInliers : public std::runtime_error {
public:
  InsufficientInliers() : std::runtime_error("insufficient inliers") {}
};

struct LineFit {
  Vec2 centroid;
  Vec2 direction;  // unit
  double rms = 0.0;
};

// Total-least-squares line through the points (at least two distinct).
LineFit fit_line_tls(const std::vector<Vec2>& points);

// Fits the dominant vertical plane of the cloud after undoing the mount roll
// and removing ground points, and returns its ground-plane direction. The
// 180 deg ambiguity is resolved toward `approach` when given; otherwise the
// direction is folded into (-90, 90].
HeadingEstimate estimate_heading(const PointCloud& cloud, const GroundRoi& roi, double roll,
                                 const HeadingParams& p = {}, std::optional<Vec2> approach = std::nullopt);

}  // namespace maeb
