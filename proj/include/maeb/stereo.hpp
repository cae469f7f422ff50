#pragma once

#include "maeb/geometry.hpp"
#include "maeb/image.hpp"
#include "maeb/sensors.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace maeb {

struct DisparityMap {
  static constexpr float kInvalid = -1.0f;

  int width = 0;
  int height = 0;
  std::vector<float> values;

  DisparityMap() = default;
  DisparityMap(int w, int h)
    : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), kInvalid)
  {
  }

  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  bool valid(int x, int y) const { return at(x, y) >= 0.0f; }
  std::size_t valid_count() const;
  double valid_fraction() const;

  friend bool operator==(const DisparityMap&, const DisparityMap&) = default;
};

struct MatchingParams {
  int d_max = 128;
  int census_window = 7;
  int census_threshold = 2;  // gray levels; smaller differences read as equal
  int block_window = 9;
  int p1 = 8;
  int p2 = 96;
  int paths = 8;
  double lr_threshold = 1.0;
  double uniqueness = 0.9;

  void validate() const;
};

// Census signature per pixel: one bit per window neighbour, set where the
// neighbour is darker than the center by more than `threshold`. Pixels closer than `radius` to the
// border have no signature. A window whose intensity range is at most
// 2 * threshold is marked textureless.
struct CensusImage {
  int width = 0;
  int height = 0;
  int radius = 0;
  std::vector<std::uint64_t> bits;
  std::vector<std::uint8_t> textured;

  bool valid(int x, int y) const
  {
    return x >= radius && y >= radius && x < width - radius && y < height - radius;
  }
  std::uint64_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
};

CensusImage census_transform(const Image& img, int window, int threshold = 0);

// Exhaustive winner-take-all over block-summed census Hamming cost.
// Integer disparities, left-right checked like the semi-global matcher.
DisparityMap compute_disparity_bm(const Image& left, const Image& right, const MatchingParams& p);

// Semi-global matching on the census cost with parabola sub-pixel refinement
// and a left-right consistency check.
DisparityMap compute_disparity_sgm(const Image& left, const Image& right, const MatchingParams& p);

struct CloudPoint {
  Vec3 position;  // rig frame (x forward, y left, z up)
  int u = 0;
  int v = 0;
  float disparity = 0.0f;
};

struct PointCloud {
  std::vector<CloudPoint> points;
};

inline constexpr double kMinDisparity = 0.5;

// Left-camera disparity to rig-frame points. The left camera sits at
// +baseline / 2 on the rig y axis.
PointCloud disparity_to_pointcloud(const DisparityMap& d, const CameraModel& cam, double baseline,
                                   double d_min = kMinDisparity);

// 16-bit PGM with 1/16 px fixed point; 0 encodes INVALID.
std::vector<std::uint16_t> encode_disparity_fixed(const DisparityMap& d);
DisparityMap decode_disparity_fixed(int width, int height, const std::vector<std::uint16_t>& v);
void write_disparity_pgm16(const std::string& path, const DisparityMap& d);
DisparityMap read_disparity_pgm16(const std::string& path);

std::string encode_ply(const PointCloud& cloud);
void write_ply(const std::string& path, const PointCloud& cloud);

inline constexpr double kAccurateRelError = 0.05;

struct DepthMetrics {
  double valid_fraction = 0.0;      // valid disparities among ground-truth surface pixels
  // valid and within kAccurateRelError of the true depth, same denominator
  double accurate_fraction = 0.0;
  std::size_t compared = 0;
  double depth_rmse = 0.0;          // m
  double median_rel_error = 0.0;
  double p95_rel_error = 0.0;
};

// Compares disparity-derived depth with ground truth on pixels whose true
// depth lies in (0, max_depth].
DepthMetrics depth_metrics(const DisparityMap& d, const DepthMap& truth, const CameraModel& cam, double baseline,
                           double max_depth);

}  // namespace maeb
