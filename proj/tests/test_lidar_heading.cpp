#include "maeb/lidar_heading.hpp"

#include "scenes.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace maeb;

namespace {

const Pose3 kSensor = Pose3::planar(0.0, 0.0, 0.6, 0.0);

SceneModel boxes_scene(std::vector<TexturedBox> boxes)
{
  SceneModel s;
  s.ground.enabled = false;
  s.boxes = std::move(boxes);
  return s;
}

TexturedBox wall(double x, double y, double yaw_deg, double length)
{
  TexturedBox b;
  b.pose = Pose3::planar(x, y, 0.5, deg2rad(yaw_deg));
  b.size = Vec3(length, 0.2, 2.0);
  return b;
}

const GroundRoi kWide{0.5, 40.0, -30.0, 30.0};

}  // namespace

TEST(LidarHeading, wall_flank_90)
{
  const LidarConfig cfg;
  const LidarScan scan = lidar_scan(cfg, kSensor, boxes_scene({wall(10.0, 0.0, 90.0, 20.0)}));
  const LidarTrackFrame f = lidar_heading(scan, kWide);
  EXPECT_NEAR(f.heading_deg, 90.0, 2.0);
  EXPECT_NEAR(f.position.x, 9.9, 1e-6);
  EXPECT_GT(f.point_count, 100u);
  EXPECT_TRUE(std::isfinite(f.position.y));
}

TEST(LidarHeading, single_face_matches_direction)
{
  const LidarConfig cfg;
  for (double yaw : {60.0, 75.0, 105.0, 120.0}) {
    const LidarScan scan = lidar_scan(cfg, kSensor, boxes_scene({wall(12.0, 1.0, yaw, 14.0)}));
    const LidarTrackFrame f = lidar_heading(scan, kWide);
    EXPECT_LE(axial_difference_deg(f.heading_deg, yaw), 2.0) << yaw;
  }
}

TEST(LidarHeading, empty_roi)
{
  const LidarConfig cfg;
  const LidarScan scan = lidar_scan(cfg, kSensor, boxes_scene({wall(10.0, 0.0, 90.0, 20.0)}));
  const GroundRoi behind{-20.0, -1.0, -5.0, 5.0};
  EXPECT_THROW(lidar_heading(scan, behind), NoClusterInRoi);
  try {
    lidar_heading(scan, behind);
  } catch (const NoClusterInRoi& e) {
    EXPECT_STREQ(e.what(), "no cluster in roi");
  }
  const LidarScan nothing = lidar_scan(cfg, kSensor, boxes_scene({}));
  EXPECT_TRUE(scan_points(nothing).empty());
  EXPECT_THROW(lidar_heading(nothing, kWide), NoClusterInRoi);
}

TEST(LidarHeading, l_shape_between_faces)
{
  const auto orbit = scenes::lidar_orbit(2.0, 88.0, 1.0);
  double max_step = 0.0;
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    EXPECT_GE(orbit[i].world_deg, 90.0 - 1e-6) << orbit[i].orbit_deg;
    EXPECT_LE(orbit[i].world_deg, 180.0 + 1e-6) << orbit[i].orbit_deg;
    if (i > 0) {
      max_step = std::max(max_step, std::fabs(orbit[i].world_deg - orbit[i - 1].world_deg));
    }
  }
  RecordProperty("max_step_per_degree", std::to_string(max_step));
}

TEST(LidarHeading, largest_cluster_wins)
{
  const LidarConfig cfg;
  // A short wall on the left, a long one on the right with a gap between.
  const LidarScan scan =
      lidar_scan(cfg, kSensor, boxes_scene({wall(10.0, 4.0, 90.0, 2.0), wall(10.0, -4.0, 90.0, 8.0)}));
  const LidarTrackFrame f = lidar_heading(scan, kWide);
  EXPECT_LT(f.position.y, -2.0);
  EXPECT_NEAR(axial_difference_deg(f.heading_deg, 90.0), 0.0, 2.0);
}

TEST(LidarHeading, gap_splits_clusters)
{
  const LidarConfig cfg;
  // Two walls adjacent in bearing with a 0.8 m depth step between them.
  const LidarScan scan =
      lidar_scan(cfg, kSensor, boxes_scene({wall(10.0, 1.5, 90.0, 3.0), wall(10.8, -1.5, 90.0, 3.0)}));
  const LidarTrackFrame split = lidar_heading(scan, kWide);
  const LidarTrackFrame merged = lidar_heading(scan, kWide, 1.0);
  EXPECT_GT(merged.point_count, split.point_count);
  EXPECT_GT(merged.position.x, 9.9);
  EXPECT_LT(merged.position.x, 10.7);
}

TEST(LidarHeading, scan_points_in_sensor_frame)
{
  const LidarConfig cfg;
  const LidarScan scan = lidar_scan(cfg, kSensor, boxes_scene({wall(10.0, 0.0, 90.0, 20.0)}));
  std::size_t returns = 0;
  for (const auto& r : scan) {
    returns += r.range ? 1 : 0;
  }
  const auto pts = scan_points(scan);
  ASSERT_EQ(pts.size(), returns);
  for (const Vec2& p : pts) {
    EXPECT_NEAR(p.x, 9.9, 1e-9);
  }
}
