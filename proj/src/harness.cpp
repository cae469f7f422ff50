#include "maeb/harness.hpp"

#include "maeb/heading.hpp"
#include "maeb/ics.hpp"
#include "maeb/image.hpp"
#include "maeb/kinematics.hpp"
#include "maeb/lidar_heading.hpp"
#include "maeb/maeb.hpp"
#include "maeb/parallel.hpp"
#include "maeb/scene_io.hpp"
#include "maeb/stereo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

namespace maeb {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

json num(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

json opt(const std::optional<double>& v)
{
  return v ? num(*v) : json(nullptr);
}

std::string artifact(const std::string& out_dir, const std::string& name)
{
  return (fs::path(out_dir) / name).string();
}

// Opponent footprint corners relative to a frame at `origin` with heading yaw.
GroundRoi footprint_roi(const VehicleState& opp, double length, double width, Vec3 origin, double yaw,
                        double margin)
{
  const Vec2 f = heading_vector(opp.yaw);
  const Vec2 l{-f.y, f.x};
  GroundRoi roi{1e300, -1e300, 1e300, -1e300};
  for (double a : {-0.5, 0.5}) {
    for (double b : {-0.5, 0.5}) {
      const Vec2 w = opp.position() + (a * length) * f + (b * width) * l;
      const double dx = w.x - origin.x();
      const double dy = w.y - origin.y();
      const double x = std::cos(yaw) * dx + std::sin(yaw) * dy;
      const double y = -std::sin(yaw) * dx + std::cos(yaw) * dy;
      roi.min_x = std::min(roi.min_x, x - margin);
      roi.max_x = std::max(roi.max_x, x + margin);
      roi.min_y = std::min(roi.min_y, y - margin);
      roi.max_y = std::max(roi.max_y, y + margin);
    }
  }
  return roi;
}

double frame_yaw(const Mat3& r)
{
  return std::atan2(r(1, 0), r(0, 0));
}

struct PerceptionFrame {
  json pairs = json::object();
  json stereo_heading;
  json lidar_heading;
  std::optional<double> stereo_error;
};

PerceptionFrame perceive(const ScenarioSpec& spec, const HarnessConfig& cfg, double t, const std::string& out_dir)
{
  PerceptionFrame out;
  const VehicleState ptw = state_at(spec.ptw, t);
  const VehicleState opp = state_at(spec.opponent, t);
  const SceneModel scene = case_scene(spec, t, cfg.eval);
  const Pose3 rig_world = rig_world_pose(cfg.rig, ptw);
  const double truth_deg = wrap_degrees(rad2deg(opp.yaw - ptw.yaw));
  const double rig_yaw = frame_yaw(rig_world.rotation);
  const double roll = rpy_from_rotation(cfg.rig.mount.rotation).x();

  for (PairId id : cfg.eval.pairs) {
    const StereoRender sr = render_stereo_pair(cfg.rig, id, rig_world, scene, cfg.eval.blur_px);
    const DisparityMap disp = compute_disparity_sgm(sr.left, sr.right, cfg.matching);
    const DepthMetrics dm = depth_metrics(disp, sr.depth, sr.camera, sr.baseline, cfg.eval.max_depth);
    out.pairs[to_string(id)] = {{"focal_px", sr.camera.focal},
                                {"baseline_m", sr.baseline},
                                {"valid_fraction", num(dm.valid_fraction)},
                                {"accurate_fraction", num(dm.accurate_fraction)},
                                {"image_valid_fraction", num(disp.valid_fraction())},
                                {"compared_pixels", dm.compared},
                                {"depth_rmse_m", dm.compared ? num(dm.depth_rmse) : json(nullptr)},
                                {"median_rel_error", dm.compared ? num(dm.median_rel_error) : json(nullptr)}};
    const PointCloud cloud = disparity_to_pointcloud(disp, sr.camera, sr.baseline);
    if (!out_dir.empty()) {
      const std::string p = to_string(id);
      write_pgm(artifact(out_dir, p + "_left.pgm"), sr.left);
      write_pgm(artifact(out_dir, p + "_right.pgm"), sr.right);
      write_disparity_pgm16(artifact(out_dir, p + "_disparity.pgm"), disp);
      write_depth(artifact(out_dir, p + "_depth.bin"), sr.depth);
      write_ply(artifact(out_dir, p + "_cloud.ply"), cloud);
    }
    if (id != cfg.eval.heading_pair) {
      continue;
    }
    const GroundRoi roi = footprint_roi(opp, spec.opponent.length, spec.opponent.width, rig_world.translation,
                                        rig_yaw, cfg.eval.roi_margin);
    const Vec2 start{spec.opponent.trajectory.front().x, spec.opponent.trajectory.front().y};
    const Vec2 approach_w = spec.crash_point - start;
    const Vec2 approach{std::cos(rig_yaw) * approach_w.x + std::sin(rig_yaw) * approach_w.y,
                        -std::sin(rig_yaw) * approach_w.x + std::cos(rig_yaw) * approach_w.y};
    HeadingParams hp = cfg.eval.heading;
    hp.camera_height = cfg.rig.mount.translation.z();
    try {
      const HeadingEstimate est = estimate_heading(cloud, roi, roll, hp,
                                                   approach.norm() > 0.0 ? std::optional<Vec2>(approach) : std::nullopt);
      const double err = std::fabs(wrap_degrees(est.heading_deg - truth_deg));
      out.stereo_error = err;
      out.stereo_heading = {{"pair", to_string(id)},
                            {"heading_deg", num(est.heading_deg)},
                            {"error_deg", num(err)},
                            {"inlier_count", est.inlier_count},
                            {"rms_plane_residual_m", num(est.rms_plane_residual)},
                            {"extent_x_m", num(est.extent_x)},
                            {"extent_y_m", num(est.extent_y)},
                            {"cloud_points", cloud.points.size()}};
    } catch (const InsufficientInliers& e) {
      out.stereo_heading = {{"pair", to_string(id)}, {"error", e.what()}, {"cloud_points", cloud.points.size()}};
    }
  }

  const Pose3 lidar_world = lidar_world_pose(cfg.lidar, ptw);
  const LidarScan scan = lidar_scan(cfg.lidar, lidar_world, scene);
  const GroundRoi lroi = footprint_roi(opp, spec.opponent.length, spec.opponent.width, lidar_world.translation,
                                       frame_yaw(lidar_world.rotation), cfg.eval.roi_margin);
  try {
    const LidarTrackFrame f = lidar_heading(scan, lroi);
    out.lidar_heading = {{"heading_deg", num(f.heading_deg)},
                         {"axial_error_deg", num(axial_difference_deg(f.heading_deg, truth_deg))},
                         {"position_m", {num(f.position.x), num(f.position.y)}},
                         {"point_count", f.point_count}};
  } catch (const NoClusterInRoi& e) {
    out.lidar_heading = {{"error", e.what()}};
  }
  return out;
}

}  // namespace

CalibrationScene generate_calibration_scene(const HarnessConfig& cfg)
{
  static constexpr double kBearings[9] = {-22.0, 22.0, -14.0, 14.0, -8.0, 8.0, -3.0, 3.0, 0.0};
  const double cam_h = cfg.rig.mount.translation.z();
  const Vec3 size(0.4, 0.5, 1.2);
  CalibrationScene out;
  out.scene.ground.pose = Pose3::planar(0.0, 0.0, -cam_h, 0.0);
  out.scene.ground.seed = cfg.eval.texture_seed;
  for (int k = 0; k < 9; ++k) {
    const double forward = 5.0 + 2.5 * k;
    const double lateral = forward * std::tan(deg2rad(kBearings[k]));
    Landmark lm;
    lm.name = "L" + std::to_string(k + 1);
    lm.size = size;
    lm.center = Vec3(forward + 0.5 * size.x(), lateral, -cam_h + 0.5 * size.z());
    lm.forward = forward;
    lm.lateral = lateral;
    lm.range = std::sqrt(forward * forward + lateral * lateral + lm.center.z() * lm.center.z());
    lm.bearing_deg = kBearings[k];
    TexturedBox box;
    box.pose = Pose3::planar(lm.center.x(), lm.center.y(), lm.center.z(), 0.0);
    box.size = size;
    box.seed = cfg.eval.texture_seed + 100 + static_cast<std::uint64_t>(k);
    out.scene.boxes.push_back(box);
    out.landmarks.push_back(lm);
  }
  return out;
}

nlohmann::ordered_json landmarks_to_json(const std::vector<Landmark>& landmarks)
{
  json arr = json::array();
  for (const auto& lm : landmarks) {
    arr.push_back({{"name", lm.name},
                   {"center", {lm.center.x(), lm.center.y(), lm.center.z()}},
                   {"size", {lm.size.x(), lm.size.y(), lm.size.z()}},
                   {"forward_m", lm.forward},
                   {"lateral_m", lm.lateral},
                   {"range_m", lm.range},
                   {"bearing_deg", lm.bearing_deg}});
  }
  return arr;
}

double evaluation_time(const ScenarioSpec& spec, double collision_t, double distance)
{
  double lo = scenario_start_time(spec);
  double hi = collision_t;
  if (distance_to_crash(spec, lo, collision_t) <= distance) {
    return lo;
  }
  for (int i = 0; i < 60 && hi - lo > 1e-6; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (distance_to_crash(spec, mid, collision_t) > distance) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SceneModel case_scene(const ScenarioSpec& spec, double t, const EvalConfig& eval)
{
  SceneModel scene;
  scene.ground.seed = eval.texture_seed;
  const VehicleState opp = state_at(spec.opponent, t);
  TexturedBox box;
  box.pose = Pose3::planar(opp.x, opp.y, 0.5 * eval.opponent_height, opp.yaw);
  box.size = Vec3(spec.opponent.length, spec.opponent.width, eval.opponent_height);
  box.seed = eval.texture_seed + 1;
  scene.boxes.push_back(box);
  return scene;
}

Pose3 rig_world_pose(const RigConfig& rig, const VehicleState& s)
{
  return Pose3::planar(s.x, s.y, 0.0, s.yaw).compose(rig.mount);
}

Pose3 lidar_world_pose(const LidarConfig& lidar, const VehicleState& s)
{
  return Pose3::planar(s.x, s.y, 0.0, s.yaw).compose(Pose3::planar(lidar.mount_forward, 0.0, lidar.mount_height, 0.0));
}

nlohmann::ordered_json run_case(const ScenarioSpec& spec, const HarnessConfig& cfg, const std::string& out_dir)
{
  cfg.validate();
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
  }
  json report;
  report["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  report["scenario"] = {{"id", spec.id},
                        {"impact_time", num(spec.impact_time)},
                        {"crash_point", {num(spec.crash_point.x), num(spec.crash_point.y)}},
                        {"ptw", spec.ptw.name},
                        {"opponent", spec.opponent.name}};

  std::optional<ImpactReport> impact;
  try {
    impact = impact_outcome(spec, cfg.maneuvers, cfg.maeb);
  } catch (const NoBaselineCollision& e) {
    report["trigger"] = {{"status", "no trigger"}, {"reason", e.what()}};
    report["impact"] = {{"baseline_collision", false}, {"delta_v_kmh", 0.0}};
    report["perception"] = {{"skipped", e.what()}};
    report["config"] = config_to_json(cfg);
    if (!out_dir.empty()) {
      write_file_atomic(artifact(out_dir, "report.json"), dump_report(report));
    }
    return report;
  }

  if (impact->triggered) {
    report["trigger"] = {{"status", "triggered"},
                         {"t", opt(impact->trigger_t)},
                         {"distance_m", opt(impact->trigger_distance)},
                         {"ttc_s", opt(impact->trigger_ttc)},
                         {"monotone", impact->trigger_monotone}};
  } else {
    report["trigger"] = {{"status", "no trigger"}};
  }
  json passive = nullptr;
  if (impact->passive_rider) {
    const auto& pr = *impact->passive_rider;
    passive = {{"impact_speed_coast_kmh", num(mps_to_kmh(pr.impact_speed_coast))},
               {"impact_speed_maeb_kmh", num(mps_to_kmh(pr.impact_speed_maeb))},
               {"delta_v_kmh", num(pr.delta_v)},
               {"collision_avoided", pr.collision_avoided}};
  }
  report["impact"] = {{"baseline_collision", true},
                      {"baseline_collision_time", num(impact->baseline_collision_time)},
                      {"impact_speed_baseline_kmh", num(mps_to_kmh(impact->impact_speed_baseline))},
                      {"impact_speed_maeb_kmh", num(mps_to_kmh(impact->impact_speed_maeb))},
                      {"delta_v_kmh", num(impact->delta_v)},
                      {"maeb_collision_time", opt(impact->maeb_collision_time)},
                      {"collision_avoided", impact->collision_avoided},
                      {"passive_rider", passive}};

  const double t_eval = evaluation_time(spec, impact->baseline_collision_time, cfg.eval.distance);
  const VehicleState ptw = state_at(spec.ptw, t_eval);
  const VehicleState opp = state_at(spec.opponent, t_eval);
  json perception;
  perception["t"] = num(t_eval);
  perception["distance_to_crash_m"] = num(distance_to_crash(spec, t_eval, impact->baseline_collision_time));
  perception["ptw_pose"] = {num(ptw.x), num(ptw.y), num(ptw.yaw)};
  perception["ground_truth_heading_deg"] = num(wrap_degrees(rad2deg(opp.yaw - ptw.yaw)));

  if (!out_dir.empty()) {
    write_file_atomic(artifact(out_dir, "scene.json"), serialize_scene(case_scene(spec, t_eval, cfg.eval)));
  }
  PerceptionFrame main = perceive(spec, cfg, t_eval, out_dir);
  perception["pairs"] = main.pairs;
  perception["stereo_heading"] = main.stereo_heading;
  perception["lidar_heading"] = main.lidar_heading;
  if (cfg.eval.frames > 1) {
    json frames = json::array();
    for (int k = 0; k < cfg.eval.frames; ++k) {
      const double t = std::max(scenario_start_time(spec), t_eval - cfg.eval.frame_interval * k);
      PerceptionFrame f = k == 0 ? main : perceive(spec, cfg, t, "");
      frames.push_back({{"t", num(t)},
                        {"distance_to_crash_m", num(distance_to_crash(spec, t, impact->baseline_collision_time))},
                        {"pairs", f.pairs},
                        {"stereo_heading", f.stereo_heading},
                        {"lidar_heading", f.lidar_heading}});
    }
    perception["frames"] = frames;
  }
  report["perception"] = perception;
  report["config"] = config_to_json(cfg);
  if (!out_dir.empty()) {
    write_file_atomic(artifact(out_dir, "report.json"), dump_report(report));
  }
  return report;
}

std::string dump_report(const nlohmann::ordered_json& report)
{
  return report.dump(2) + "\n";
}

std::vector<SweepRow> sweep(const std::string& dir, const HarnessConfig& cfg, bool perception)
{
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw std::invalid_argument("no scenario files in '" + dir + "'");
  }
  std::vector<SweepRow> rows(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.id = fs::path(files[i]).stem().string();
    try {
      const ScenarioSpec spec = load_scenario(files[i]);
      row.id = spec.id;
      const ImpactReport rep = impact_outcome(spec, cfg.maneuvers, cfg.maeb);
      row.impact_speed_baseline_kmh = mps_to_kmh(rep.impact_speed_baseline);
      row.delta_v_kmh = rep.delta_v;
      row.trigger_ttc_s = rep.trigger_ttc;
      if (perception) {
        const double t_eval = evaluation_time(spec, rep.baseline_collision_time, cfg.eval.distance);
        HarnessConfig pc = cfg;
        pc.eval.pairs = {cfg.eval.heading_pair};
        const PerceptionFrame f = perceive(spec, pc, t_eval, "");
        row.stereo_heading_error_deg = f.stereo_error;
        if (!f.stereo_error) {
          row.error = f.stereo_heading.value("error", std::string("stereo heading unavailable"));
        }
      }
    } catch (const ScenarioError& e) {
      row.error = e.issues().empty() ? e.what() : e.issues().front().field + ": " + e.issues().front().message;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.id < b.id; });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool perception)
{
  auto cell = [](const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) {
      return std::string();
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return std::string(buf);
  };
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
      return s;
    }
    std::string q = "\"";
    for (char c : s) {
      q += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return q + "\"";
  };
  std::string out = "id,impact_speed_baseline_kmh,delta_v_kmh,trigger_ttc_s";
  if (perception) {
    out += ",stereo_heading_error_deg";
  }
  out += ",error\n";
  for (const auto& r : rows) {
    out += quote(r.id) + "," + cell(r.impact_speed_baseline_kmh) + "," + cell(r.delta_v_kmh) + "," +
           cell(r.trigger_ttc_s);
    if (perception) {
      out += "," + cell(r.stereo_heading_error_deg);
    }
    out += "," + quote(r.error) + "\n";
  }
  return out;
}

}  // namespace maeb
