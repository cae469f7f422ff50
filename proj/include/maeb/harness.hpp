#pragma once

#include "maeb/config.hpp"
#include "maeb/scenario.hpp"
#include "maeb/sensors.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace maeb {

inline constexpr const char* kToolName = "maeb-sim";
inline constexpr const char* kToolVersion = "0.1.0";

struct Landmark {
  std::string name;
  Vec3 center;      // rig frame
  Vec3 size;
  double forward = 0.0;  // rig-frame x of the front face, m
  double lateral = 0.0;  // rig-frame y of the face center
  double range = 0.0;    // rig origin to front-face center
  double bearing_deg = 0.0;
};

struct CalibrationScene {
  SceneModel scene;  // rig frame at the origin, ground at z = -camera height
  std::vector<Landmark> landmarks;
};

// Fixed layout of box landmarks at 5-25 m, staggered in bearing so that no
// landmark hides another from any camera of the rig.
CalibrationScene generate_calibration_scene(const HarnessConfig& cfg);
nlohmann::ordered_json landmarks_to_json(const std::vector<Landmark>& landmarks);

// Time at which the PTW front is `distance` m along its path from the crash
// point (clamped to the scenario start).
double evaluation_time(const ScenarioSpec& spec, double collision_t, double distance);

// Sensing scene at time t: textured ground plus the opponent as a box.
SceneModel case_scene(const ScenarioSpec& spec, double t, const EvalConfig& eval);

// World pose of the rig when the PTW is in state s.
Pose3 rig_world_pose(const RigConfig& rig, const VehicleState& s);
Pose3 lidar_world_pose(const LidarConfig& lidar, const VehicleState& s);

// End-to-end case. Artifacts go to out_dir when non-empty. The returned
// report is a pure function of the inputs.
nlohmann::ordered_json run_case(const ScenarioSpec& spec, const HarnessConfig& cfg, const std::string& out_dir);

// Deterministic pretty JSON with non-finite numbers as null.
std::string dump_report(const nlohmann::ordered_json& report);

struct SweepRow {
  std::string id;
  std::optional<double> impact_speed_baseline_kmh;
  std::optional<double> delta_v_kmh;
  std::optional<double> trigger_ttc_s;
  std::optional<double> stereo_heading_error_deg;
  std::string error;
};

// Trigger + impact stage (and perception unless disabled) for every *.json
// file in dir, rows sorted by id.
std::vector<SweepRow> sweep(const std::string& dir, const HarnessConfig& cfg, bool perception);
std::string sweep_csv(const std::vector<SweepRow>& rows, bool perception);

}  // namespace maeb
