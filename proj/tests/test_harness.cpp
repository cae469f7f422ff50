#include "maeb/config.hpp"
#include "maeb/harness.hpp"
#include "maeb/image.hpp"
#include "maeb/stereo.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace maeb;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path scratch_dir(const std::string& name)
{
  const fs::path p = fs::temp_directory_path() / ("maeb_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const json& id86_report()
{
  static const json r = run_case(test_util::id86(), HarnessConfig{}, "");
  return r;
}

void expect_numbers_finite(const json& j, const std::string& path)
{
  if (j.is_number()) {
    EXPECT_TRUE(std::isfinite(j.get<double>())) << path;
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      expect_numbers_finite(v, path + "." + k);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      expect_numbers_finite(j[i], path + "[" + std::to_string(i) + "]");
    }
  }
}

std::vector<std::string> lines(const std::string& s)
{
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) {
    out.push_back(l);
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& l)
{
  std::vector<std::string> out(1);
  bool quoted = false;
  for (char c : l) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

class ThreadsEnv {
public:
  explicit ThreadsEnv(const char* n) { setenv("MAEB_SIM_THREADS", n, 1); }
  ~ThreadsEnv() { unsetenv("MAEB_SIM_THREADS"); }
};

int run_cli(const std::string& args)
{
  const std::string cmd = std::string(MAEB_SIM_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, defaults_and_bundled_file)
{
  const HarnessConfig empty = parse_config("{}");
  const HarnessConfig bundled = load_config(test_util::data_path("config/default.json"));
  EXPECT_EQ(config_to_json(empty), config_to_json(HarnessConfig{}));
  EXPECT_EQ(config_to_json(bundled), config_to_json(HarnessConfig{}));
}

TEST(Config, echo_reflects_input)
{
  const HarnessConfig cfg = parse_config(R"({
    "maeb": {"auto_decel_target": 4.0, "rider_override": "ignore_rider"},
    "rig": {"focal_scaling": "native", "mount": {"rpy": [0.1, 0.0, 0.0]}},
    "eval": {"blur_px": 7, "pairs": ["inner"], "heading": {"iterations": 200}}
  })");
  const json j = config_to_json(cfg);
  EXPECT_EQ(j["maeb"]["auto_decel_target"], 4.0);
  EXPECT_EQ(j["maeb"]["rider_override"], "ignore_rider");
  EXPECT_EQ(j["rig"]["focal_scaling"], "native");
  EXPECT_NEAR(j["rig"]["mount"]["rpy"][0].get<double>(), 0.1, 1e-12);
  EXPECT_EQ(j["rig"]["mount"]["position"][2], 0.8);
  EXPECT_EQ(j["rig"]["pairs"][2]["focal"], 950.0);
  EXPECT_EQ(j["eval"]["blur_px"], 7);
  EXPECT_EQ(j["eval"]["pairs"], json::array({"inner"}));
  EXPECT_EQ(j["eval"]["heading"]["iterations"], 200);
  EXPECT_EQ(j["matching"]["p2"], 96);
}

TEST(Config, errors_name_the_field)
{
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"maeb": {"decel": 3}})").find("maeb.decel"), std::string::npos);
  EXPECT_NE(message(R"({"bogus": 1})").find("bogus"), std::string::npos);
  EXPECT_NE(message(R"({"maeb": {"ramp_time": "fast"}})").find("maeb.ramp_time"), std::string::npos);
  EXPECT_NE(message(R"({"rig": {"width": 64.5}})").find("rig.width"), std::string::npos);
  EXPECT_NE(message("{\"maeb\": ").find("syntax"), std::string::npos);
  EXPECT_NE(message(R"({"maeb": {"auto_decel_target": 12}})"), "no error");
  EXPECT_NE(message(R"({"eval": {"blur_px": -1}})"), "no error");
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, seed_override)
{
  HarnessConfig a;
  HarnessConfig b;
  apply_seed(a, 1);
  apply_seed(b, 2);
  EXPECT_NE(a.rig.noise_seed, b.rig.noise_seed);
  EXPECT_NE(a.eval.texture_seed, b.eval.texture_seed);
  EXPECT_NE(a.eval.heading.seed, b.eval.heading.seed);
  const HarnessConfig c = parse_config(R"({"seed": 1})");
  EXPECT_EQ(config_to_json(c), config_to_json(a));
}

TEST(Report, id86_anchors)
{
  const json& r = id86_report();
  EXPECT_EQ(r["scenario"]["id"], "ID86");
  ASSERT_EQ(r["trigger"]["status"], "triggered");
  EXPECT_NEAR(r["trigger"]["distance_m"].get<double>(), 7.2, 1.5);
  const double passive = r["impact"]["passive_rider"]["delta_v_kmh"].get<double>();
  EXPECT_GE(passive, 3.0);
  EXPECT_LE(passive, 6.0);
  EXPECT_GE(r["impact"]["delta_v_kmh"].get<double>(), 0.0);
  const json& p = r["perception"];
  EXPECT_NEAR(p["distance_to_crash_m"].get<double>(), 8.0, 1e-3);
  ASSERT_TRUE(p["stereo_heading"].contains("error_deg")) << p["stereo_heading"].dump();
  EXPECT_LE(p["stereo_heading"]["error_deg"].get<double>(), 5.0);
  EXPECT_TRUE(p["lidar_heading"].contains("heading_deg"));
  for (const char* pair : {"outer", "middle", "inner"}) {
    ASSERT_TRUE(p["pairs"].contains(pair)) << pair;
    const double f = p["pairs"][pair]["valid_fraction"].get<double>();
    EXPECT_GT(f, 0.5) << pair;
    EXPECT_LE(f, 1.0) << pair;
    EXPECT_LE(p["pairs"][pair]["accurate_fraction"].get<double>(), f) << pair;
  }
}

TEST(Report, well_formed)
{
  const json& r = id86_report();
  expect_numbers_finite(r, "report");
  EXPECT_EQ(r["tool"]["name"], kToolName);
  EXPECT_EQ(r["tool"]["version"], kToolVersion);
  EXPECT_EQ(r["config"], config_to_json(HarnessConfig{}));
  const json back = json::parse(dump_report(r));
  EXPECT_EQ(dump_report(back), dump_report(r));
}

TEST(Report, no_collision_no_trigger)
{
  const ScenarioSpec spec = load_scenario(test_util::data_path("scenarios/synthetic/syn_parallel_lanes.json"));
  const json r = run_case(spec, HarnessConfig{}, "");
  EXPECT_EQ(r["trigger"]["status"], "no trigger");
  EXPECT_EQ(r["impact"]["delta_v_kmh"].get<double>(), 0.0);
  EXPECT_FALSE(r["impact"]["baseline_collision"].get<bool>());
}

TEST(Report, approach_frames)
{
  HarnessConfig cfg;
  cfg.eval.pairs = {PairId::inner};
  cfg.eval.frames = 3;
  const json r = run_case(test_util::id86(), cfg, "");
  const json& frames = r["perception"]["frames"];
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_LT(frames[1]["t"].get<double>(), frames[0]["t"].get<double>());
  EXPECT_GT(frames[2]["distance_to_crash_m"].get<double>(), frames[1]["distance_to_crash_m"].get<double>());
}

TEST(Determinism, run_case_byte_identical)
{
  const ScenarioSpec spec = test_util::id86();
  const fs::path a = scratch_dir("det_a");
  const fs::path b = scratch_dir("det_b");
  std::string ra;
  std::string rb;
  {
    ThreadsEnv one("1");
    ra = dump_report(run_case(spec, HarnessConfig{}, a.string()));
  }
  {
    ThreadsEnv four("4");
    rb = dump_report(run_case(spec, HarnessConfig{}, b.string()));
  }
  EXPECT_EQ(ra, rb);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = b / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(read_file(e.path().string()), read_file(other.string())) << e.path().filename();
    ++files;
  }
  EXPECT_GE(files, 17u);  // report, scene, five per pair
  EXPECT_EQ(read_file((a / "report.json").string()), ra);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Sweep, synthetic_set)
{
  const HarnessConfig cfg;
  const std::string dir = test_util::data_path("scenarios/synthetic");
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    n += e.path().extension() == ".json" ? 1 : 0;
  }
  const auto rows = sweep(dir, cfg, false);
  ASSERT_EQ(rows.size(), n);
  const auto csv = lines(sweep_csv(rows, false));
  ASSERT_EQ(csv.size(), n + 1);
  EXPECT_EQ(csv[0], "id,impact_speed_baseline_kmh,delta_v_kmh,trigger_ttc_s,error");
  double peak = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) {
      EXPECT_LT(rows[i - 1].id, rows[i].id);
    }
    if (rows[i].delta_v_kmh) {
      EXPECT_GE(*rows[i].delta_v_kmh, 0.0) << rows[i].id;
      peak = std::max(peak, *rows[i].delta_v_kmh);
    }
    const auto cells = split_csv(csv[i + 1]);
    ASSERT_EQ(cells.size(), 5u) << csv[i + 1];
    EXPECT_EQ(cells[0], rows[i].id);
  }
  EXPECT_NEAR(peak, 10.0, 1.0);
  EXPECT_LE(peak, 10.5);
}

TEST(Sweep, failures_stay_per_case)
{
  const fs::path dir = scratch_dir("sweep");
  fs::copy_file(test_util::data_path("scenarios/id86.json"), dir / "a.json");
  std::ofstream(dir / "b.json") << "{\"schema_version\": 1";
  const auto rows = sweep(dir.string(), HarnessConfig{}, true);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].id, "ID86");
  EXPECT_TRUE(rows[0].error.empty()) << rows[0].error;
  ASSERT_TRUE(rows[0].stereo_heading_error_deg);
  EXPECT_LE(*rows[0].stereo_heading_error_deg, 5.0);
  EXPECT_EQ(rows[1].id, "b");
  EXPECT_FALSE(rows[1].error.empty());
  EXPECT_FALSE(rows[1].delta_v_kmh);
  const auto csv = lines(sweep_csv(rows, true));
  ASSERT_EQ(csv.size(), 3u);
  EXPECT_EQ(split_csv(csv[0]).size(), 6u);
  fs::remove_all(dir);
  EXPECT_THROW(sweep(scratch_dir("empty").string(), HarnessConfig{}, false), std::invalid_argument);
}

TEST(Calibration, fixed_layout)
{
  const CalibrationScene a = generate_calibration_scene(HarnessConfig{});
  const CalibrationScene b = generate_calibration_scene(HarnessConfig{});
  ASSERT_EQ(a.landmarks.size(), 9u);
  EXPECT_EQ(landmarks_to_json(a.landmarks), landmarks_to_json(b.landmarks));
  for (const auto& lm : a.landmarks) {
    EXPECT_GE(lm.forward, 5.0);
    EXPECT_LE(lm.forward, 25.0);
  }
}

TEST(Calibration, landmarks_unoccluded)
{
  const HarnessConfig cfg;
  const CalibrationScene cs = generate_calibration_scene(cfg);
  for (PairId id : {PairId::outer, PairId::middle, PairId::inner}) {
    const StereoCameraPoses cams = camera_poses(cfg.rig, id, Pose3{});
    for (const Pose3& cam : {cams.left, cams.right}) {
      for (std::size_t k = 0; k < cs.landmarks.size(); ++k) {
        const Landmark& lm = cs.landmarks[k];
        for (double dy : {-0.2, 0.0, 0.2}) {
          const Vec3 target(lm.forward, lm.lateral + dy, lm.center.z());
          const Vec3 dir = (target - cam.translation).normalized();
          const auto hit = cast_ray(cs.scene, cam.translation, dir);
          ASSERT_TRUE(hit);
          EXPECT_EQ(hit->surface, static_cast<int>(k)) << lm.name << " " << to_string(id);
        }
        EXPECT_TRUE(project_point(cfg.rig.camera(id), cam, lm.center)) << lm.name << " " << to_string(id);
      }
    }
  }
}

TEST(Calibration, stereo_range_at_10m)
{
  const HarnessConfig cfg;
  const CalibrationScene cs = generate_calibration_scene(cfg);
  const Landmark* lm = nullptr;
  for (const auto& l : cs.landmarks) {
    if (std::fabs(l.forward - 10.0) < 1e-9) {
      lm = &l;
    }
  }
  ASSERT_NE(lm, nullptr);
  const Vec3 face(lm->forward, lm->lateral, lm->center.z());
  for (PairId id : {PairId::outer, PairId::middle, PairId::inner}) {
    const StereoRender r = render_stereo_pair(cfg.rig, id, Pose3{}, cs.scene);
    const PointCloud cloud = disparity_to_pointcloud(compute_disparity_sgm(r.left, r.right, cfg.matching),
                                                     r.camera, r.baseline);
    const auto uv = project_point(r.camera, camera_poses(cfg.rig, id, Pose3{}).left, face);
    ASSERT_TRUE(uv) << to_string(id);
    std::vector<double> ranges;
    for (const auto& p : cloud.points) {
      if (std::abs(p.u + 0.5 - uv->x) <= 2.0 && std::abs(p.v + 0.5 - uv->y) <= 2.0) {
        ranges.push_back(p.position.norm());
      }
    }
    ASSERT_GE(ranges.size(), 10u) << to_string(id);
    std::nth_element(ranges.begin(), ranges.begin() + ranges.size() / 2, ranges.end());
    EXPECT_NEAR(ranges[ranges.size() / 2], lm->range, 0.02 * lm->range) << to_string(id);
  }
}

TEST(Calibration, lidar_ranges_exact)
{
  const HarnessConfig cfg;
  const CalibrationScene cs = generate_calibration_scene(cfg);
  const LidarScan scan = lidar_scan(cfg.lidar, Pose3{}, cs.scene);
  for (const auto& lm : cs.landmarks) {
    const double b = deg2rad(lm.bearing_deg);
    const auto it = std::min_element(scan.begin(), scan.end(), [&](const LidarReturn& x, const LidarReturn& y) {
      return std::fabs(x.bearing - b) < std::fabs(y.bearing - b);
    });
    ASSERT_TRUE(it->range) << lm.name;
    EXPECT_NEAR(*it->range, lm.forward / std::cos(it->bearing), 1e-9) << lm.name;
    EXPECT_NEAR(it->bearing, b, 1e-9) << lm.name;
  }
}

TEST(Cli, exit_codes)
{
  const fs::path dir = scratch_dir("cli");
  const std::string lanes = test_util::data_path("scenarios/synthetic/syn_parallel_lanes.json");
  EXPECT_EQ(run_cli("run --scenario " + lanes + " --out " + (dir / "ok").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "report.json"));

  std::ofstream(dir / "bad.json") << "{\"schema_version\": 1, \"id\": 3}";
  EXPECT_EQ(run_cli("run --scenario " + (dir / "bad.json").string() + " --out " + (dir / "x").string()), 2);
  std::ofstream(dir / "cfg.json") << "{\"maeb\": {\"decel\": 1}}";
  EXPECT_EQ(run_cli("run --scenario " + lanes + " --config " + (dir / "cfg.json").string() + " --out " +
                    (dir / "y").string()),
            2);

  // Output directory path is an existing regular file.
  std::ofstream(dir / "blocker") << "x";
  const std::string id86 = test_util::data_path("scenarios/id86.json");
  EXPECT_EQ(run_cli("run --scenario " + id86 + " --out " + (dir / "blocker").string()), 3);

  EXPECT_EQ(run_cli("calib --out " + (dir / "calib").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "calib" / "landmarks.json"));
  EXPECT_EQ(run_cli("sweep --dir " + test_util::data_path("scenarios/synthetic") + " --no-perception --out " +
                    (dir / "s.csv").string()),
            0);
  EXPECT_EQ(lines(read_file((dir / "s.csv").string())).size(), 13u);
  fs::remove_all(dir);
}
