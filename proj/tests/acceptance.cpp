// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails its check or its time limit.
#include "maeb/harness.hpp"
#include "maeb/ics.hpp"
#include "maeb/image.hpp"
#include "maeb/lidar_heading.hpp"
#include "maeb/maeb.hpp"
#include "maeb/parallel.hpp"

#include "oracles.hpp"
#include "scenes.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>

using namespace maeb;
using namespace scenes;
namespace fs = std::filesystem;

namespace {

// Tolerances, pinned.
constexpr double kTriggerDistance = 7.2;
constexpr double kTriggerBand = 1.5;
constexpr double kSpeedEps = 1e-12;
constexpr double kKmhBand = 0.1;
constexpr double kCoastDeltaV = 4.24;
constexpr double kCoastBand = 0.05;
constexpr double kSweepPeak = 10.0;
constexpr double kSweepPeakBand = 1.0;
constexpr double kSweepCeiling = 10.5;
constexpr int kRandomScenarios = 1000;
constexpr double kMonotoneSlack = 0.05;  // km/h
constexpr double kGtDisparityEps = 1e-6;
constexpr double kSgmMedianBand = 1.0;
constexpr double kOracleAgreement = 0.99;
constexpr double kId86HeadingMax = 5.0;
constexpr double kFlankHeadingMax = 3.0;
constexpr double kRollExtraMax = 2.0;
constexpr double kLidarFaceMax = 2.0;

struct Verdict {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what)
  {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<void(Verdict&)> run;
};

std::string fmt(double v, int prec = 3)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

void trigger_criterion(Verdict& v)
{
  const ScenarioSpec s = test_util::id86();
  const auto trig = find_trigger_time(s, ManeuverSetParams{});
  v.require(trig.has_value(), "trigger found");
  if (trig) {
    v.detail << "distance " << fmt(trig->distance_to_crash) << " m";
    v.require(std::fabs(trig->distance_to_crash - kTriggerDistance) <= kTriggerBand, "distance in 7.2 +/- 1.5");
  }
  const double before = state_at(s.ptw, -1.0).speed;
  const double impact = state_at(s.ptw, 0.0).speed;
  v.detail << ", " << fmt(oracle::kmh(before), 2) << " -> " << fmt(oracle::kmh(impact), 2) << " km/h";
  v.require(std::fabs(impact - (before - 2.8 * 1.0)) <= kSpeedEps, "v(0) = v(-1) - 2.8 * 1 s");
  v.require(std::fabs(oracle::kmh(before) - 55.0) <= kKmhBand, "55 km/h before braking");
  v.require(std::fabs(oracle::kmh(impact) - 45.0) <= kKmhBand, "45 km/h at impact");
}

void magnitude_criterion(Verdict& v)
{
  const ScenarioSpec s = oracle::side_sweep(12.5);
  const auto tb = baseline_collision_time(s);
  v.require(tb.has_value(), "baseline collision");
  if (!tb) {
    return;
  }
  MaebConfig cfg;
  cfg.ramp_time = 0.0;
  const ImpactReport r = impact_outcome_at(s, *tb - 0.4, cfg);
  v.detail << "coasting delta_v " << fmt(r.delta_v) << " km/h";
  v.require(std::fabs(r.delta_v - kCoastDeltaV) <= kCoastBand, "4.24 +/- 0.05");

  const auto rows = sweep(test_util::data_path("scenarios/synthetic"), HarnessConfig{}, false);
  double peak = 0.0;
  for (const auto& row : rows) {
    if (row.delta_v_kmh) {
      v.require(*row.delta_v_kmh >= 0.0, row.id + " delta_v >= 0");
      peak = std::max(peak, *row.delta_v_kmh);
    }
  }
  v.detail << ", sweep peak " << fmt(peak) << " km/h over " << rows.size() << " cases";
  v.require(std::fabs(peak - kSweepPeak) <= kSweepPeakBand, "peak ~10");
  v.require(peak <= kSweepCeiling, "peak <= 10.5");
}

struct PropertyOutcome {
  bool lead = true;
  bool target = true;
  bool bounded = true;
};

PropertyOutcome property_check(const ScenarioSpec& s, double tb)
{
  PropertyOutcome out;
  double prev = -1.0;
  for (double lead : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    if (tb - lead < scenario_start_time(s)) {
      break;
    }
    const double dv = impact_outcome_at(s, tb - lead, MaebConfig{}).delta_v;
    out.lead = out.lead && dv >= prev - kMonotoneSlack;
    prev = std::max(prev, dv);
  }
  prev = -1.0;
  for (double target : {1.0, 2.0, 2.943, 4.0, 6.0}) {
    MaebConfig c;
    c.auto_decel_target = target;
    const double dv = impact_outcome_at(s, tb - 0.5, c).delta_v;
    out.target = out.target && dv >= prev - kMonotoneSlack;
    prev = std::max(prev, dv);
  }
  const MaebTimeline tl(s, tb - 0.7, MaebConfig{});
  for (double t = tb - 0.7; t < tb + 0.5; t += 0.01) {
    out.bounded = out.bounded && tl.at(t).speed <= state_at(s.ptw, t).speed + 1e-9;
  }
  return out;
}

void monotonicity_criterion(Verdict& v)
{
  std::vector<oracle::RandomCrossing> cases;
  std::vector<double> collision;
  std::mt19937_64 rng(20240601);
  while (static_cast<int>(cases.size()) < kRandomScenarios) {
    auto rc = oracle::random_crossing(rng, static_cast<int>(cases.size()));
    if (const auto tb = baseline_collision_time(rc.spec)) {
      collision.push_back(*tb);
      cases.push_back(std::move(rc));
    }
  }
  std::vector<PropertyOutcome> out(cases.size());
  parallel_for(cases.size(), [&](std::size_t i) { out[i] = property_check(cases[i].spec, collision[i]); });
  int lead = 0;
  int target = 0;
  int bounded = 0;
  for (const auto& o : out) {
    lead += o.lead ? 0 : 1;
    target += o.target ? 0 : 1;
    bounded += o.bounded ? 0 : 1;
  }
  v.detail << cases.size() << " random crossings: lead violations " << lead << ", target violations " << target
           << ", speed-bound violations " << bounded;
  v.require(lead == 0 && target == 0 && bounded == 0, "no property violations");

  const ManeuverSetParams p;
  int fixtures = 0;
  int ics_bad = 0;
  for (const ScenarioSpec& s : test_util::all_fixtures()) {
    const auto tb = baseline_collision_time(s, p.dt);
    if (!tb) {
      continue;
    }
    ++fixtures;
    bool seen = false;
    for (double t = std::max(scenario_start_time(s), *tb - 2.5); t < *tb - 1e-3; t += 0.025) {
      const bool inev = is_inevitable(s, t, p);
      ics_bad += seen && !inev ? 1 : 0;
      seen = seen || inev;
    }
    const auto trig = find_trigger_time(s, p);
    ics_bad += trig && !trig->monotone ? 1 : 0;
  }
  v.detail << "; ICS monotone on " << fixtures << " colliding fixtures, violations " << ics_bad;
  v.require(ics_bad == 0, "ICS monotone in time");
}

void geometry_criterion(Verdict& v)
{
  const RigConfig rig = native_rig();
  const CameraModel cam = rig.camera(PairId::inner);
  const StereoCameraPoses poses = camera_poses(rig, PairId::inner, Pose3{});
  double worst = 0.0;
  for (auto [z, expected] : {std::pair{8.0, 17.69375}, std::pair{14.155, 10.0}}) {
    const auto l = project_point(cam, poses.left, Vec3(z, 0, 0));
    const auto r = project_point(cam, poses.right, Vec3(z, 0, 0));
    v.require(l && r, "projection on image");
    if (l && r) {
      worst = std::max(worst, std::fabs(l->x - r->x - expected));
    }
  }
  v.detail << "ground truth max error " << worst << " px";
  v.require(worst <= kGtDisparityEps, "ground truth within 1e-6 px");
  for (auto [z, expected] : {std::pair{8.0, 17.69375}, std::pair{14.155, 10.0}}) {
    const StereoRender r = render_stereo_pair(rig, PairId::inner, Pose3{}, wall_scene(z + 0.1));
    const float med = median_valid(compute_disparity_sgm(r.left, r.right, MatchingParams{}));
    v.detail << ", SGM median " << fmt(med) << " (" << fmt(expected, 2) << ")";
    v.require(std::fabs(med - expected) <= kSgmMedianBand, "SGM median within 1 px");
  }
}

void oracle_criterion(Verdict& v)
{
  double worst = 1.0;
  for (int shift : {3, 7, 20}) {
    const Image l = random_texture(200, 100, 10 + static_cast<std::uint64_t>(shift));
    const Image r = shifted(l, shift, 99);
    MatchingParams p;
    p.d_max = 48;
    const DisparityMap bm = compute_disparity_bm(l, r, p);
    const DisparityMap sgm = compute_disparity_sgm(l, r, p);
    std::size_t both = 0;
    std::size_t exact = 0;
    for (std::size_t i = 0; i < bm.values.size(); ++i) {
      if (bm.values[i] >= 0 && sgm.values[i] >= 0) {
        ++both;
        exact += (std::lround(sgm.values[i]) == shift && bm.values[i] == shift) ? 1 : 0;
      }
    }
    const double frac = both > 0 ? static_cast<double>(exact) / static_cast<double>(both) : 0.0;
    worst = std::min(worst, frac);
  }
  v.detail << "min integer agreement " << fmt(worst, 4);
  v.require(worst >= kOracleAgreement, "agreement >= 0.99");
  const Image u(120, 80, 128);
  const std::size_t valid = compute_disparity_bm(u, u, MatchingParams{}).valid_count() +
                            compute_disparity_sgm(u, u, MatchingParams{}).valid_count();
  v.detail << ", valid pixels on uniform images " << valid;
  v.require(valid == 0, "uniform images all INVALID");
}

void heading_criterion(Verdict& v)
{
  HarnessConfig cfg;
  cfg.eval.pairs = {PairId::inner};
  const auto report = run_case(test_util::id86(), cfg, "");
  const auto& sh = report["perception"]["stereo_heading"];
  const bool has = sh.contains("error_deg");
  v.require(has, "ID86 stereo heading available");
  if (has) {
    const double err = sh["error_deg"].get<double>();
    v.detail << "ID86 " << fmt(err, 2) << " deg";
    v.require(err <= kId86HeadingMax, "ID86 error <= 5");
  }
  for (double yaw : {30.0, 60.0, 90.0}) {
    const double upright = error_deg(estimate(view_car(yaw, {8.0, 0.0}), yaw), yaw);
    v.detail << ", " << yaw << " deg flank " << fmt(upright, 2);
    v.require(upright <= kFlankHeadingMax, "flank within 3 deg");
    if (yaw != 60.0) {
      const double rolled = error_deg(estimate(view_car(yaw, {8.0, 0.0}, 15.0), yaw), yaw);
      v.detail << " (roll 15: " << fmt(rolled, 2) << ")";
      v.require(rolled <= upright + kRollExtraMax, "roll adds <= 2 deg");
    }
  }

  SceneModel scene;
  scene.ground.enabled = false;
  TexturedBox wall;
  wall.pose = Pose3::planar(10.0, 0.0, 0.5, deg2rad(90.0));
  wall.size = Vec3(20.0, 0.2, 2.0);
  scene.boxes = {wall};
  const LidarConfig lidar;
  const Pose3 sensor = Pose3::planar(0.0, 0.0, 0.6, 0.0);
  const LidarTrackFrame face = lidar_heading(lidar_scan(lidar, sensor, scene), GroundRoi{0.5, 40.0, -30.0, 30.0});
  const double face_err = std::fabs(wrap_degrees(face.heading_deg - 90.0));
  v.detail << ", lidar face " << fmt(face_err, 2);
  v.require(face_err <= kLidarFaceMax, "lidar single face within 2 deg");

  bool bounded = true;
  double max_step = 0.0;
  const auto orbit = lidar_orbit(2.0, 88.0, 1.0);
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    bounded = bounded && orbit[i].world_deg >= 90.0 - 1e-6 && orbit[i].world_deg <= 180.0 + 1e-6;
    if (i > 0) {
      max_step = std::max(max_step, std::fabs(orbit[i].world_deg - orbit[i - 1].world_deg));
    }
  }
  v.detail << ", lidar two-face fit inside the face cone on " << orbit.size() << " views, largest jump "
           << fmt(max_step, 1) << " deg per 1 deg of viewpoint";
  v.require(bounded, "two-face estimate between the faces");
}

void blur_criterion(Verdict& v)
{
  const RigConfig rig;
  const SceneModel scene = street_scene();
  double prev = 2.0;
  for (int blur : {0, 3, 7, 11}) {
    const StereoRender r = render_stereo_pair(rig, PairId::inner, Pose3{}, scene, blur);
    const DisparityMap d = compute_disparity_sgm(r.left, r.right, MatchingParams{});
    const double f = depth_metrics(d, r.depth, r.camera, r.baseline, 30.0).accurate_fraction;
    v.detail << (blur == 0 ? "" : ", ") << "blur " << blur << ": " << fmt(f, 4);
    v.require(f <= prev, "non-increasing at blur " + std::to_string(blur));
    prev = f;
  }
}

void determinism_criterion(Verdict& v)
{
  const ScenarioSpec spec = test_util::id86();
  const fs::path base = fs::temp_directory_path() / "maeb_acceptance";
  fs::remove_all(base);
  std::string reports[2];
  const char* threads[2] = {"1", "4"};
  for (int k = 0; k < 2; ++k) {
    setenv("MAEB_SIM_THREADS", threads[k], 1);
    reports[k] = dump_report(run_case(spec, HarnessConfig{}, (base / threads[k]).string()));
  }
  unsetenv("MAEB_SIM_THREADS");
  v.require(reports[0] == reports[1], "reports identical");
  std::size_t files = 0;
  std::size_t differing = 0;
  for (const auto& e : fs::directory_iterator(base / "1")) {
    const fs::path other = base / "4" / e.path().filename();
    ++files;
    if (!fs::exists(other) || read_file(e.path().string()) != read_file(other.string())) {
      ++differing;
    }
  }
  v.detail << files << " artifacts, " << differing << " differ (1 vs 4 workers)";
  v.require(files > 0 && differing == 0, "artifacts byte-identical");
  fs::remove_all(base);
}

}  // namespace

int main()
{
  const std::vector<Criterion> criteria = {
      {1, "ID86 trigger", 1.0, trigger_criterion},
      {2, "MAEB magnitude", 5.0, magnitude_criterion},
      {3, "monotonicity suite", 60.0, monotonicity_criterion},
      {4, "stereo geometry", 30.0, geometry_criterion},
      {5, "matching oracle", 30.0, oracle_criterion},
      {6, "heading accuracy", 60.0, heading_criterion},
      {7, "blur degradation", 30.0, blur_criterion},
      {8, "determinism", 30.0, determinism_criterion},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(secs < c.limit_s, "time limit");
    std::printf("%s %d %s: %s (%.2f s, limit %.0f s)\n", v.ok ? "PASS" : "FAIL", c.id, c.name,
                v.detail.str().c_str(), secs, c.limit_s);
    std::fflush(stdout);
    failed += v.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
