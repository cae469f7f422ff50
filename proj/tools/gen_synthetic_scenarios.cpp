// Writes the synthetic sweep scenarios under data/scenarios/synthetic.
#include "maeb/image.hpp"
#include "maeb/scenario.hpp"
#include "maeb/scenario_builder.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

using namespace maeb;

constexpr double kPtwLength = 2.1;
constexpr double kPtwWidth = 0.8;

// Coasting PTW toward a bus parked across its lane.
ScenarioSpec bus_case(double speed)
{
  char id[32];
  std::snprintf(id, sizeof(id), "syn_bus_%02.0f", speed);
  const double t0 = -3.0;
  const double gap = 2.5 * speed;
  ScenarioSpec s;
  s.id = id;
  s.ptw = straight_run("ptw", kPtwLength, kPtwWidth, {-0.5 * kPtwLength, 0.0}, 0.0, speed, t0, {{2.0, 0.0}});
  s.opponent = parked("bus", 2.5, 12.0, {gap + 1.25, 0.0}, 0.0, t0);
  s.crash_point = {gap, 0.0};
  s.impact_time = t0 + gap / speed;
  s.notes = "synthetic, not from the crash database: PTW coasting into a bus parked across the lane";
  return s;
}

// Car crossing the PTW path; its side is struck by the PTW front at t = 0.
ScenarioSpec crossing_case(const std::string& id, double ptw_speed, double ptw_accel, double car_speed,
                           double from_left_sign, double car_offset)
{
  const double t0 = -4.0;
  ScenarioSpec s;
  s.id = id;
  const double brake_from = ptw_accel < 0.0 ? -1.0 : 0.0;
  const SpeedAdvance last = advance_speed(ptw_speed, ptw_accel, -brake_from);
  const double x_brake = -0.5 * kPtwLength - last.distance;
  const double x0 = x_brake - ptw_speed * (brake_from - t0);
  std::vector<Phase> phases = {{brake_from, 0.0}};
  if (brake_from < 0.0) {
    phases.push_back({0.0, ptw_accel});
  }
  phases.push_back({1.0, 0.0});
  s.ptw = straight_run("ptw", kPtwLength, kPtwWidth, {x0, 0.0}, 0.0, ptw_speed, t0, phases);
  const double yaw = from_left_sign > 0.0 ? -kPi / 2 : kPi / 2;
  s.opponent = constant_speed_through("car", 3.7, 1.6, {0.8, car_offset}, 0.0, yaw, car_speed, t0, 1.0);
  s.crash_point = {0.0, 0.0};
  s.impact_time = 0.0;
  s.notes = "synthetic, not from the crash database: perpendicular crossing";
  return s;
}

ScenarioSpec stationary_case()
{
  ScenarioSpec s;
  s.id = "syn_stationary_ptw";
  s.ptw = parked("ptw", kPtwLength, kPtwWidth, {-0.5 * kPtwLength, 0.0}, 0.0, -4.0);
  s.opponent = constant_speed_through("car", 3.7, 1.6, {0.8, 0.0}, 0.0, -kPi / 2, 8.33, -4.0, 1.0);
  s.crash_point = {0.0, 0.0};
  s.impact_time = 0.0;
  s.notes = "synthetic, not from the crash database: car strikes a PTW waiting at the crossing";
  return s;
}

ScenarioSpec parallel_case()
{
  ScenarioSpec s;
  s.id = "syn_parallel_lanes";
  s.ptw = straight_run("ptw", kPtwLength, kPtwWidth, {-30.0, 0.0}, 0.0, 12.0, -4.0, {{1.0, 0.0}});
  s.opponent = straight_run("car", 3.7, 1.6, {-30.0, 5.0}, 0.0, 12.0, -4.0, {{1.0, 0.0}});
  s.crash_point = {0.0, 0.0};
  s.impact_time = 0.0;
  s.notes = "synthetic, not from the crash database: parallel lanes, no collision";
  return s;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Write the synthetic sweep scenarios"};
  std::string out = "data/scenarios/synthetic";
  app.add_option("--out", out, "output directory");
  CLI11_PARSE(app, argc, argv);

  std::vector<ScenarioSpec> specs;
  for (double v : {6.0, 8.0, 10.0, 12.0, 14.0, 16.0}) {
    specs.push_back(bus_case(v));
  }
  specs.push_back(crossing_case("syn_cross_left_36", 10.0, 0.0, 8.33, 1.0, 0.0));
  specs.push_back(crossing_case("syn_cross_left_47", 13.0, 0.0, 8.33, 1.0, -0.5));
  specs.push_back(crossing_case("syn_cross_right_braking", 14.0, -2.0, 11.0, -1.0, 0.5));
  specs.push_back(crossing_case("syn_id86_coasting", 15.28, 0.0, 8.33, 1.0, -0.65));
  specs.push_back(stationary_case());
  specs.push_back(parallel_case());

  std::filesystem::create_directories(out);
  for (const auto& s : specs) {
    const auto report = validate_scenario(s);
    if (!report.ok()) {
      std::cerr << s.id << ": " << report.errors.front().field << ": " << report.errors.front().message << "\n";
      return 2;
    }
    write_file_atomic((std::filesystem::path(out) / (s.id + ".json")).string(), serialize_scenario(s));
  }
  std::cout << specs.size() << " scenarios written to " << out << "\n";
  return 0;
}
