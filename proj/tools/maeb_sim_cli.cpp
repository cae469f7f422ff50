#include "maeb/config.hpp"
#include "maeb/harness.hpp"
#include "maeb/image.hpp"
#include "maeb/scenario.hpp"
#include "maeb/scene_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

maeb::HarnessConfig config_from(const std::string& path, const std::optional<std::uint64_t>& seed)
{
  maeb::HarnessConfig cfg = path.empty() ? maeb::HarnessConfig{} : maeb::load_config(path);
  if (seed) {
    maeb::apply_seed(cfg, *seed);
  }
  cfg.validate();
  return cfg;
}

void print_issues(const maeb::ScenarioError& e, const std::string& path)
{
  for (const auto& issue : e.issues()) {
    std::cerr << path << ": " << (issue.field.empty() ? "" : issue.field + ": ") << issue.message << "\n";
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"MAEB pre-crash simulator"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "override every stochastic seed");

  std::string scenario_path;
  std::string config_path;
  std::string out_dir;
  int frames = 0;
  auto* run = app.add_subcommand("run", "evaluate one scenario end to end");
  run->add_option("--scenario", scenario_path, "scenario JSON")->required();
  run->add_option("--config", config_path, "harness config JSON");
  run->add_option("--out", out_dir, "artifact directory")->required();
  run->add_option("--frames", frames, "approach frames to evaluate")->check(CLI::Range(1, 100));

  std::string sweep_dir;
  std::string csv_path;
  bool no_perception = false;
  auto* sw = app.add_subcommand("sweep", "trigger and impact stage over a scenario directory");
  sw->add_option("--dir", sweep_dir, "directory of scenario files")->required();
  sw->add_option("--config", config_path, "harness config JSON");
  sw->add_option("--out", csv_path, "CSV output path")->required();
  sw->add_flag("--no-perception", no_perception, "skip rendering and heading estimation");

  std::string calib_dir;
  auto* calib = app.add_subcommand("calib", "write the calibration scene and landmark table");
  calib->add_option("--config", config_path, "harness config JSON");
  calib->add_option("--out", calib_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  std::string context;
  try {
    if (*run) {
      maeb::HarnessConfig cfg = config_from(config_path, seed);
      if (frames > 0) {
        cfg.eval.frames = frames;
      }
      context = scenario_path;
      const maeb::ScenarioSpec spec = maeb::load_scenario(scenario_path);
      context = "scenario " + spec.id;
      const auto report = maeb::run_case(spec, cfg, out_dir);
      std::cout << (std::filesystem::path(out_dir) / "report.json").string() << "\n";
      (void)report;
    } else if (*sw) {
      const maeb::HarnessConfig cfg = config_from(config_path, seed);
      context = sweep_dir;
      const auto rows = maeb::sweep(sweep_dir, cfg, !no_perception);
      maeb::write_file_atomic(csv_path, maeb::sweep_csv(rows, !no_perception));
      std::cout << csv_path << " (" << rows.size() << " cases)\n";
    } else if (*calib) {
      const maeb::HarnessConfig cfg = config_from(config_path, seed);
      std::filesystem::create_directories(calib_dir);
      const maeb::CalibrationScene cs = maeb::generate_calibration_scene(cfg);
      maeb::write_file_atomic((std::filesystem::path(calib_dir) / "scene.json").string(),
                              maeb::serialize_scene(cs.scene));
      maeb::write_file_atomic((std::filesystem::path(calib_dir) / "landmarks.json").string(),
                              maeb::landmarks_to_json(cs.landmarks).dump(2) + "\n");
      std::cout << calib_dir << " (" << cs.landmarks.size() << " landmarks)\n";
    }
  } catch (const maeb::ScenarioError& e) {
    print_issues(e, context);
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << (context.empty() ? "" : context + ": ") << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << (context.empty() ? "" : context + ": ") << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
