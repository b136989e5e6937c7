// Command-line front end: generate | run | sweep | report.
#include "rownav/config.hpp"
#include "rownav/image.hpp"
#include "rownav/io.hpp"
#include "rownav/metrics.hpp"
#include "rownav/perception.hpp"
#include "rownav/sim.hpp"
#include "rownav/sweep.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace rownav;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitTimeout = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

RunConfig load(const Common& c) {
  RunConfig cfg = load_run_config(c.config);
  if (c.seed) {
    cfg.field_spec.seed = *c.seed;
    cfg.sim.seed = *c.seed;
  }
  if (!c.out.empty()) cfg.output_dir = c.out;
  return cfg;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class W>
std::string to_bytes(W&& write) {
  std::ostringstream o(std::ios::binary);
  write(o);
  return o.str();
}

int cmd_generate(const Common& c) {
  const RunConfig cfg = load(c);
  const Field field = build_field(cfg);
  const fs::path out = c.out.empty() ? fs::path(cfg.output_dir) / "field.json" : fs::path(c.out);
  atomic_write(out.string(), field_to_json(field).dump(1) + "\n");
  std::printf("wrote %s (%zu rows, %zu plants)\n", out.string().c_str(), field.rows.size(), field.plant_count());
  return kExitOk;
}

int cmd_run(const Common& c, bool dump_images) {
  const RunConfig cfg = load(c);
  const Scenario sc = build_scenario(cfg);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  FrameObserver observer;
  if (dump_images) {
    fs::create_directories(dir / "frames");
    observer = [&](int frame, const RgbImage& front, const RgbImage& back, const NavStepResult& step) {
      char name[64];
      std::snprintf(name, sizeof name, "%05d", frame);
      const fs::path base = dir / "frames";
      atomic_write((base / (std::string("front_") + name + ".ppm")).string(),
                   to_bytes([&](std::ostream& o) { write_ppm(o, front); }));
      atomic_write((base / (std::string("back_") + name + ".ppm")).string(),
                   to_bytes([&](std::ostream& o) { write_ppm(o, back); }));
      const RgbImage& primary = step.state.primary_cam == Mount::front ? front : back;
      const BinaryMask mask = exg_mask(primary, cfg.nav.perception.exg_threshold);
      atomic_write((base / (std::string("mask_") + name + ".pbm")).string(),
                   to_bytes([&](std::ostream& o) { write_pbm(o, mask); }));
    };
  }

  const ScenarioResult res = run_scenario(sc, observer);
  const CoverageReport rep = coverage_report(sc.field, res.trajectory, res.events);

  atomic_write((dir / "field.json").string(), field_to_json(sc.field).dump(1) + "\n");
  atomic_write((dir / "trajectory.csv").string(), trajectory_to_csv(res.trajectory));
  const nlohmann::json report = {{"config", config_to_json(cfg)},
                                 {"done", res.done},
                                 {"timed_out", res.timed_out},
                                 {"frames", res.frames},
                                 {"rows_completed", res.final_state.rows_completed},
                                 {"events", events_to_json(res.events)},
                                 {"coverage", report_to_json(rep)}};
  atomic_write((dir / "report.json").string(), report.dump(2) + "\n");
  if (cfg.svg) atomic_write((dir / "trajectory.svg").string(), render_svg(sc.field, res.trajectory));

  std::printf("%s after %.1f s: visited %.1f%% rows, distance %.2f +- %.2f cm, missed %.2f/row, maneuver %.2f m\n",
              res.done ? "done" : "timeout", res.trajectory.empty() ? 0.0 : res.trajectory.back().t,
              rep.visited_rows_pct, rep.avg_row_distance, rep.std_row_distance, rep.missed_crops_per_row,
              rep.maneuvering_space);
  return res.done ? kExitOk : kExitTimeout;
}

int cmd_sweep(const Common& c, const SweepSpec& spec) {
  const RunConfig cfg = load(c);
  const std::vector<SweepRun> runs = run_sweep(cfg, spec);
  const fs::path dir(cfg.output_dir);
  atomic_write((dir / "sweep.csv").string(), sweep_to_csv(spec, runs));
  const nlohmann::json summary = sweep_summary_json(cfg, spec, runs);
  atomic_write((dir / "sweep_summary.json").string(), summary.dump(2) + "\n");
  for (const auto& r : runs)
    std::printf("%s=%g -> %s\n", to_string(spec.param), r.value,
                r.report ? (std::to_string(r.report->visited_rows_pct) + "%").c_str() : r.error.c_str());
  std::printf("full-coverage interval: %s\n", summary["full_coverage_interval"].dump().c_str());
  return kExitOk;
}

int cmd_report(const std::string& run_dir, const std::string& out) {
  const fs::path dir(run_dir);
  const Field field = field_from_json(nlohmann::json::parse(read_file(dir / "field.json")));
  const Trajectory traj = trajectory_from_csv(read_file(dir / "trajectory.csv"));
  const nlohmann::json run = nlohmann::json::parse(read_file(dir / "report.json"));
  const std::vector<NavEvent> events = events_from_json(run.at("events"));
  if (traj.empty()) throw std::runtime_error("empty trajectory");
  const nlohmann::json j = {{"config", run.at("config")}, {"coverage", report_to_json(coverage_report(field, traj, events))}};
  if (out.empty())
    std::cout << j.dump(2) << "\n";
  else
    atomic_write(out, j.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vision-based crop-row navigation simulator"};
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", common.config, "YAML run config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Override field and simulation seeds");
  };

  CLI::App* gen = app.add_subcommand("generate", "Generate a field and write it as JSON");
  add_common(gen);
  gen->add_option("--out", common.out, "Output file (default <output.dir>/field.json)");

  bool dump_images = false;
  CLI::App* run = app.add_subcommand("run", "Run one closed-loop scenario");
  add_common(run);
  run->add_option("--out", common.out, "Output directory (overrides output.dir)");
  run->add_flag("--dump-images", dump_images, "Write per-frame PPM views and PBM masks to <out>/frames");

  SweepSpec spec;
  std::string param = "tilt_error";
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep tilt_error [deg] or delta_error [m]");
  add_common(sweep);
  sweep->add_option("--out", common.out, "Output directory (overrides output.dir)");
  sweep->add_option("--param", param, "tilt_error | delta_error")->check(CLI::IsMember({"tilt_error", "delta_error"}));
  sweep->add_option("--from", spec.from, "First value")->required();
  sweep->add_option("--to", spec.to, "Last value")->required();
  sweep->add_option("--steps", spec.steps, "Number of points")->check(CLI::PositiveNumber);

  std::string run_dir, report_out;
  CLI::App* report = app.add_subcommand("report", "Recompute the coverage report of a run directory");
  report->add_option("run_dir", run_dir, "Directory written by `run`")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", report_out, "Write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(common);
    if (*run) return cmd_run(common, dump_images);
    if (*sweep) {
      spec.param = sweep_param_from_string(param);
      return cmd_sweep(common, spec);
    }
    if (*report) return cmd_report(run_dir, report_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
