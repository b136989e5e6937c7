// End-to-end acceptance: one PASS/FAIL line per criterion, exit code 1 if any fails.
#include "rownav/config.hpp"
#include "rownav/metrics.hpp"
#include "rownav/sim.hpp"
#include "rownav/sweep.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

using namespace rownav;

namespace {

constexpr double kMaxAvgDistanceCm = 3.0;
constexpr double kMaxStdDistanceCm = 5.0;
constexpr double kMaxMissedPerRow = 10.0;
constexpr double kTransitionZone = 1.5;  // m from a row end
constexpr double kMaxManeuver = 2.0;     // m
constexpr double kPeakMinPx = 20.0;
constexpr double kSettledPx = 5.0;
constexpr double kSettleTravel = 3.0;  // m
constexpr double kSettledRun = 1.0;    // m of travel |X| must stay below kSettledPx
constexpr double kPeakTravel = 1.0;    // m after row_entered in which the peak must occur

struct FieldRun {
  int field = 0;
  std::uint64_t seed = 0;
  Field layout;
  ScenarioResult result;
  CoverageReport report;
  double seconds = 0.0;
};

int failures = 0;

void verdict(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %d %-22s %s  %s\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string config_path(int field) { return std::string(ROWNAV_CONFIG_DIR) + "/field" + std::to_string(field) + ".yaml"; }

FieldRun run_field(int field, std::uint64_t seed) {
  RunConfig cfg = load_run_config(config_path(field));
  cfg.field_spec.seed = seed;
  cfg.sim.seed = seed;
  FieldRun r;
  r.field = field;
  r.seed = seed;
  const Scenario sc = build_scenario(cfg);
  r.layout = sc.field;
  const auto t0 = std::chrono::steady_clock::now();
  r.result = run_scenario(sc);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.report = coverage_report(sc.field, r.result.trajectory, r.result.events);
  return r;
}

bool run_gtest(const char* binary, const char* filter) {
  const std::string cmd = std::string(binary) + " --gtest_brief=1 --gtest_filter='" + filter + "' >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

// Per row_entered event: peak |X| within kPeakTravel, and the travel at which
// |X| first drops below kSettledPx and stays there for kSettledRun.
struct Transition {
  double t = 0.0;
  double peak = 0.0;
  double settle = -1.0;  // m; negative when it never settles
  double later_max = 0.0;  // largest |X| after settling, to the row end
};

std::vector<Transition> transitions(const ScenarioResult& r) {
  std::vector<Transition> out;
  for (std::size_t e = 0; e < r.events.size(); ++e) {
    if (r.events[e].kind != NavEventKind::row_entered) continue;
    double t_end = r.trajectory.back().t + 1.0;
    for (std::size_t k = e + 1; k < r.events.size(); ++k)
      if (r.events[k].kind == NavEventKind::row_end_reached) {
        t_end = r.events[k].sim_time;
        break;
      }
    Transition tr;
    tr.t = r.events[e].sim_time;
    double travel = 0.0;
    const TrajectorySample* prev = nullptr;
    double below_since = -1.0;
    for (const auto& s : r.trajectory) {
      if (s.t < tr.t || s.t >= t_end) continue;
      if (prev) travel += std::hypot(s.pose.x - prev->pose.x, s.pose.y - prev->pose.y);
      prev = &s;
      if (!s.error_x) continue;
      const double x = std::abs(*s.error_x);
      if (travel <= kPeakTravel) tr.peak = std::max(tr.peak, x);
      if (tr.settle >= 0.0) {
        tr.later_max = std::max(tr.later_max, x);
        continue;
      }
      if (x >= kSettledPx) {
        below_since = -1.0;
      } else {
        if (below_since < 0.0) below_since = travel;
        if (travel - below_since >= kSettledRun) tr.settle = below_since;
      }
    }
    out.push_back(tr);
  }
  return out;
}

}  // namespace

int main() {
  const std::uint64_t seeds[] = {1, 2, 3};
  std::vector<FieldRun> runs;
  for (int f = 1; f <= 4; ++f)
    for (std::uint64_t s : seeds) {
      runs.push_back(run_field(f, s));
      const FieldRun& r = runs.back();
      std::printf("  field %d seed %llu: visited %.1f%%  dist %.2f +- %.2f cm  missed/row %.2f  maneuver %.2f m  %.1f s\n",
                  f, static_cast<unsigned long long>(s), r.report.visited_rows_pct, r.report.avg_row_distance,
                  r.report.std_row_distance, r.report.missed_crops_per_row, r.report.maneuvering_space, r.seconds);
      std::fflush(stdout);
    }

  {
    int ok = 0;
    double slowest = 0.0;
    for (const auto& r : runs) {
      ok += r.result.done && r.report.visited_rows_pct == 100.0;
      slowest = std::max(slowest, r.seconds);
    }
    verdict(1, "field-coverage", ok == static_cast<int>(runs.size()),
            fmt("%d/%zu runs at 100%% visited rows, slowest run %.1f s", ok, runs.size(), slowest));
  }
  {
    double worst_avg = 0.0, worst_std = 0.0;
    for (const auto& r : runs) {
      worst_avg = std::max(worst_avg, r.report.avg_row_distance);
      worst_std = std::max(worst_std, r.report.std_row_distance);
    }
    verdict(2, "tracking-accuracy", worst_avg <= kMaxAvgDistanceCm && worst_std <= kMaxStdDistanceCm,
            fmt("worst avg %.2f cm (<= %.1f), worst std %.2f cm (<= %.1f)", worst_avg, kMaxAvgDistanceCm, worst_std,
                kMaxStdDistanceCm));
  }
  {
    double worst = 0.0, farthest = 0.0;
    for (const auto& r : runs) {
      worst = std::max(worst, r.report.missed_crops_per_row);
      for (const auto& m : r.report.missed) farthest = std::max(farthest, m.distance_from_row_end);
    }
    verdict(3, "missed-crops", worst <= kMaxMissedPerRow && farthest <= kTransitionZone,
            fmt("worst %.2f per row (<= %.0f), farthest miss %.2f m from a row end (<= %.1f)", worst, kMaxMissedPerRow,
                farthest, kTransitionZone));
  }
  {
    const RunConfig base = load_run_config(std::string(ROWNAV_CONFIG_DIR) + "/tilt_sweep.yaml");
    const SweepSpec spec{SweepParam::tilt_error, -25.0, 15.0, 17};
    const SweepCurve c = sweep_curve(run_sweep(base, spec));
    std::string curve;
    for (const auto& p : c.points) curve += fmt(" %.1f:%.0f", p.param, p.visited_rows_pct);
    std::printf("  tilt sweep (deg:visited%%):%s\n", curve.c_str());
    const bool pass = c.has_full_interval && c.full_lo <= 70.0 + 1e-9 && c.full_hi >= 80.0 - 1e-9;
    verdict(4, "tilt-robustness", pass,
            c.has_full_interval ? fmt("100%% interval [%.1f, %.1f] deg, required [70, 80]", c.full_lo, c.full_hi)
                                : std::string("no 100% point"));
  }
  {
    const RunConfig base = load_run_config(std::string(ROWNAV_CONFIG_DIR) + "/delta_sweep.yaml");
    const SweepSpec spec{SweepParam::delta_error, -0.3, 0.3, 13};
    const SweepCurve c = sweep_curve(run_sweep(base, spec));
    std::string curve;
    for (const auto& p : c.points) curve += fmt(" %.0f:%.0f", 100.0 * p.param, p.visited_rows_pct);
    std::printf("  spacing sweep (cm:visited%%):%s\n", curve.c_str());
    const bool pass = c.has_full_interval && c.full_lo <= 0.45 + 1e-9 && c.full_hi >= 0.55 - 1e-9;
    verdict(5, "spacing-robustness", pass,
            c.has_full_interval
                ? fmt("100%% interval [%.0f, %.0f] cm, required [45, 55], reference 40-60", 100 * c.full_lo,
                      100 * c.full_hi)
                : std::string("no 100% point"));
  }
  {
    double worst = 0.0;
    for (const auto& r : runs) worst = std::max(worst, r.report.maneuvering_space);
    verdict(6, "maneuvering-space", worst <= kMaxManeuver, fmt("max %.2f m (<= %.1f)", worst, kMaxManeuver));
  }
  {
    struct Suite {
      const char* name;
      const char* binary;
      const char* filter;
    };
    const Suite suites[] = {
        {"jacobian", ROWNAV_TEST_CONTROLLER, "Controller.JacobianMatchesRenderedFiniteDifferences"},
        {"round-trip", ROWNAV_TEST_GEOMETRY, "Geometry.RoundTripWithinMicroPixel"},
        {"exg", ROWNAV_TEST_PERCEPTION, "Exg.MatchesFormulaOnRandomImages:Exg.AllColorTriplesAtDefaultThreshold"},
        {"components", ROWNAV_TEST_PERCEPTION, "Blobs.MatchFloodFillOnRandomMasks"},
        {"line-fit", ROWNAV_TEST_PERCEPTION, "LineFit.TwentyPercentOutliers:LineFit.RecoversLineUnderGrossOutliers"},
        {"automaton", ROWNAV_TEST_NAVIGATOR, "Navigator.MatchesReferenceAutomatonOnScripts"},
        {"kinematics", ROWNAV_TEST_SIM, "Kinematics.ArcMatchesFineStepOracle"},
        {"determinism", ROWNAV_TEST_SIM, "Sim.DeterministicWithNoise"},
        {"determinism-render", ROWNAV_TEST_RENDER, "Render.ParallelMatchesSerialAndIsDeterministic"},
        {"determinism-field", ROWNAV_TEST_FIELD, "Field.SameSeedIsBitIdenticalOtherSeedDiffers"},
    };
    std::string failed;
    for (const auto& s : suites)
      if (!run_gtest(s.binary, s.filter)) failed += std::string(" ") + s.name;
    verdict(7, "property-suites", failed.empty(),
            failed.empty() ? fmt("%zu suites passed", std::size(suites)) : "failed:" + failed);
  }
  {
    const FieldRun& f1 = runs.front();
    const auto trs = transitions(f1.result);
    bool pass = !trs.empty();
    std::string detail;
    for (const auto& tr : trs) {
      const bool ok = tr.peak >= kPeakMinPx && tr.settle >= 0.0 && tr.settle <= kSettleTravel;
      pass = pass && ok;
      detail += fmt(" [t=%.0fs peak %.0f px, settled %.2f m, later max %.1f px]", tr.t, tr.peak, tr.settle, tr.later_max);
    }
    verdict(8, "convergence", pass,
            fmt("%zu row entries, peak >= %.0f px, below %.0f px after <= %.0f m:", trs.size(), kPeakMinPx, kSettledPx,
                kSettleTravel) +
                detail);
  }
  return failures == 0 ? 0 : 1;
}
