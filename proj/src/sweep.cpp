#include "rownav/sweep.hpp"

#include <cstdio>
#include <stdexcept>

namespace rownav {

const char* to_string(SweepParam p) { return p == SweepParam::tilt_error ? "tilt_error" : "delta_error"; }

SweepParam sweep_param_from_string(const std::string& s) {
  if (s == "tilt_error") return SweepParam::tilt_error;
  if (s == "delta_error") return SweepParam::delta_error;
  throw std::invalid_argument("sweep parameter must be tilt_error or delta_error, got '" + s + "'");
}

std::vector<double> SweepSpec::values() const {
  if (steps < 1) throw std::invalid_argument("sweep: steps must be >= 1");
  if (steps == 1) return {from};
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) v[static_cast<std::size_t>(i)] = from + (to - from) * i / (steps - 1);
  return v;
}

RunConfig sweep_point_config(const RunConfig& base, SweepParam param, double value) {
  RunConfig cfg = base;
  if (param == SweepParam::tilt_error)
    cfg.sim.tilt_error = deg2rad(value);
  else
    cfg.sim.delta_error = value;
  return cfg;
}

std::vector<SweepRun> run_sweep(const RunConfig& base, const SweepSpec& spec) {
  const std::vector<double> values = spec.values();
  std::vector<SweepRun> runs(values.size());
  const long n = static_cast<long>(values.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    SweepRun& r = runs[static_cast<std::size_t>(i)];
    r.value = values[static_cast<std::size_t>(i)];
    r.actual = spec.param == SweepParam::tilt_error ? rad2deg(base.rig.tilt) + r.value
                                                    : base.field_spec.spacing_mean + r.value;
    try {
      const RunConfig cfg = sweep_point_config(base, spec.param, r.value);
      validate(cfg);
      const Scenario sc = build_scenario(cfg);
      const ScenarioResult res = run_scenario(sc);
      r.done = res.done;
      r.report = coverage_report(sc.field, res.trajectory, res.events);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  }
  return runs;
}

std::string sweep_to_csv(const SweepSpec& spec, const std::vector<SweepRun>& runs) {
  const bool tilt = spec.param == SweepParam::tilt_error;
  std::string out = tilt ? "index,tilt_error_deg,tilt_deg," : "index,delta_error_m,spacing_m,";
  out += "visited_rows_pct,missed_crops_per_row,avg_row_distance_cm,std_row_distance_cm,maneuvering_space_m,done,"
         "error\n";
  char buf[512];
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const SweepRun& r = runs[i];
    if (r.report) {
      const CoverageReport& c = *r.report;
      std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.3f,%.3f,%.4f,%.4f,%.4f,%d,\n", i, r.value, r.actual,
                    c.visited_rows_pct, c.missed_crops_per_row, c.avg_row_distance, c.std_row_distance,
                    c.maneuvering_space, r.done ? 1 : 0);
    } else {
      std::string msg = r.error;
      for (char& ch : msg)
        if (ch == ',' || ch == '\n') ch = ' ';
      std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,0,,,,,0,%s\n", i, r.value, r.actual, msg.c_str());
    }
    out += buf;
  }
  return out;
}

SweepCurve sweep_curve(const std::vector<SweepRun>& runs) {
  std::vector<std::pair<double, CoverageReport>> pts;
  for (const auto& r : runs) pts.emplace_back(r.actual, r.report.value_or(CoverageReport{}));
  return sweep_summary(pts);
}

nlohmann::json sweep_summary_json(const RunConfig& base, const SweepSpec& spec, const std::vector<SweepRun>& runs) {
  const SweepCurve c = sweep_curve(runs);
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : c.points) pts.push_back({{"actual", p.param}, {"visited_rows_pct", p.visited_rows_pct}});
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& r : runs)
    if (!r.error.empty()) failed.push_back({{"value", r.value}, {"error", r.error}});
  nlohmann::json interval = nullptr;
  if (c.has_full_interval) interval = {c.full_lo, c.full_hi};
  return {{"config", config_to_json(base)},
          {"sweep", {{"param", to_string(spec.param)}, {"from", spec.from}, {"to", spec.to}, {"steps", spec.steps}}},
          {"actual_unit", spec.param == SweepParam::tilt_error ? "deg" : "m"},
          {"curve", pts},
          {"full_coverage_interval", interval},
          {"failed_points", failed}};
}

}  // namespace rownav
