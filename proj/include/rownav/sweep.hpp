#pragma once

#include "rownav/config.hpp"
#include "rownav/metrics.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rownav {

enum class SweepParam { tilt_error, delta_error };

const char* to_string(SweepParam p);
SweepParam sweep_param_from_string(const std::string& s);

/// `from`/`to` are in the parameter's config units: degrees for tilt_error, meters for delta_error.
struct SweepSpec {
  SweepParam param = SweepParam::tilt_error;
  double from = 0.0;
  double to = 0.0;
  int steps = 1;

  std::vector<double> values() const;
};

struct SweepRun {
  double value = 0.0;   // sweep parameter (config units)
  double actual = 0.0;  // resulting actual tilt [deg] or row spacing [m]
  bool done = false;
  std::optional<CoverageReport> report;
  std::string error;  // non-empty when the point failed to run
};

/// Config for one sweep point: `base` with the swept error set to `value`.
RunConfig sweep_point_config(const RunConfig& base, SweepParam param, double value);

/// One closed-loop run per value, in parallel; results are in sweep order.
std::vector<SweepRun> run_sweep(const RunConfig& base, const SweepSpec& spec);

std::string sweep_to_csv(const SweepSpec& spec, const std::vector<SweepRun>& runs);
/// Curve of visited-row percentage over the actual value, plus its 100% interval.
SweepCurve sweep_curve(const std::vector<SweepRun>& runs);
nlohmann::json sweep_summary_json(const RunConfig& base, const SweepSpec& spec, const std::vector<SweepRun>& runs);

}  // namespace rownav
