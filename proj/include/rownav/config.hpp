#pragma once

#include "rownav/field.hpp"
#include "rownav/navigator.hpp"
#include "rownav/render.hpp"
#include "rownav/sim.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace rownav {

/// Parse or validation failure; the message carries "file:line:" when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything needed to reproduce a run. Angles are stored in radians; the
/// YAML file uses degrees for them (keys ending in _deg).
struct RunConfig {
  FieldSpec field_spec;
  /// Saved field JSON; replaces field_spec when set.
  std::optional<std::string> field_path;
  CameraRig rig;  // assumed front rig
  NavigatorParams nav;
  SimConfig sim;
  double pixel_noise_std = 0.0;
  std::string output_dir = "out";
  bool svg = true;
};

/// YAML text -> config. Unknown keys, wrong types and out-of-range values throw ConfigError.
/// Relative field paths are resolved against `base_dir`.
RunConfig parse_run_config(const std::string& yaml_text, const std::string& origin = "<config>",
                           const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

/// Range checks across all sections; throws ConfigError.
void validate(const RunConfig& cfg);

/// Fully resolved config, all defaults materialized. JSON is valid YAML, so the
/// dump parses back with parse_run_config.
nlohmann::json config_to_json(const RunConfig& cfg);

/// The field the robot drives in. Generated fields get spacing_mean + sim.delta_error;
/// a nonzero delta_error with a saved field is rejected.
Field build_field(const RunConfig& cfg);
Scenario build_scenario(const RunConfig& cfg);

}  // namespace rownav
