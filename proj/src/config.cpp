#include "rownav/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace rownav {

namespace {

std::string where(const std::string& origin, const YAML::Node& n) {
  if (n.Mark().is_null()) return origin + ": ";
  return origin + ":" + std::to_string(n.Mark().line + 1) + ": ";
}

// A mapping whose keys must all be consumed.
class Section {
 public:
  Section(const YAML::Node& node, std::string name, const std::string& origin)
      : node_(node), name_(std::move(name)), origin_(origin) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      throw ConfigError(where(origin_, node_) + "'" + name_ + "' must be a mapping");
  }

  template <class T>
  void get(const char* key, T& dst) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node v = node_[key];
    if (!v) return;
    try {
      dst = v.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(where(origin_, v) + name_ + "." + key + ": invalid value");
    }
  }

  YAML::Node child(const char* key) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return YAML::Node();
    return node_[key];
  }

  void finish() const {
    if (!node_ || node_.IsNull()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(where(origin_, kv.first) + "unknown key '" + name_ + "." + key + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string name_;
  const std::string& origin_;
  std::set<std::string> seen_;
};

template <class F>
void checked(const std::string& origin, const YAML::Node& n, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where(origin, n) + e.what());
  }
}

Side side_from_string(const std::string& s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  throw ConfigError("initial_side must be 'left' or 'right', got '" + s + "'");
}

}  // namespace

RunConfig parse_run_config(const std::string& yaml_text, const std::string& origin, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig cfg;
  Section top(root, "config", origin);

  {
    const YAML::Node n = top.child("field");
    Section s(n, "field", origin);
    FieldSpec& f = cfg.field_spec;
    std::string shape = to_string(f.shape);
    std::string path;
    s.get("path", path);
    s.get("shape", shape);
    s.get("row_count", f.row_count);
    s.get("row_length", f.row_length);
    s.get("spacing_mean", f.spacing_mean);
    s.get("spacing_std", f.spacing_std);
    s.get("plant_gap_min", f.plant_gap_min);
    s.get("plant_gap_max", f.plant_gap_max);
    s.get("canopy_radius_min", f.canopy_radius_min);
    s.get("canopy_radius_max", f.canopy_radius_max);
    s.get("lateral_jitter_std", f.lateral_jitter_std);
    s.get("seed", f.seed);
    s.finish();
    checked(origin, n, [&] { f.shape = field_shape_from_string(shape); });
    if (!path.empty()) {
      const std::filesystem::path p(path);
      cfg.field_path = (p.is_absolute() ? p : std::filesystem::path(base_dir) / p).lexically_normal().string();
    }
  }
  {
    const YAML::Node n = top.child("camera");
    Section s(n, "camera", origin);
    double tilt_deg = rad2deg(cfg.rig.tilt);
    CameraIntrinsics& in = cfg.rig.intrinsics;
    s.get("tilt_deg", tilt_deg);
    s.get("mount_height", cfg.rig.height);
    s.get("longitudinal_offset", cfg.rig.longitudinal_offset);
    s.get("fx", in.fx);
    s.get("fy", in.fy);
    s.get("cx", in.cx);
    s.get("cy", in.cy);
    s.get("image_width", in.width);
    s.get("image_height", in.height);
    s.finish();
    cfg.rig.tilt = deg2rad(tilt_deg);
  }
  {
    Section s(top.child("controller"), "controller", origin);
    ControllerParams& c = cfg.nav.controller;
    s.get("lambda", c.lambda);
    s.get("v_star", c.v_star);
    s.get("omega_max", c.omega_max);
    s.get("weight_x", c.weight_x);
    s.get("weight_theta", c.weight_theta);
    s.finish();
  }
  {
    Section s(top.child("perception"), "perception", origin);
    PerceptionParams& p = cfg.nav.perception;
    s.get("exg_threshold", p.exg_threshold);
    s.get("min_blob_area", p.min_blob_area);
    s.get("window_width_fraction", p.window_width_fraction);
    s.finish();
  }
  {
    const YAML::Node n = top.child("navigator");
    Section s(n, "navigator", origin);
    std::string side = to_string(cfg.nav.initial_side);
    s.get("delta", cfg.nav.delta);
    s.get("debounce_frames", cfg.nav.debounce_frames);
    s.get("entry_timeout_frames", cfg.nav.entry_timeout_frames);
    s.get("initial_side", side);
    s.finish();
    checked(origin, n, [&] { cfg.nav.initial_side = side_from_string(side); });
  }
  {
    Section s(top.child("sim"), "sim", origin);
    SimConfig& m = cfg.sim;
    double tilt_error_deg = rad2deg(m.tilt_error);
    s.get("dt", m.dt);
    s.get("control_period", m.control_period);
    s.get("max_sim_time", m.max_sim_time);
    s.get("actuation_noise_v", m.actuation_noise_v);
    s.get("actuation_noise_omega", m.actuation_noise_omega);
    s.get("tilt_error_deg", tilt_error_deg);
    s.get("delta_error", m.delta_error);
    s.get("seed", m.seed);
    s.get("start_standoff", m.start_standoff);
    s.get("pixel_noise_std", cfg.pixel_noise_std);
    s.finish();
    m.tilt_error = deg2rad(tilt_error_deg);
  }
  {
    Section s(top.child("output"), "output", origin);
    s.get("dir", cfg.output_dir);
    s.get("svg", cfg.svg);
    s.finish();
  }
  top.finish();

  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_run_config(ss.str(), path, dir.empty() ? "." : dir.string());
}

void validate(const RunConfig& cfg) {
  try {
    if (!cfg.field_path) cfg.field_spec.validate();
    cfg.rig.validate();
    cfg.rig.intrinsics.validate();
    cfg.nav.validate();
    cfg.sim.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (cfg.field_path) {
    if (!std::filesystem::exists(*cfg.field_path)) throw ConfigError("field file not found: " + *cfg.field_path);
    if (cfg.sim.delta_error != 0.0) throw ConfigError("sim.delta_error requires a generated field");
  }
  if (cfg.rig.tilt + cfg.sim.tilt_error <= 0.0 || cfg.rig.tilt + cfg.sim.tilt_error > kPi / 2.0 + 1e-12)
    throw ConfigError("camera.tilt_deg + sim.tilt_error_deg must lie in (0, 90]");
  if (!(cfg.pixel_noise_std >= 0.0)) throw ConfigError("sim.pixel_noise_std must be >= 0");
  if (cfg.output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json field = field_spec_to_json(cfg.field_spec);
  if (cfg.field_path) field["path"] = *cfg.field_path;
  const CameraIntrinsics& in = cfg.rig.intrinsics;
  const ControllerParams& c = cfg.nav.controller;
  const PerceptionParams& p = cfg.nav.perception;
  const SimConfig& m = cfg.sim;
  return {
      {"field", field},
      {"camera",
       {{"tilt_deg", rad2deg(cfg.rig.tilt)},
        {"mount_height", cfg.rig.height},
        {"longitudinal_offset", cfg.rig.longitudinal_offset},
        {"fx", in.fx},
        {"fy", in.fy},
        {"cx", in.cx},
        {"cy", in.cy},
        {"image_width", in.width},
        {"image_height", in.height}}},
      {"controller",
       {{"lambda", c.lambda},
        {"v_star", c.v_star},
        {"omega_max", c.omega_max},
        {"weight_x", c.weight_x},
        {"weight_theta", c.weight_theta}}},
      {"perception",
       {{"exg_threshold", p.exg_threshold},
        {"min_blob_area", p.min_blob_area},
        {"window_width_fraction", p.window_width_fraction}}},
      {"navigator",
       {{"delta", cfg.nav.delta},
        {"debounce_frames", cfg.nav.debounce_frames},
        {"entry_timeout_frames", cfg.nav.entry_timeout_frames},
        {"initial_side", to_string(cfg.nav.initial_side)}}},
      {"sim",
       {{"dt", m.dt},
        {"control_period", m.control_period},
        {"max_sim_time", m.max_sim_time},
        {"actuation_noise_v", m.actuation_noise_v},
        {"actuation_noise_omega", m.actuation_noise_omega},
        {"tilt_error_deg", rad2deg(m.tilt_error)},
        {"delta_error", m.delta_error},
        {"seed", m.seed},
        {"start_standoff", m.start_standoff},
        {"pixel_noise_std", cfg.pixel_noise_std}}},
      {"output", {{"dir", cfg.output_dir}, {"svg", cfg.svg}}},
  };
}

Field build_field(const RunConfig& cfg) {
  if (cfg.field_path) {
    std::ifstream in(*cfg.field_path);
    if (!in) throw ConfigError("cannot open field file: " + *cfg.field_path);
    try {
      return field_from_json(nlohmann::json::parse(in));
    } catch (const std::exception& e) {
      throw ConfigError(*cfg.field_path + ": " + e.what());
    }
  }
  FieldSpec spec = cfg.field_spec;
  spec.spacing_mean += cfg.sim.delta_error;
  try {
    return generate_field(spec);
  } catch (const FieldSpecError& e) {
    throw ConfigError(e.what());
  }
}

Scenario build_scenario(const RunConfig& cfg) {
  Scenario sc;
  sc.field = build_field(cfg);
  sc.rig_front = cfg.rig;
  sc.nav = cfg.nav;
  sc.sim = cfg.sim;
  sc.render.noise_std = cfg.pixel_noise_std;
  return sc;
}

}  // namespace rownav
