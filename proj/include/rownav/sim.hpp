#pragma once

#include "rownav/field.hpp"
#include "rownav/geometry.hpp"
#include "rownav/navigator.hpp"
#include "rownav/render.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace rownav {

struct SimConfig {
  double dt = 0.01;              // integration step [s]
  double control_period = 0.1;   // [s]
  double max_sim_time = 900.0;   // [s]
  double actuation_noise_v = 0.0;      // std [m/s]
  double actuation_noise_omega = 0.0;  // std [rad/s]
  double tilt_error = 0.0;   // actual minus assumed camera tilt [rad]
  double delta_error = 0.0;  // actual minus assumed row spacing [m]
  std::uint64_t seed = 1;
  /// Distance of the start pose behind the first plant of the first row [m].
  double start_standoff = 1.0;

  void validate() const;
};

struct TrajectorySample {
  double t = 0.0;
  Pose2 pose;
  ControlVec control;
  NavPhase phase = NavPhase::following;
  Mount primary_cam = Mount::front;
  /// Controller error this frame (X in px, Theta in rad), when a feature was measured.
  std::optional<double> error_x;
  std::optional<double> error_theta;
};

using Trajectory = std::vector<TrajectorySample>;

/// Exact unicycle integration over dt (arc for omega != 0, line for |omega| < 1e-9).
Pose2 integrate_kinematics(const Pose2& pose, const ControlVec& u, double dt);

/// Everything a closed-loop run needs. The rigs are the values the navigator
/// assumes; the cameras that render the scene use tilt + tilt_error.
struct Scenario {
  Field field;
  CameraRig rig_front;  // assumed front rig; the back rig is its mirror image
  NavigatorParams nav;
  SimConfig sim;
  RenderOptions render;
  std::optional<Pose2> start_pose;
};

struct ScenarioResult {
  Trajectory trajectory;
  std::vector<NavEvent> events;
  bool done = false;
  bool timed_out = false;
  int frames = 0;
  NavState final_state;
};

/// Called once per control frame with the rendered views and the navigator output.
using FrameObserver =
    std::function<void(int frame, const RgbImage& front, const RgbImage& back, const NavStepResult& step)>;

/// Default start: start_standoff behind the first row's first centerline point, heading along the row.
Pose2 default_start_pose(const Field& field, double standoff);

/// Deterministic closed loop: render both cameras, navigate, integrate, record.
ScenarioResult run_scenario(const Scenario& scenario, const FrameObserver& observer = {});

}  // namespace rownav
