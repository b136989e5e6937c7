#include "rownav/sim.hpp"

#include "rownav/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rownav {

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be > 0");
  if (!(dt <= control_period)) throw std::invalid_argument("sim: dt must be <= control_period");
  if (!(max_sim_time > 0.0)) throw std::invalid_argument("sim: max_sim_time must be > 0");
  if (!(actuation_noise_v >= 0.0 && actuation_noise_omega >= 0.0))
    throw std::invalid_argument("sim: actuation noise must be >= 0");
  if (!(start_standoff >= 0.0)) throw std::invalid_argument("sim: start_standoff must be >= 0");
}

Pose2 integrate_kinematics(const Pose2& pose, const ControlVec& u, double dt) {
  const double th = pose.theta;
  if (std::abs(u.omega) < 1e-9) {
    return Pose2(pose.x + u.v * std::cos(th) * dt, pose.y + u.v * std::sin(th) * dt, th);
  }
  const double th1 = th + u.omega * dt;
  const double r = u.v / u.omega;
  return Pose2(pose.x + r * (std::sin(th1) - std::sin(th)), pose.y - r * (std::cos(th1) - std::cos(th)), th1);
}

Pose2 default_start_pose(const Field& field, double standoff) {
  if (field.rows.empty()) throw std::invalid_argument("start pose: empty field");
  const CropRow& row = field.rows.front();
  const GroundPoint p = row.point_at(0.0);
  const GroundPoint t = row.tangent_at(0.0);
  return Pose2(p.x - standoff * t.x, p.y - standoff * t.y, std::atan2(t.y, t.x));
}

ScenarioResult run_scenario(const Scenario& sc, const FrameObserver& observer) {
  if (sc.field.rows.empty()) throw std::invalid_argument("run_scenario: empty field");
  sc.sim.validate();
  sc.nav.validate();
  sc.rig_front.validate();

  const CameraRig assumed_front = sc.rig_front;
  const CameraRig assumed_back = mirrored_rig(assumed_front);
  CameraRig actual_front = assumed_front;
  actual_front.tilt = std::clamp(assumed_front.tilt + sc.sim.tilt_error, 1e-3, kPi / 2.0);
  const CameraRig actual_back = mirrored_rig(actual_front);

  const int substeps = std::max(1, static_cast<int>(std::lround(sc.sim.control_period / sc.sim.dt)));
  const double dt = sc.sim.control_period / substeps;
  const auto max_frames = static_cast<long>(std::floor(sc.sim.max_sim_time / sc.sim.control_period + 1e-9));

  Rng noise(sc.sim.seed);
  ScenarioResult res;
  Pose2 pose = sc.start_pose.value_or(default_start_pose(sc.field, sc.sim.start_standoff));
  NavState state = start_navigation(assumed_front, assumed_front.intrinsics, sc.nav.initial_side,
                                    sc.nav.perception.window_width_fraction);

  RenderOptions render = sc.render;
  for (long frame = 0; frame < max_frames; ++frame) {
    const double t = frame * sc.sim.control_period;
    render.noise_seed = Rng::splitmix64(sc.sim.seed ^ static_cast<std::uint64_t>(frame));
    const RgbImage front = render_view(actual_front, pose, sc.field, render);
    render.noise_seed ^= 0x5bd1e995ULL;
    const RgbImage back = render_view(actual_back, pose, sc.field, render);

    NavStepResult step = nav_step(state, front, back, assumed_front, assumed_back, pose, sc.nav, t);
    if (observer) observer(static_cast<int>(frame), front, back, step);
    state = step.state;
    res.events.insert(res.events.end(), step.events.begin(), step.events.end());

    ControlVec u = step.control;
    if (state.phase != NavPhase::done) {
      if (sc.sim.actuation_noise_v > 0.0)
        u.v += std::clamp(noise.normal(), -3.0, 3.0) * sc.sim.actuation_noise_v;
      if (sc.sim.actuation_noise_omega > 0.0)
        u.omega += std::clamp(noise.normal(), -3.0, 3.0) * sc.sim.actuation_noise_omega;
    }

    TrajectorySample sample;
    sample.t = t;
    sample.pose = pose;
    sample.control = u;
    sample.phase = state.phase;
    sample.primary_cam = state.primary_cam;
    if (step.feature) {
      const FeatureVec goal = desired_feature(assumed_front.intrinsics);
      sample.error_x = step.feature->X - goal.X;
      sample.error_theta = step.feature->Theta - goal.Theta;
    }
    res.trajectory.push_back(sample);
    ++res.frames;

    if (state.phase == NavPhase::done) {
      res.done = true;
      break;
    }
    for (int i = 0; i < substeps; ++i) pose = integrate_kinematics(pose, u, dt);
  }
  if (!res.done) {
    res.timed_out = true;
    TrajectorySample last;
    last.t = max_frames * sc.sim.control_period;
    last.pose = pose;
    last.phase = state.phase;
    last.primary_cam = state.primary_cam;
    if (res.trajectory.empty() || last.t > res.trajectory.back().t) res.trajectory.push_back(last);
  }
  res.final_state = state;
  return res;
}

}  // namespace rownav
