#include "rownav/navigator.hpp"

#include <array>
#include <stdexcept>

namespace rownav {

const char* to_string(NavPhase p) {
  switch (p) {
    case NavPhase::following: return "following";
    case NavPhase::exiting: return "exiting";
    case NavPhase::entering: return "entering";
    case NavPhase::done: return "done";
  }
  return "?";
}

const char* to_string(NavEventKind k) {
  switch (k) {
    case NavEventKind::row_end_reached: return "row_end_reached";
    case NavEventKind::camera_switched: return "camera_switched";
    case NavEventKind::window_shifted: return "window_shifted";
    case NavEventKind::row_entered: return "row_entered";
    case NavEventKind::navigation_done: return "navigation_done";
  }
  return "?";
}

void NavigatorParams::validate() const {
  controller.validate();
  if (!(delta > 0.0)) throw std::invalid_argument("navigator: delta must be > 0");
  if (debounce_frames < 1) throw std::invalid_argument("navigator: debounce_frames must be >= 1");
  if (entry_timeout_frames < 1) throw std::invalid_argument("navigator: entry_timeout_frames must be >= 1");
  if (!(perception.window_width_fraction > 0.0 && perception.window_width_fraction <= 1.0))
    throw std::invalid_argument("navigator: window_width_fraction must be in (0, 1]");
  if (perception.min_blob_area < 1) throw std::invalid_argument("navigator: min_blob_area must be >= 1");
}

double drive_sign(const NavState& state) {
  if (state.phase == NavPhase::done) return 0.0;
  const double toward_view = state.primary_cam == Mount::front ? 1.0 : -1.0;
  return state.phase == NavPhase::exiting ? -toward_view : toward_view;
}

NavState start_navigation(const CameraRig& rig_front, const CameraIntrinsics& intr, Side initial_side,
                          double window_width_fraction) {
  (void)rig_front;
  NavState s;
  s.primary_cam = Mount::front;
  s.window = initialize_window(intr, window_width_fraction);
  s.phase = NavPhase::following;
  s.next_row_side = initial_side;
  return s;
}

NavState turn_bookkeeping(const NavState& state) {
  NavState s = state;
  ++s.rows_completed;
  s.next_row_side = opposite(s.next_row_side);
  return s;
}

namespace {

ControlVec straight(const NavState& s, const ControllerParams& p) { return {drive_sign(s) * p.v_star, 0.0}; }

}  // namespace

NavStepResult nav_step(const NavState& state, const CropSource& detect, const CameraRig& rig_front,
                       const CameraRig& rig_back, const Pose2& robot, const NavigatorParams& params,
                       double sim_time) {
  if (state.phase == NavPhase::done) throw std::logic_error("nav_step: navigation already done");
  NavStepResult out;
  NavState& s = out.state;
  s = state;
  const auto rig_of = [&](Mount m) -> const CameraRig& { return m == Mount::front ? rig_front : rig_back; };
  const auto emit = [&](NavEventKind k) { out.events.push_back({k, sim_time}); };

  std::vector<CropDetection> crops_p = detect(s.primary_cam, s.window);
  std::vector<CropDetection> crops_w = crops_in_window(crops_p, s.window);

  if (crops_w.empty()) {
    ++s.empty_frames;
    if (s.phase == NavPhase::entering) {
      // The shifted window has not picked up the next row yet.
      ++s.entering_frames;
      if (s.entering_frames >= params.entry_timeout_frames &&
          detect(other(s.primary_cam), s.window).empty()) {
        s.phase = NavPhase::done;
        ++s.rows_completed;
        emit(NavEventKind::navigation_done);
        out.control = {};
        return out;
      }
      out.control = straight(s, params.controller);
      return out;
    }
    if (s.empty_frames < params.debounce_frames) {
      // Single-frame dropouts (plant gaps) are bridged by driving straight.
      out.control = straight(s, params.controller);
      return out;
    }
    emit(NavEventKind::row_end_reached);
    s.empty_frames = 0;
    if (detect(other(s.primary_cam), s.window).empty()) {
      // Enter next row: shift the window toward the next row.
      const double travel = -(s.primary_cam == Mount::front ? 1.0 : -1.0);  // exit travel, away from view
      const Side robot_side = travel > 0.0 ? s.next_row_side : opposite(s.next_row_side);
      s.window = shift_window(s.window, rig_of(s.primary_cam), robot, params.delta, robot_side);
      s.phase = NavPhase::entering;
      s.entering_frames = 0;
      emit(NavEventKind::window_shifted);
    } else {
      // Exit row: hand the control over to the camera that still sees the row.
      s.primary_cam = other(s.primary_cam);
      s.window = initialize_window(rig_of(s.primary_cam).intrinsics, params.perception.window_width_fraction);
      s.phase = NavPhase::exiting;
      emit(NavEventKind::camera_switched);
      crops_p = detect(s.primary_cam, s.window);
    }
    crops_w = crops_in_window(crops_p, s.window);
  }

  if (crops_w.empty()) {
    out.control = straight(s, params.controller);
    return out;
  }

  if (s.phase == NavPhase::entering) {
    s.phase = NavPhase::following;
    s = turn_bookkeeping(s);
    emit(NavEventKind::row_entered);
  }
  s.empty_frames = 0;
  out.crops_in_window = crops_w.size();

  const CameraRig& rig = rig_of(s.primary_cam);
  const CameraIntrinsics& intr = rig.intrinsics;
  out.control = straight(s, params.controller);
  try {
    FeatureVec f;
    if (crops_w.size() >= 2) {
      f = feature_from_fit(fit_row_line(crops_w), crops_w, intr);
    } else {
      // A lone blob (often several merged far plants) fixes the point but not the orientation.
      f = {crops_w[0].centroid.u - intr.cx, crops_w[0].centroid.v - intr.cy, 0.0};
    }
    out.feature = f;
    out.control = control_step(f, desired_feature(intr), params.controller, rig, robot, intr, drive_sign(s));
  } catch (const DegenerateDepthError&) {
  } catch (const DegenerateJacobianError&) {
  } catch (const PerceptionError&) {
  }
  s.window = update_window(s.window, crops_w, intr);
  return out;
}

NavStepResult nav_step(const NavState& state, const RgbImage& front_img, const RgbImage& back_img,
                       const CameraRig& rig_front, const CameraRig& rig_back, const Pose2& robot,
                       const NavigatorParams& params, double sim_time) {
  std::array<std::optional<std::vector<CropDetection>>, 2> cache;
  const CropSource source = [&](Mount cam, const SlidingWindow&) {
    auto& slot = cache[cam == Mount::front ? 0 : 1];
    if (!slot) slot = detect_crops_in_image(cam == Mount::front ? front_img : back_img, params.perception);
    return *slot;
  };
  return nav_step(state, source, rig_front, rig_back, robot, params, sim_time);
}

}  // namespace rownav
