#pragma once

#include "rownav/controller.hpp"
#include "rownav/geometry.hpp"
#include "rownav/image.hpp"
#include "rownav/perception.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace rownav {

enum class NavPhase { following, exiting, entering, done };

const char* to_string(NavPhase p);

enum class NavEventKind { row_end_reached, camera_switched, window_shifted, row_entered, navigation_done };

const char* to_string(NavEventKind k);

struct NavEvent {
  NavEventKind kind;
  double sim_time = 0.0;
};

struct NavigatorParams {
  PerceptionParams perception;
  ControllerParams controller;
  /// Assumed crop-row spacing used for the window shift [m].
  double delta = 0.5;
  /// Consecutive empty frames before a window is declared empty.
  int debounce_frames = 3;
  /// Empty frames tolerated after a shift before navigation stops.
  int entry_timeout_frames = 20;
  /// Side of the second row relative to the direction of travel when leaving the first row.
  Side initial_side = Side::right;

  void validate() const;
};

struct NavState {
  Mount primary_cam = Mount::front;
  SlidingWindow window;
  NavPhase phase = NavPhase::following;
  /// Relative to the direction of travel while exiting the current row.
  Side next_row_side = Side::right;
  int rows_completed = 0;
  int empty_frames = 0;
  int entering_frames = 0;

  friend bool operator==(const NavState& a, const NavState& b) {
    return a.primary_cam == b.primary_cam && a.window.center_x == b.window.center_x &&
           a.window.width == b.window.width && a.phase == b.phase && a.next_row_side == b.next_row_side &&
           a.rows_completed == b.rows_completed && a.empty_frames == b.empty_frames &&
           a.entering_frames == b.entering_frames;
  }
};

inline Mount other(Mount m) { return m == Mount::front ? Mount::back : Mount::front; }

/// +1 drives along robot +x, -1 along -x. Following and entering drive toward
/// the primary camera's view; exiting drives away from it.
double drive_sign(const NavState& state);

NavState start_navigation(const CameraRig& rig_front, const CameraIntrinsics& intr, Side initial_side,
                          double window_width_fraction = 0.35);

/// Bookkeeping after a row_entered event: one more row done, next turn goes the other way.
NavState turn_bookkeeping(const NavState& state);

struct NavStepResult {
  NavState state;
  ControlVec control;
  std::vector<NavEvent> events;
  /// Feature and error used by the controller this frame, when one was computed.
  std::optional<FeatureVec> feature;
  std::size_t crops_in_window = 0;
};

/// Crop detections for one camera in the current frame. The window argument is
/// the primary window at the time of the query (scripted sources use it to
/// place synthetic detections).
using CropSource = std::function<std::vector<CropDetection>(Mount cam, const SlidingWindow& window)>;

/// One control-loop iteration of the row navigation scheme on arbitrary detections.
NavStepResult nav_step(const NavState& state, const CropSource& detect, const CameraRig& rig_front,
                       const CameraRig& rig_back, const Pose2& robot, const NavigatorParams& params,
                       double sim_time);

/// Same, on rendered camera frames.
NavStepResult nav_step(const NavState& state, const RgbImage& front_img, const RgbImage& back_img,
                       const CameraRig& rig_front, const CameraRig& rig_back, const Pose2& robot,
                       const NavigatorParams& params, double sim_time);

}  // namespace rownav
