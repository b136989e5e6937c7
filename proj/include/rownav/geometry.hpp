#pragma once

// Frames used throughout rownav:
//   world  : x, y on the ground plane, z up
//   robot  : x forward, y left, z up; origin at the rotation center on the ground
//   camera : +z along the optical axis, +x image right, +y image down
//   pixel  : (u, v), integer coordinates are pixel centers, v grows downward

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace rownav {

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Planar robot configuration q = [x, y, theta] in the world frame.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double theta_) : x(x_), y(y_), theta(normalize_angle(theta_)) {}
};

struct GroundPoint {
  double x = 0.0;
  double y = 0.0;
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};

using CameraPoint3 = Eigen::Vector3d;
/// Spatial velocity of a camera frame, expressed in that frame: [linear; angular].
using CameraTwist6 = Eigen::Matrix<double, 6, 1>;

struct CameraIntrinsics {
  double fx = 277.0;
  double fy = 277.0;
  double cx = 160.0;
  double cy = 120.0;
  int width = 320;
  int height = 240;

  /// Throws GeometryError when fx, fy or the principal point are out of range.
  void validate() const;
};

enum class Mount { front, back };

inline const char* to_string(Mount m) { return m == Mount::front ? "front" : "back"; }

/// A camera rigidly mounted on the robot's longitudinal axis.
///
/// `tilt` is the depression angle of the optical axis below the horizontal:
/// pi/2 looks straight down, smaller values look further ahead. The front
/// camera looks along +x of the robot, the back camera along -x. The offset is
/// signed (positive ahead of the rotation center).
struct CameraRig {
  Mount mount = Mount::front;
  double tilt = deg2rad(75.0);
  double height = 1.0;
  double longitudinal_offset = 0.35;
  CameraIntrinsics intrinsics{};

  void validate() const;

  /// Camera axes expressed in the robot frame (columns x_c, y_c, z_c).
  Eigen::Matrix3d rotation_robot_camera() const;
  /// Camera origin in the robot frame.
  Eigen::Vector3d position_in_robot() const;
};

/// Builds the back rig as the mirror image of `front` about the rotation center.
CameraRig mirrored_rig(const CameraRig& front);

/// Robot velocity command u = [v, omega].
struct ControlVec {
  double v = 0.0;
  double omega = 0.0;
};

CameraPoint3 world_to_camera(const CameraRig& rig, const Pose2& robot, const GroundPoint& p);

/// Pinhole projection; throws GeometryError when pc.z() <= 0.
PixelPoint project(const CameraIntrinsics& intr, const CameraPoint3& pc);

/// Intersects the viewing ray of `px` with the ground plane.
/// Throws GeometryError if the ray does not hit the ground in front of the camera.
GroundPoint backproject_to_ground(const CameraRig& rig, const Pose2& robot, const PixelPoint& px);

/// Camera spatial velocity produced by robot velocity u.
CameraTwist6 camera_twist_of_robot(const CameraRig& rig, const ControlVec& u);

/// The 6x2 map from [v, omega] to the camera twist (columns are the twists of unit v and unit omega).
Eigen::Matrix<double, 6, 2> robot_to_camera_velocity_map(const CameraRig& rig);

}  // namespace rownav
