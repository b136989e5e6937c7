#include "rownav/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace rownav {

double normalize_angle(double a) {
  if (!std::isfinite(a)) return a;
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw GeometryError("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw GeometryError("intrinsics: image size must be positive");
  if (!(cx > 0.0 && cx < width && cy > 0.0 && cy < height))
    throw GeometryError("intrinsics: principal point must lie inside the image");
}

void CameraRig::validate() const {
  intrinsics.validate();
  if (!(tilt > 0.0 && tilt <= kPi / 2.0)) throw GeometryError("rig: tilt must be in (0, pi/2]");
  if (!(height > 0.0)) throw GeometryError("rig: height must be positive");
  if (mount == Mount::front && longitudinal_offset < 0.0)
    throw GeometryError("rig: front camera offset must be >= 0");
  if (mount == Mount::back && longitudinal_offset > 0.0)
    throw GeometryError("rig: back camera offset must be <= 0");
}

Eigen::Matrix3d CameraRig::rotation_robot_camera() const {
  const double c = std::cos(tilt);
  const double s = std::sin(tilt);
  // Front camera: optical axis forward and down, image down = backward/down, image right = -y.
  Eigen::Matrix3d r;
  r.col(0) = Eigen::Vector3d(0.0, -1.0, 0.0);
  r.col(1) = Eigen::Vector3d(-s, 0.0, -c);
  r.col(2) = Eigen::Vector3d(c, 0.0, -s);
  if (mount == Mount::back) {
    // Half turn about the robot z axis.
    r.row(0) *= -1.0;
    r.row(1) *= -1.0;
  }
  return r;
}

Eigen::Vector3d CameraRig::position_in_robot() const {
  return {longitudinal_offset, 0.0, height};
}

CameraRig mirrored_rig(const CameraRig& front) {
  CameraRig back = front;
  back.mount = front.mount == Mount::front ? Mount::back : Mount::front;
  back.longitudinal_offset = -front.longitudinal_offset;
  return back;
}

CameraPoint3 world_to_camera(const CameraRig& rig, const Pose2& robot, const GroundPoint& p) {
  const double c = std::cos(robot.theta);
  const double s = std::sin(robot.theta);
  const double dx = p.x - robot.x;
  const double dy = p.y - robot.y;
  const Eigen::Vector3d in_robot(c * dx + s * dy, -s * dx + c * dy, 0.0);
  return rig.rotation_robot_camera().transpose() * (in_robot - rig.position_in_robot());
}

PixelPoint project(const CameraIntrinsics& intr, const CameraPoint3& pc) {
  if (!(pc.z() > 0.0)) throw GeometryError("project: point behind the camera");
  return {intr.fx * pc.x() / pc.z() + intr.cx, intr.fy * pc.y() / pc.z() + intr.cy};
}

GroundPoint backproject_to_ground(const CameraRig& rig, const Pose2& robot, const PixelPoint& px) {
  const auto& k = rig.intrinsics;
  const Eigen::Vector3d ray_c((px.u - k.cx) / k.fx, (px.v - k.cy) / k.fy, 1.0);
  const Eigen::Vector3d ray_r = rig.rotation_robot_camera() * ray_c;
  const Eigen::Vector3d origin = rig.position_in_robot();
  if (ray_r.z() >= -1e-12) throw GeometryError("backproject: ray does not reach the ground");
  const double t = -origin.z() / ray_r.z();
  const Eigen::Vector3d hit = origin + t * ray_r;
  const double c = std::cos(robot.theta);
  const double s = std::sin(robot.theta);
  return {robot.x + c * hit.x() - s * hit.y(), robot.y + s * hit.x() + c * hit.y()};
}

Eigen::Matrix<double, 6, 2> robot_to_camera_velocity_map(const CameraRig& rig) {
  const Eigen::Matrix3d rt = rig.rotation_robot_camera().transpose();
  const Eigen::Vector3d t = rig.position_in_robot();
  Eigen::Matrix<double, 6, 2> m;
  // Unit forward speed: pure translation along robot x.
  m.col(0).head<3>() = rt * Eigen::Vector3d::UnitX();
  m.col(0).tail<3>().setZero();
  // Unit yaw rate about the rotation center: v_cam = z x t, w_cam = z.
  m.col(1).head<3>() = rt * Eigen::Vector3d::UnitZ().cross(t);
  m.col(1).tail<3>() = rt * Eigen::Vector3d::UnitZ();
  return m;
}

CameraTwist6 camera_twist_of_robot(const CameraRig& rig, const ControlVec& u) {
  return robot_to_camera_velocity_map(rig) * Eigen::Vector2d(u.v, u.omega);
}

}  // namespace rownav
