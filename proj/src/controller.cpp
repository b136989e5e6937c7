#include "rownav/controller.hpp"

#include <algorithm>
#include <cmath>

namespace rownav {

void ControllerParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("controller: lambda must be > 0");
  if (!(v_star >= 0.0)) throw std::invalid_argument("controller: v_star must be >= 0");
  if (!(omega_max > 0.0)) throw std::invalid_argument("controller: omega_max must be > 0");
  if (!(weight_x >= 0.0 && weight_theta >= 0.0)) throw std::invalid_argument("controller: weights must be >= 0");
}

InteractionMatrix interaction_matrix(const FeatureVec& s, const CameraRig& rig, const Pose2& robot,
                                     const CameraIntrinsics& intr) {
  const PixelPoint px{s.X + intr.cx, s.Y + intr.cy};
  CameraRig r = rig;
  r.intrinsics = intr;
  double Z = 0.0;
  try {
    Z = world_to_camera(r, robot, backproject_to_ground(r, robot, px)).z();
  } catch (const GeometryError& e) {
    throw DegenerateDepthError(std::string("interaction matrix: ") + e.what());
  }
  if (!(Z > 1e-6) || !std::isfinite(Z)) throw DegenerateDepthError("interaction matrix: feature at the horizon");

  const double x = s.X / intr.fx;
  const double y = s.Y / intr.fy;

  InteractionMatrix L;
  L.row(0) << -1.0 / Z, 0.0, x / Z, x * y, -(1.0 + x * x), y;
  L.row(1) << 0.0, -1.0 / Z, y / Z, 1.0 + y * y, -x * y, -x;
  L.row(0) *= intr.fx;
  L.row(1) *= intr.fy;

  // Line x cos(th) + y sin(th) = rho in normalized coordinates; th equals the
  // tangent angle from the vertical because the normal is (cos Theta, sin Theta).
  const double th = std::atan2(std::sin(s.Theta) / intr.fx, std::cos(s.Theta) / intr.fy);
  const double ct = std::cos(th);
  const double st = std::sin(th);
  const double rho = x * ct + y * st;
  // Ground plane A X + B Y + C Z + D = 0 in the camera frame.
  const Eigen::Vector3d n = r.rotation_robot_camera().transpose() * Eigen::Vector3d::UnitZ();
  const double D = r.height;
  const double lam = (n.x() * st - n.y() * ct) / D;
  Eigen::Matrix<double, 1, 6> Lth;
  Lth << lam * ct, lam * st, -lam * rho, -rho * ct, -rho * st, -1.0;
  // Chain rule from the normalized angle to the pixel angle.
  const double dpix = intr.fx * intr.fy / (intr.fx * intr.fx * st * st + intr.fy * intr.fy * ct * ct);
  L.row(2) = dpix * Lth;
  return L;
}

Eigen::Matrix<double, 3, 2> feature_jacobian(const FeatureVec& s, const CameraRig& rig, const Pose2& robot,
                                             const CameraIntrinsics& intr) {
  return interaction_matrix(s, rig, robot, intr) * robot_to_camera_velocity_map(rig);
}

Jacobians regulated_jacobians(const FeatureVec& s, const ControllerParams& params, const CameraRig& rig,
                              const Pose2& robot, const CameraIntrinsics& intr) {
  const auto J = feature_jacobian(s, rig, robot, intr);
  Jacobians out;
  out.J_v << params.weight_x * J(0, 0) / intr.fx, params.weight_theta * J(2, 0);
  out.J_omega << params.weight_x * J(0, 1) / intr.fx, params.weight_theta * J(2, 1);
  return out;
}

double servo_omega(const Jacobians& j, const Eigen::Vector2d& weighted_error, double lambda, double v) {
  const double nrm2 = j.J_omega.squaredNorm();
  if (!(std::sqrt(nrm2) >= 1e-9)) throw DegenerateJacobianError("control: J_omega vanishes");
  return -j.J_omega.dot(lambda * weighted_error + j.J_v * v) / nrm2;
}

ControlVec control_step(const FeatureVec& s, const FeatureVec& s_star, const ControllerParams& params,
                        const CameraRig& rig, const Pose2& robot, const CameraIntrinsics& intr,
                        double drive_sign) {
  const Jacobians j = regulated_jacobians(s, params, rig, robot, intr);
  const Eigen::Vector2d e(params.weight_x * (s.X - s_star.X) / intr.fx,
                          params.weight_theta * (s.Theta - s_star.Theta));
  const double v = (drive_sign < 0.0 ? -1.0 : 1.0) * params.v_star;
  const double w = servo_omega(j, e, params.lambda, v);
  return {v, std::clamp(w, -params.omega_max, params.omega_max)};
}

}  // namespace rownav
