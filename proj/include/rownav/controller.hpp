#pragma once

#include "rownav/geometry.hpp"
#include "rownav/perception.hpp"

#include <Eigen/Core>

#include <stdexcept>

namespace rownav {

class DegenerateDepthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateJacobianError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ControllerParams {
  double lambda = 3.0;     // feedback gain [1/s], > 0
  double v_star = 0.4;     // constant forward speed [m/s]
  double omega_max = 1.5;  // [rad/s]
  double weight_x = 3.0;   // weight of the X error, in normalized image units
  double weight_theta = 1.0;

  void validate() const;
};

/// Rows X, Y, Theta of ds/dt = L u_c, in pixel (X, Y) and radian (Theta) units.
using InteractionMatrix = Eigen::Matrix<double, 3, 6>;

/// Feature rates per unit v (column 0) and unit omega (column 1) for the regulated
/// rows (X in normalized units, Theta), weights applied.
struct Jacobians {
  Eigen::Vector2d J_v;
  Eigen::Vector2d J_omega;
};

/// Point rows use the ground-plane depth of the feature point; the Theta row is
/// the orientation dynamics of an image line whose 3-D support lies on the ground.
/// Throws DegenerateDepthError when the point does not backproject in front of the camera.
InteractionMatrix interaction_matrix(const FeatureVec& s, const CameraRig& rig, const Pose2& robot,
                                     const CameraIntrinsics& intr);

/// Full 3x2 map from [v, omega] to [dX, dY, dTheta].
Eigen::Matrix<double, 3, 2> feature_jacobian(const FeatureVec& s, const CameraRig& rig, const Pose2& robot,
                                             const CameraIntrinsics& intr);

Jacobians regulated_jacobians(const FeatureVec& s, const ControllerParams& params, const CameraRig& rig,
                              const Pose2& robot, const CameraIntrinsics& intr);

/// omega = -pinv(J_omega) (lambda e + J_v v), clamped to omega_max, with v = drive_sign * v_star.
/// Throws DegenerateJacobianError when |J_omega| < 1e-9.
ControlVec control_step(const FeatureVec& s, const FeatureVec& s_star, const ControllerParams& params,
                        const CameraRig& rig, const Pose2& robot, const CameraIntrinsics& intr,
                        double drive_sign = 1.0);

/// Unclamped law for given Jacobians and weighted error; exposed for algebraic tests.
double servo_omega(const Jacobians& j, const Eigen::Vector2d& weighted_error, double lambda, double v);

}  // namespace rownav
