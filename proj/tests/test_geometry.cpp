#include "rownav/geometry.hpp"
#include "rownav/rng.hpp"
#include "rownav/sim.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>

using namespace rownav;

namespace {

CameraRig nadir_rig(double offset = 0.3, double height = 1.0) {
  CameraRig r;
  r.tilt = kPi / 2.0;
  r.height = height;
  r.longitudinal_offset = offset;
  return r;
}

// World -> camera as an explicit 4x4 chain, written without the library helpers.
Eigen::Matrix4d world_from_robot(const Pose2& q) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t(0, 0) = std::cos(q.theta);
  t(0, 1) = -std::sin(q.theta);
  t(1, 0) = std::sin(q.theta);
  t(1, 1) = std::cos(q.theta);
  t(0, 3) = q.x;
  t(1, 3) = q.y;
  return t;
}

Eigen::Matrix4d robot_from_camera(double tilt, double offset, double height, bool back) {
  // Start looking along robot +x with image right = -y, image down = -z, then pitch down by tilt.
  Eigen::Matrix3d level;
  level << 0, 0, 1,
          -1, 0, 0,
           0, -1, 0;
  const Eigen::Matrix3d pitch = Eigen::AngleAxisd(-tilt, Eigen::Vector3d::UnitX()).toRotationMatrix();
  Eigen::Matrix3d r = level * pitch;
  if (back) r = Eigen::AngleAxisd(kPi, Eigen::Vector3d::UnitZ()).toRotationMatrix() * r;
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t.topLeftCorner<3, 3>() = r;
  t.topRightCorner<3, 1>() = Eigen::Vector3d(offset, 0.0, height);
  return t;
}

Eigen::Matrix4d world_from_camera(const CameraRig& rig, const Pose2& q) {
  return world_from_robot(q) *
         robot_from_camera(rig.tilt, rig.longitudinal_offset, rig.height, rig.mount == Mount::back);
}

}  // namespace

TEST(Geometry, NormalizeAngleRange) {
  EXPECT_DOUBLE_EQ(normalize_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(normalize_angle(-kPi), kPi);
  EXPECT_NEAR(normalize_angle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(normalize_angle(-0.5 - 4 * kPi), -0.5, 1e-12);
  EXPECT_DOUBLE_EQ(Pose2(0, 0, 2 * kPi + 0.25).theta, normalize_angle(0.25));
}

TEST(Geometry, PointUnderNadirCameraIsOnAxis) {
  const CameraPoint3 pc = world_to_camera(nadir_rig(), Pose2(0, 0, 0), {0.3, 0.0});
  EXPECT_NEAR(pc.x(), 0.0, 1e-12);
  EXPECT_NEAR(pc.y(), 0.0, 1e-12);
  EXPECT_NEAR(pc.z(), 1.0, 1e-12);
}

TEST(Geometry, LateralOffsetUnderNadirCamera) {
  // Robot-left maps to image-left (negative x).
  const CameraPoint3 pc = world_to_camera(nadir_rig(), Pose2(0, 0, 0), {0.3, 0.2});
  EXPECT_NEAR(pc.x(), -0.2, 1e-12);
  EXPECT_NEAR(pc.y(), 0.0, 1e-12);
  EXPECT_NEAR(pc.z(), 1.0, 1e-12);
}

TEST(Geometry, WorldToCameraMatchesHomogeneousChain) {
  Rng rng(7);
  for (const Mount m : {Mount::front, Mount::back}) {
    CameraRig rig;
    rig.tilt = deg2rad(75.0);
    if (m == Mount::back) rig = mirrored_rig(rig);
    const Pose2 q(1.0, 2.0, kPi / 2.0);
    const Eigen::Matrix4d cam_from_world = world_from_camera(rig, q).inverse();
    for (int i = 0; i < 50; ++i) {
      const GroundPoint p{rng.uniform(-5, 5), rng.uniform(-5, 5)};
      const Eigen::Vector4d h = cam_from_world * Eigen::Vector4d(p.x, p.y, 0.0, 1.0);
      const CameraPoint3 pc = world_to_camera(rig, q, p);
      EXPECT_NEAR((pc - h.head<3>()).norm(), 0.0, 1e-12);
    }
  }
}

TEST(Geometry, ProjectExamples) {
  CameraIntrinsics k;
  k.fx = k.fy = 300;
  k.cx = 160;
  k.cy = 120;
  PixelPoint p = project(k, {0, 0, 1});
  EXPECT_DOUBLE_EQ(p.u, 160);
  EXPECT_DOUBLE_EQ(p.v, 120);
  p = project(k, {0.1, 0, 1});
  EXPECT_DOUBLE_EQ(p.u, 190);
  p = project(k, {0.2, -0.1, 2});
  EXPECT_DOUBLE_EQ(p.u, 190);
  EXPECT_DOUBLE_EQ(p.v, 105);
  EXPECT_THROW(project(k, {0, 0, 0}), GeometryError);
  EXPECT_THROW(project(k, {0, 0, -1}), GeometryError);
}

TEST(Geometry, BackprojectExamples) {
  const CameraRig down = nadir_rig(0.3, 1.0);
  const GroundPoint g = backproject_to_ground(down, Pose2(0, 0, 0), {down.intrinsics.cx, down.intrinsics.cy});
  EXPECT_NEAR(g.x, 0.3, 1e-12);
  EXPECT_NEAR(g.y, 0.0, 1e-12);

  CameraRig r45 = down;
  r45.tilt = deg2rad(45.0);
  const GroundPoint h = backproject_to_ground(r45, Pose2(0, 0, 0), {r45.intrinsics.cx, r45.intrinsics.cy});
  EXPECT_NEAR(h.x - 0.3, 1.0, 1e-12);
  EXPECT_NEAR(h.y, 0.0, 1e-12);
}

TEST(Geometry, BackprojectRejectsSkyRays) {
  CameraRig r;
  r.tilt = deg2rad(10.0);  // top rows look above the horizon
  EXPECT_THROW(backproject_to_ground(r, Pose2(), {160, 0}), GeometryError);
}

TEST(Geometry, RoundTripWithinMicroPixel) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    CameraRig rig;
    rig.tilt = rng.uniform(deg2rad(40), kPi / 2);
    rig.height = rng.uniform(0.5, 2.0);
    rig.longitudinal_offset = rng.uniform(0.0, 0.6);
    if (trial % 2) rig = mirrored_rig(rig);
    const Pose2 q(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-kPi, kPi));
    const PixelPoint px{rng.uniform(0, 319), rng.uniform(0, 239)};
    const GroundPoint g = backproject_to_ground(rig, q, px);
    const PixelPoint back = project(rig.intrinsics, world_to_camera(rig, q, g));
    EXPECT_NEAR(back.u, px.u, 1e-6);
    EXPECT_NEAR(back.v, px.v, 1e-6);
  }
}

TEST(Geometry, FrontBackSymmetry) {
  Rng rng(5);
  CameraRig front;
  const CameraRig back = mirrored_rig(front);
  for (int i = 0; i < 50; ++i) {
    const Pose2 q(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-kPi, kPi));
    const Pose2 turned(q.x, q.y, q.theta + kPi);
    const GroundPoint g{q.x + rng.uniform(-2, 2), q.y + rng.uniform(-2, 2)};
    const CameraPoint3 a = world_to_camera(back, q, g);
    const CameraPoint3 b = world_to_camera(front, turned, g);
    EXPECT_NEAR((a - b).norm(), 0.0, 1e-9);
  }
}

TEST(Geometry, TwistExamples) {
  const CameraRig down = nadir_rig(0.3);
  EXPECT_EQ(camera_twist_of_robot(down, {0, 0}).norm(), 0.0);

  const CameraTwist6 fwd = camera_twist_of_robot(down, {0.7, 0});
  EXPECT_NEAR(fwd.head<3>().norm(), 0.7, 1e-12);
  // Forward motion under a nadir camera moves the camera toward image-up (-y).
  EXPECT_NEAR(fwd(1), -0.7, 1e-12);
  EXPECT_NEAR(fwd.tail<3>().norm(), 0.0, 1e-12);

  const CameraTwist6 turn = camera_twist_of_robot(down, {0, 0.8});
  EXPECT_NEAR(turn.head<3>().norm(), 0.3 * 0.8, 1e-12);
  EXPECT_NEAR(turn.tail<3>().norm(), 0.8, 1e-12);
}

TEST(Geometry, TwistIsLinear) {
  const CameraRig rig;
  const ControlVec a{0.3, -0.2}, b{-0.1, 0.9};
  const CameraTwist6 lhs = camera_twist_of_robot(rig, {2 * a.v - 3 * b.v, 2 * a.omega - 3 * b.omega});
  const CameraTwist6 rhs = 2 * camera_twist_of_robot(rig, a) - 3 * camera_twist_of_robot(rig, b);
  EXPECT_NEAR((lhs - rhs).norm(), 0.0, 1e-12);
}

TEST(Geometry, TwistMatchesDifferentiatedCameraPose) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    CameraRig rig;
    rig.tilt = rng.uniform(deg2rad(45), kPi / 2);
    rig.longitudinal_offset = rng.uniform(0.0, 0.5);
    if (trial % 2) rig = mirrored_rig(rig);
    const Pose2 q(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-kPi, kPi));
    const ControlVec u{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double h = 1e-5;
    const Eigen::Matrix4d t0 = world_from_camera(rig, q);
    const Eigen::Matrix4d tp = world_from_camera(rig, integrate_kinematics(q, u, h));
    const Eigen::Matrix4d tm = world_from_camera(rig, integrate_kinematics(q, {-u.v, -u.omega}, h));
    const Eigen::Matrix3d r0 = t0.topLeftCorner<3, 3>();
    const Eigen::Vector3d lin = r0.transpose() * (tp.topRightCorner<3, 1>() - tm.topRightCorner<3, 1>()) / (2 * h);
    const Eigen::Matrix3d skew = r0.transpose() * (tp.topLeftCorner<3, 3>() - tm.topLeftCorner<3, 3>()) / (2 * h);
    const Eigen::Vector3d ang(skew(2, 1), skew(0, 2), skew(1, 0));
    CameraTwist6 oracle;
    oracle << lin, ang;
    const CameraTwist6 tw = camera_twist_of_robot(rig, u);
    EXPECT_LE((tw - oracle).norm(), 1e-5 * std::max(1.0, oracle.norm()));
  }
}

TEST(Geometry, RigValidation) {
  CameraRig r;
  EXPECT_NO_THROW(r.validate());
  r.tilt = 0.0;
  EXPECT_THROW(r.validate(), GeometryError);
  r.tilt = 1.0;
  r.height = 0.0;
  EXPECT_THROW(r.validate(), GeometryError);
  CameraIntrinsics k;
  k.cx = 400;
  EXPECT_THROW(k.validate(), GeometryError);
}
