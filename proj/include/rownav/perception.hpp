#pragma once

#include "rownav/geometry.hpp"
#include "rownav/image.hpp"

#include <stdexcept>
#include <vector>

namespace rownav {

class PerceptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PerceptionParams {
  int exg_threshold = 40;
  int min_blob_area = 4;
  /// Default sliding-window width as a fraction of the image width.
  double window_width_fraction = 0.35;
};

struct CropDetection {
  PixelPoint centroid;
  int area = 0;
};

/// Vertical image strip spanning the full image height.
struct SlidingWindow {
  double center_x = 0.0;
  double width = 0.0;
};

/// Robust line through crop centroids, in pixel coordinates.
struct LineFit {
  PixelPoint point;             // weighted centroid of the inliers
  PixelPoint direction;         // unit vector, pointing up the image (dv <= 0)
  std::vector<double> weights;  // final IRLS weights, one per input detection
  std::vector<bool> inliers;    // weight > 0.5
  int iterations = 0;
};

/// Image feature s = [X, Y, Theta].
///
/// X, Y are pixel offsets of the first path point from the principal point
/// (right and down positive). Theta is the angle between the path tangent and
/// the image vertical, positive when the tangent leans right going up.
struct FeatureVec {
  double X = 0.0;
  double Y = 0.0;
  double Theta = 0.0;
};

/// Desired feature: path point at the bottom center, tangent vertical.
inline FeatureVec desired_feature(const CameraIntrinsics& intr) { return {0.0, intr.height / 2.0, 0.0}; }

/// Excess-green mask: bit set iff 2G - R - B > threshold. Parallel over rows.
BinaryMask exg_mask(const RgbImage& img, int threshold);
/// Reference per-pixel implementation of exg_mask.
BinaryMask exg_mask_serial(const RgbImage& img, int threshold);

/// 4-connected components with at least min_blob_area pixels, sorted near to far
/// (descending v, then ascending u).
std::vector<CropDetection> detect_crops(const BinaryMask& mask, int min_blob_area);

/// Detections whose centroid u lies inside the window (bounds inclusive); order preserved.
std::vector<CropDetection> crops_in_window(const std::vector<CropDetection>& dets, const SlidingWindow& win);

/// Total least squares, IRLS with bisquare weights started from a repeated-median line. Throws PerceptionError for fewer than two detections.
LineFit fit_row_line(const std::vector<CropDetection>& dets);

/// Path feature at the image row of the bottom-most inlier detection.
FeatureVec feature_from_fit(const LineFit& fit, const std::vector<CropDetection>& dets,
                            const CameraIntrinsics& intr);

SlidingWindow initialize_window(const CameraIntrinsics& intr, double width_fraction = 0.35);

/// Recenters the window on the mean centroid u of `dets_in_win`, clamped to the image.
SlidingWindow update_window(const SlidingWindow& win, const std::vector<CropDetection>& dets_in_win,
                            const CameraIntrinsics& intr);

enum class Side { left, right };

inline const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }
inline Side opposite(Side s) { return s == Side::left ? Side::right : Side::left; }

/// Moves the window by the image displacement of a ground offset of `delta`
/// meters perpendicular to the robot heading, toward `side` of the robot.
SlidingWindow shift_window(const SlidingWindow& win, const CameraRig& rig, const Pose2& robot, double delta,
                           Side side);

/// exg_mask followed by detect_crops.
std::vector<CropDetection> detect_crops_in_image(const RgbImage& img, const PerceptionParams& params);

}  // namespace rownav
