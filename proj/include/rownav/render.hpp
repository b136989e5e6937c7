#pragma once

#include "rownav/field.hpp"
#include "rownav/geometry.hpp"
#include "rownav/image.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace rownav {

inline constexpr Rgb kSoilColor{120, 85, 60};
inline constexpr Rgb kPlantColor{40, 170, 50};

/// Samples on the canopy boundary used to build each plant polygon.
inline constexpr int kCanopySamples = 16;
/// Points closer than this to the image plane are dropped [m].
inline constexpr double kNearClip = 0.05;

struct RenderOptions {
  Rgb soil = kSoilColor;
  Rgb plant = kPlantColor;
  /// Per-channel Gaussian noise (8-bit units); 0 disables noise.
  double noise_std = 0.0;
  std::uint64_t noise_seed = 0;
};

/// Projected canopy of one plant, ready for rasterization.
struct PlantPolygon {
  std::vector<PixelPoint> hull;  // convex, counter-clockwise in (u, v)
  double depth = 0.0;            // camera-frame z of the plant center
  double min_v = 0.0, max_v = 0.0, min_u = 0.0, max_u = 0.0;
};

/// Projects, clips, culls and depth-sorts (far to near) the plants visible from the camera.
std::vector<PlantPolygon> visible_plant_polygons(const CameraRig& rig, const Pose2& robot, const Field& field);

/// Pixel-center inclusion test shared by every rasterizer.
bool polygon_covers(const PlantPolygon& poly, double u, double v);

/// Synthetic camera frame. Rows are rasterized in parallel (OpenMP); the result
/// is bit-identical to render_view_serial.
RgbImage render_view(const CameraRig& rig, const Pose2& robot, const Field& field, const RenderOptions& opts = {});

/// Reference rasterizer: one polygon at a time over its bounding box.
RgbImage render_view_serial(const CameraRig& rig, const Pose2& robot, const Field& field,
                            const RenderOptions& opts = {});

}  // namespace rownav
