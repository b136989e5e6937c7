#pragma once

#include "rownav/geometry.hpp"

#include "json.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rownav {

class FieldSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Plant {
  GroundPoint position;
  double canopy_radius = 0.0;
};

/// Closest point of a centerline to a query point.
struct CenterlineProjection {
  double distance = 0.0;
  double arc_length = 0.0;  // along the centerline from its first sample
};

/// One crop row: plants ordered by arc length along a sampled centerline.
class CropRow {
 public:
  CropRow() = default;
  CropRow(std::vector<Plant> plants, std::vector<GroundPoint> centerline);

  const std::vector<Plant>& plants() const { return plants_; }
  const std::vector<GroundPoint>& centerline() const { return centerline_; }

  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  /// Point-to-polyline distance with bounding-box pruning of segment chunks.
  double distance_to(const GroundPoint& p) const;
  CenterlineProjection project(const GroundPoint& p) const;

  /// Position and unit tangent at arc length s (clamped to the row).
  GroundPoint point_at(double s) const;
  GroundPoint tangent_at(double s) const;

 private:
  struct Chunk {
    double min_x, min_y, max_x, max_y;
    std::size_t first, last;  // segment index range [first, last)
  };
  void build_index();

  std::vector<Plant> plants_;
  std::vector<GroundPoint> centerline_;
  std::vector<double> cumulative_;
  std::vector<Chunk> chunks_;
};

enum class FieldShape { straight, s_curve, parabola };

const char* to_string(FieldShape s);
FieldShape field_shape_from_string(const std::string& s);

struct FieldSpec {
  FieldShape shape = FieldShape::straight;
  int row_count = 8;
  double row_length = 20.0;
  double spacing_mean = 0.50;
  double spacing_std = 0.05;
  double plant_gap_min = 0.05;
  double plant_gap_max = 0.15;
  double canopy_radius_min = 0.03;
  double canopy_radius_max = 0.06;
  double lateral_jitter_std = 0.01;
  std::uint64_t seed = 42;

  /// Throws FieldSpecError naming the violated constraint.
  void validate() const;
};

/// Parallel crop rows, ordered left to right when looking along the rows.
struct Field {
  std::vector<CropRow> rows;
  double nominal_spacing = 0.5;

  std::size_t plant_count() const;
};

/// Amplitude of the s-curve base shape [m].
inline constexpr double kSCurveAmplitude = 1.5;
/// Sagitta of the parabola base shape [m].
inline constexpr double kParabolaSagitta = 2.0;
/// Centerline sampling step [m].
inline constexpr double kCenterlineStep = 0.05;
/// Plants never sit further than this from their centerline [m].
inline constexpr double kMaxPlantOffset = 0.025;

Field generate_field(const FieldSpec& spec);

struct RowDistance {
  std::size_t row_index = 0;
  double distance = 0.0;
};

/// Closest row centerline to p. Requires a non-empty field.
RowDistance nearest_row_distance(const Field& field, const GroundPoint& p);

nlohmann::json field_to_json(const Field& field);
Field field_from_json(const nlohmann::json& j);

nlohmann::json field_spec_to_json(const FieldSpec& spec);

}  // namespace rownav
