#include "rownav/field.hpp"

#include "rownav/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rownav {

namespace {

struct SegmentHit {
  double distance_sq;
  double t;  // in [0, 1] along the segment
};

SegmentHit closest_on_segment(const GroundPoint& p, const GroundPoint& a, const GroundPoint& b) {
  const double ex = b.x - a.x;
  const double ey = b.y - a.y;
  const double len_sq = ex * ex + ey * ey;
  double t = 0.0;
  if (len_sq > 0.0) t = std::clamp(((p.x - a.x) * ex + (p.y - a.y) * ey) / len_sq, 0.0, 1.0);
  const double dx = a.x + t * ex - p.x;
  const double dy = a.y + t * ey - p.y;
  return {dx * dx + dy * dy, t};
}

double box_distance_sq(double px, double py, double min_x, double min_y, double max_x, double max_y) {
  const double dx = std::max({min_x - px, 0.0, px - max_x});
  const double dy = std::max({min_y - py, 0.0, py - max_y});
  return dx * dx + dy * dy;
}

constexpr std::size_t kChunkSegments = 32;

}  // namespace

CropRow::CropRow(std::vector<Plant> plants, std::vector<GroundPoint> centerline)
    : plants_(std::move(plants)), centerline_(std::move(centerline)) {
  build_index();
}

void CropRow::build_index() {
  cumulative_.assign(centerline_.size(), 0.0);
  for (std::size_t i = 1; i < centerline_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + std::hypot(centerline_[i].x - centerline_[i - 1].x,
                                                     centerline_[i].y - centerline_[i - 1].y);
  }
  chunks_.clear();
  if (centerline_.size() < 2) return;
  const std::size_t segments = centerline_.size() - 1;
  for (std::size_t first = 0; first < segments; first += kChunkSegments) {
    const std::size_t last = std::min(segments, first + kChunkSegments);
    Chunk c{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), first,
            last};
    for (std::size_t i = first; i <= last; ++i) {
      c.min_x = std::min(c.min_x, centerline_[i].x);
      c.min_y = std::min(c.min_y, centerline_[i].y);
      c.max_x = std::max(c.max_x, centerline_[i].x);
      c.max_y = std::max(c.max_y, centerline_[i].y);
    }
    chunks_.push_back(c);
  }
}

CenterlineProjection CropRow::project(const GroundPoint& p) const {
  if (centerline_.empty()) return {std::numeric_limits<double>::infinity(), 0.0};
  if (centerline_.size() == 1) {
    return {std::hypot(p.x - centerline_[0].x, p.y - centerline_[0].y), 0.0};
  }
  double best = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (const auto& c : chunks_) {
    if (box_distance_sq(p.x, p.y, c.min_x, c.min_y, c.max_x, c.max_y) > best) continue;
    for (std::size_t i = c.first; i < c.last; ++i) {
      const auto hit = closest_on_segment(p, centerline_[i], centerline_[i + 1]);
      if (hit.distance_sq < best) {
        best = hit.distance_sq;
        best_s = cumulative_[i] + hit.t * (cumulative_[i + 1] - cumulative_[i]);
      }
    }
  }
  return {std::sqrt(best), best_s};
}

double CropRow::distance_to(const GroundPoint& p) const { return project(p).distance; }

GroundPoint CropRow::point_at(double s) const {
  if (centerline_.empty()) return {};
  if (centerline_.size() == 1 || s <= 0.0) return centerline_.front();
  if (s >= length()) return centerline_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double span = cumulative_[i + 1] - cumulative_[i];
  const double t = span > 0.0 ? (s - cumulative_[i]) / span : 0.0;
  return {centerline_[i].x + t * (centerline_[i + 1].x - centerline_[i].x),
          centerline_[i].y + t * (centerline_[i + 1].y - centerline_[i].y)};
}

GroundPoint CropRow::tangent_at(double s) const {
  if (centerline_.size() < 2) return {1.0, 0.0};
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), std::clamp(s, 0.0, length()));
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cumulative_.begin(), 1)) - 1;
  i = std::min(i, centerline_.size() - 2);
  const double dx = centerline_[i + 1].x - centerline_[i].x;
  const double dy = centerline_[i + 1].y - centerline_[i].y;
  const double n = std::hypot(dx, dy);
  return n > 0.0 ? GroundPoint{dx / n, dy / n} : GroundPoint{1.0, 0.0};
}

const char* to_string(FieldShape s) {
  switch (s) {
    case FieldShape::straight: return "straight";
    case FieldShape::s_curve: return "s_curve";
    case FieldShape::parabola: return "parabola";
  }
  return "straight";
}

FieldShape field_shape_from_string(const std::string& s) {
  if (s == "straight") return FieldShape::straight;
  if (s == "s_curve") return FieldShape::s_curve;
  if (s == "parabola") return FieldShape::parabola;
  throw FieldSpecError("unknown field shape '" + s + "' (expected straight, s_curve or parabola)");
}

void FieldSpec::validate() const {
  if (row_count < 1) throw FieldSpecError("row_count must be >= 1");
  if (!(row_length > 0.0)) throw FieldSpecError("row_length must be > 0");
  if (!(plant_gap_min > 0.0)) throw FieldSpecError("plant_gap_min must be > 0");
  if (!(plant_gap_min <= plant_gap_max)) throw FieldSpecError("plant_gap_min must be <= plant_gap_max");
  if (!(canopy_radius_min > 0.0)) throw FieldSpecError("canopy_radius_min must be > 0");
  if (!(canopy_radius_min <= canopy_radius_max))
    throw FieldSpecError("canopy_radius_min must be <= canopy_radius_max");
  if (!(spacing_mean > 2.0 * canopy_radius_max))
    throw FieldSpecError("spacing_mean must exceed twice canopy_radius_max");
  if (!(spacing_std >= 0.0)) throw FieldSpecError("spacing_std must be >= 0");
  if (!(lateral_jitter_std >= 0.0)) throw FieldSpecError("lateral_jitter_std must be >= 0");
}

std::size_t Field::plant_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.plants().size();
  return n;
}

namespace {

// Base curve y = f(x) for x in [0, L] and its derivative.
struct BaseCurve {
  FieldShape shape;
  double length;

  double y(double x) const {
    switch (shape) {
      case FieldShape::straight: return 0.0;
      case FieldShape::s_curve: return kSCurveAmplitude * std::sin(2.0 * kPi * x / length);
      case FieldShape::parabola: {
        const double t = 2.0 * x / length - 1.0;
        return kParabolaSagitta * (1.0 - t * t);
      }
    }
    return 0.0;
  }

  double dy(double x) const {
    switch (shape) {
      case FieldShape::straight: return 0.0;
      case FieldShape::s_curve:
        return kSCurveAmplitude * 2.0 * kPi / length * std::cos(2.0 * kPi * x / length);
      case FieldShape::parabola: {
        const double t = 2.0 * x / length - 1.0;
        return -kParabolaSagitta * 4.0 * t / length;
      }
    }
    return 0.0;
  }

  /// Point offset by `lateral` along the left normal of the base curve at x.
  GroundPoint offset_point(double x, double lateral) const {
    const double d = dy(x);
    const double n = std::sqrt(1.0 + d * d);
    return {x - lateral * d / n, y(x) + lateral * 1.0 / n};
  }

  GroundPoint normal(double x) const {
    const double d = dy(x);
    const double n = std::sqrt(1.0 + d * d);
    return {-d / n, 1.0 / n};
  }
};

// Arc-length table of the offset curve, used to place samples at given arc lengths.
class ArcTable {
 public:
  ArcTable(const BaseCurve& base, double lateral, double length) : base_(base), lateral_(lateral) {
    const int n = std::max(2000, static_cast<int>(length / 0.002));
    xs_.resize(static_cast<std::size_t>(n) + 1);
    s_.resize(xs_.size());
    GroundPoint prev = base.offset_point(0.0, lateral);
    for (int i = 0; i <= n; ++i) {
      const double x = length * i / n;
      const GroundPoint p = base.offset_point(x, lateral);
      xs_[static_cast<std::size_t>(i)] = x;
      s_[static_cast<std::size_t>(i)] =
          i == 0 ? 0.0 : s_[static_cast<std::size_t>(i) - 1] + std::hypot(p.x - prev.x, p.y - prev.y);
      prev = p;
    }
  }

  double total() const { return s_.back(); }

  double x_at(double s) const {
    if (s <= 0.0) return xs_.front();
    if (s >= total()) return xs_.back();
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - s_.begin()) - 1;
    const double t = (s - s_[i]) / (s_[i + 1] - s_[i]);
    return xs_[i] + t * (xs_[i + 1] - xs_[i]);
  }

  GroundPoint point(double s) const { return base_.offset_point(x_at(s), lateral_); }
  GroundPoint normal(double s) const { return base_.normal(x_at(s)); }

 private:
  BaseCurve base_;
  double lateral_;
  std::vector<double> xs_;
  std::vector<double> s_;
};

}  // namespace

Field generate_field(const FieldSpec& spec) {
  spec.validate();
  const Rng root(spec.seed);
  const BaseCurve base{spec.shape, spec.row_length};

  // Row 0 is the leftmost row; the others lie to its right (negative lateral offset).
  std::vector<double> lateral(static_cast<std::size_t>(spec.row_count), 0.0);
  Rng spacing_rng = root.substream(0);
  const double min_spacing = 2.0 * spec.canopy_radius_max + 2.0 * kMaxPlantOffset;
  for (std::size_t i = 1; i < lateral.size(); ++i) {
    double gap = spec.spacing_mean;
    if (spec.spacing_std > 0.0) gap = spacing_rng.normal(spec.spacing_mean, spec.spacing_std);
    lateral[i] = lateral[i - 1] - std::max(gap, min_spacing);
  }

  Field field;
  field.nominal_spacing = spec.spacing_mean;
  field.rows.reserve(lateral.size());
  for (std::size_t r = 0; r < lateral.size(); ++r) {
    Rng rng = root.substream(r + 1);
    const ArcTable arc(base, lateral[r], spec.row_length);
    const double len = arc.total();

    std::vector<GroundPoint> centerline;
    const auto steps = static_cast<std::size_t>(std::ceil(len / kCenterlineStep - 1e-9));
    centerline.reserve(steps + 1);
    for (std::size_t i = 0; i < steps; ++i) centerline.push_back(arc.point(i * kCenterlineStep));
    centerline.push_back(arc.point(len));

    std::vector<Plant> plants;
    double s = 0.0;
    while (s <= len) {
      double offset = 0.0;
      if (spec.lateral_jitter_std > 0.0) {
        offset = std::clamp(rng.normal(0.0, spec.lateral_jitter_std), -kMaxPlantOffset, kMaxPlantOffset);
      }
      const GroundPoint c = arc.point(s);
      const GroundPoint n = arc.normal(s);
      double radius = spec.canopy_radius_min;
      if (spec.canopy_radius_max > spec.canopy_radius_min)
        radius = rng.uniform(spec.canopy_radius_min, spec.canopy_radius_max);
      plants.push_back({{c.x + offset * n.x, c.y + offset * n.y}, radius});
      double gap = spec.plant_gap_min;
      if (spec.plant_gap_max > spec.plant_gap_min) gap = rng.uniform(spec.plant_gap_min, spec.plant_gap_max);
      s += gap;
    }
    field.rows.emplace_back(std::move(plants), std::move(centerline));
  }
  return field;
}

RowDistance nearest_row_distance(const Field& field, const GroundPoint& p) {
  if (field.rows.empty()) throw std::invalid_argument("nearest_row_distance: empty field");
  RowDistance best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < field.rows.size(); ++i) {
    const double d = field.rows[i].distance_to(p);
    if (d < best.distance) best = {i, d};
  }
  return best;
}

nlohmann::json field_to_json(const Field& field) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : field.rows) {
    nlohmann::json plants = nlohmann::json::array();
    for (const auto& p : row.plants()) plants.push_back({p.position.x, p.position.y, p.canopy_radius});
    nlohmann::json line = nlohmann::json::array();
    for (const auto& c : row.centerline()) line.push_back({c.x, c.y});
    rows.push_back({{"plants", std::move(plants)}, {"centerline", std::move(line)}});
  }
  return {{"format", "rownav-field-v1"}, {"nominal_spacing", field.nominal_spacing}, {"rows", std::move(rows)}};
}

Field field_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "rownav-field-v1")
    throw std::invalid_argument("field JSON: missing or unsupported \"format\" (expected rownav-field-v1)");
  Field field;
  field.nominal_spacing = j.at("nominal_spacing").get<double>();
  for (const auto& row : j.at("rows")) {
    std::vector<Plant> plants;
    for (const auto& p : row.at("plants")) {
      if (p.size() != 3) throw std::invalid_argument("field JSON: plant must be [x, y, radius]");
      plants.push_back({{p[0].get<double>(), p[1].get<double>()}, p[2].get<double>()});
    }
    std::vector<GroundPoint> line;
    for (const auto& c : row.at("centerline")) {
      if (c.size() != 2) throw std::invalid_argument("field JSON: centerline point must be [x, y]");
      line.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    field.rows.emplace_back(std::move(plants), std::move(line));
  }
  return field;
}

nlohmann::json field_spec_to_json(const FieldSpec& spec) {
  return {{"shape", to_string(spec.shape)},
          {"row_count", spec.row_count},
          {"row_length", spec.row_length},
          {"spacing_mean", spec.spacing_mean},
          {"spacing_std", spec.spacing_std},
          {"plant_gap_min", spec.plant_gap_min},
          {"plant_gap_max", spec.plant_gap_max},
          {"canopy_radius_min", spec.canopy_radius_min},
          {"canopy_radius_max", spec.canopy_radius_max},
          {"lateral_jitter_std", spec.lateral_jitter_std},
          {"seed", spec.seed}};
}

}  // namespace rownav
