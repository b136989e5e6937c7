#include "rownav/render.hpp"

#include "rownav/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rownav {

namespace {

double cross(const PixelPoint& o, const PixelPoint& a, const PixelPoint& b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

// Andrew's monotone chain; returns counter-clockwise hull without repeated end point.
std::vector<PixelPoint> convex_hull(std::vector<PixelPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const PixelPoint& a, const PixelPoint& b) {
    return a.u < b.u || (a.u == b.u && a.v < b.v);
  });
  if (pts.size() < 3) return pts;
  std::vector<PixelPoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::uint8_t add_noise(std::uint8_t c, double n) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(c + n), 0L, 255L));
}

void apply_noise_row(RgbImage& img, int v, const RenderOptions& opts) {
  Rng rng = Rng(opts.noise_seed).substream(static_cast<std::uint64_t>(v));
  std::uint8_t* row = img.pixels.data() + 3 * static_cast<std::size_t>(v) * img.width;
  for (int i = 0; i < 3 * img.width; ++i) row[i] = add_noise(row[i], rng.normal(0.0, opts.noise_std));
}

void fill_row(std::uint8_t* row, int width, Rgb c) {
  for (int u = 0; u < width; ++u) {
    row[3 * u] = c.r;
    row[3 * u + 1] = c.g;
    row[3 * u + 2] = c.b;
  }
}

// Horizontal extent of a convex polygon on image row v (NaN if the row misses it).
std::pair<double, double> row_span(const PlantPolygon& poly, double v) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const auto& h = poly.hull;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const PixelPoint& a = h[i];
    const PixelPoint& b = h[(i + 1) % h.size()];
    const double v0 = std::min(a.v, b.v);
    const double v1 = std::max(a.v, b.v);
    if (v < v0 || v > v1) continue;
    double u;
    if (v1 - v0 < 1e-12) {
      lo = std::min({lo, a.u, b.u});
      hi = std::max({hi, a.u, b.u});
      continue;
    }
    u = a.u + (v - a.v) * (b.u - a.u) / (b.v - a.v);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  return {lo, hi};
}

}  // namespace

bool polygon_covers(const PlantPolygon& poly, double u, double v) {
  const auto& h = poly.hull;
  const PixelPoint p{u, v};
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (cross(h[i], h[(i + 1) % h.size()], p) < 0.0) return false;
  }
  return true;
}

std::vector<PlantPolygon> visible_plant_polygons(const CameraRig& rig, const Pose2& robot, const Field& field) {
  const auto& k = rig.intrinsics;
  const double max_u = k.width - 0.5;
  const double max_v = k.height - 0.5;

  std::array<double, kCanopySamples> cs{};
  std::array<double, kCanopySamples> sn{};
  for (int i = 0; i < kCanopySamples; ++i) {
    cs[static_cast<std::size_t>(i)] = std::cos(2.0 * kPi * i / kCanopySamples);
    sn[static_cast<std::size_t>(i)] = std::sin(2.0 * kPi * i / kCanopySamples);
  }

  std::vector<PlantPolygon> polys;
  std::vector<PixelPoint> pts;
  pts.reserve(kCanopySamples + 1);
  for (const auto& row : field.rows) {
    for (const auto& plant : row.plants()) {
      const CameraPoint3 center = world_to_camera(rig, robot, plant.position);
      const double r = plant.canopy_radius;
      if (center.z() < kNearClip - r) continue;
      if (center.z() > 2.0 * r + kNearClip) {
        // Any point within r of the center projects within this reach of the center's pixel.
        const double z = center.z();
        const PixelPoint c = project(k, center);
        const double reach_u = k.fx * r * (1.0 + std::abs(center.x()) / z) / (z - r) + 1.0;
        const double reach_v = k.fy * r * (1.0 + std::abs(center.y()) / z) / (z - r) + 1.0;
        if (c.u + reach_u < -0.5 || c.u - reach_u > max_u || c.v + reach_v < -0.5 || c.v - reach_v > max_v)
          continue;
      }
      pts.clear();
      if (center.z() > kNearClip) pts.push_back(project(k, center));
      for (int i = 0; i < kCanopySamples; ++i) {
        const GroundPoint g{plant.position.x + r * cs[static_cast<std::size_t>(i)],
                            plant.position.y + r * sn[static_cast<std::size_t>(i)]};
        const CameraPoint3 pc = world_to_camera(rig, robot, g);
        if (pc.z() > kNearClip) pts.push_back(project(k, pc));
      }
      if (pts.size() < 3) continue;
      PlantPolygon poly;
      poly.hull = convex_hull(pts);
      if (poly.hull.size() < 3) continue;
      poly.depth = center.z();
      poly.min_u = poly.max_u = poly.hull[0].u;
      poly.min_v = poly.max_v = poly.hull[0].v;
      for (const auto& p : poly.hull) {
        poly.min_u = std::min(poly.min_u, p.u);
        poly.max_u = std::max(poly.max_u, p.u);
        poly.min_v = std::min(poly.min_v, p.v);
        poly.max_v = std::max(poly.max_v, p.v);
      }
      if (poly.max_u < -0.5 || poly.min_u > max_u || poly.max_v < -0.5 || poly.min_v > max_v) continue;
      polys.push_back(std::move(poly));
    }
  }
  // Painter's order: far first, so nearer canopies overdraw.
  std::stable_sort(polys.begin(), polys.end(),
                   [](const PlantPolygon& a, const PlantPolygon& b) { return a.depth > b.depth; });
  return polys;
}

RgbImage render_view(const CameraRig& rig, const Pose2& robot, const Field& field, const RenderOptions& opts) {
  const auto polys = visible_plant_polygons(rig, robot, field);
  const int w = rig.intrinsics.width;
  const int h = rig.intrinsics.height;
  RgbImage img(w, h);

#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    std::uint8_t* row = img.pixels.data() + 3 * static_cast<std::size_t>(v) * w;
    fill_row(row, w, opts.soil);
    for (const auto& poly : polys) {
      if (v < poly.min_v || v > poly.max_v) continue;
      const auto [lo, hi] = row_span(poly, v);
      if (!(lo <= hi)) continue;
      const int u0 = std::max(0, static_cast<int>(std::ceil(lo)) - 1);
      const int u1 = std::min(w - 1, static_cast<int>(std::floor(hi)) + 1);
      for (int u = u0; u <= u1; ++u) {
        if (polygon_covers(poly, u, v)) {
          row[3 * u] = opts.plant.r;
          row[3 * u + 1] = opts.plant.g;
          row[3 * u + 2] = opts.plant.b;
        }
      }
    }
    if (opts.noise_std > 0.0) apply_noise_row(img, v, opts);
  }
  return img;
}

RgbImage render_view_serial(const CameraRig& rig, const Pose2& robot, const Field& field,
                            const RenderOptions& opts) {
  const auto polys = visible_plant_polygons(rig, robot, field);
  const int w = rig.intrinsics.width;
  const int h = rig.intrinsics.height;
  RgbImage img(w, h, opts.soil);
  for (const auto& poly : polys) {
    const int u0 = std::max(0, static_cast<int>(std::floor(poly.min_u)));
    const int u1 = std::min(w - 1, static_cast<int>(std::ceil(poly.max_u)));
    const int v0 = std::max(0, static_cast<int>(std::floor(poly.min_v)));
    const int v1 = std::min(h - 1, static_cast<int>(std::ceil(poly.max_v)));
    for (int v = v0; v <= v1; ++v)
      for (int u = u0; u <= u1; ++u)
        if (polygon_covers(poly, u, v)) img.set(u, v, opts.plant);
  }
  if (opts.noise_std > 0.0)
    for (int v = 0; v < h; ++v) apply_noise_row(img, v, opts);
  return img;
}

}  // namespace rownav
