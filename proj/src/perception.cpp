#include "rownav/perception.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rownav {

namespace {

inline int exg(std::uint8_t r, std::uint8_t g, std::uint8_t b) { return 2 * int{g} - int{r} - int{b}; }

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

struct Line {
  Eigen::Vector2d point;
  Eigen::Vector2d dir;  // unit
};

// Weighted total least squares: principal axis of the weighted scatter.
Line weighted_tls(const std::vector<Eigen::Vector2d>& pts, const std::vector<double>& w) {
  double sw = 0.0;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    sw += w[i];
    c += w[i] * pts[i];
  }
  c /= sw;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Eigen::Vector2d d = pts[i] - c;
    cov += w[i] * d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  return {c, eig.eigenvectors().col(1).normalized()};
}

// Siegel repeated-median line in the frame of an initial direction estimate.
Line repeated_median(const std::vector<Eigen::Vector2d>& pts, const Line& frame) {
  const Eigen::Vector2d d = frame.dir;
  const Eigen::Vector2d n(-d.y(), d.x());
  std::vector<double> a(pts.size()), b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a[i] = (pts[i] - frame.point).dot(d);
    b[i] = (pts[i] - frame.point).dot(n);
  }
  std::vector<double> outer;
  std::vector<double> inner;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    inner.clear();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j == i || std::abs(a[j] - a[i]) < 1e-9) continue;
      inner.push_back((b[j] - b[i]) / (a[j] - a[i]));
    }
    if (!inner.empty()) outer.push_back(median(inner));
  }
  if (outer.empty()) return frame;
  const double slope = median(outer);
  std::vector<double> icpt(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) icpt[i] = b[i] - slope * a[i];
  const double intercept = median(icpt);
  return {frame.point + intercept * n, (d + slope * n).normalized()};
}

constexpr double kBisquareTuning = 4.685;
constexpr double kMadToSigma = 1.4826;
constexpr double kMinScale = 0.5;  // px, centroid quantization
constexpr int kMaxIrlsIterations = 10;
constexpr double kWeightTolerance = 1e-6;

}  // namespace

BinaryMask exg_mask(const RgbImage& img, int threshold) {
  BinaryMask mask(img.width, img.height);
  const int w = img.width;
#pragma omp parallel for schedule(static)
  for (int v = 0; v < img.height; ++v) {
    const std::uint8_t* src = img.pixels.data() + 3 * static_cast<std::size_t>(v) * w;
    std::uint8_t* dst = mask.bits.data() + static_cast<std::size_t>(v) * w;
    for (int u = 0; u < w; ++u) dst[u] = exg(src[3 * u], src[3 * u + 1], src[3 * u + 2]) > threshold ? 1 : 0;
  }
  return mask;
}

BinaryMask exg_mask_serial(const RgbImage& img, int threshold) {
  BinaryMask mask(img.width, img.height);
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      const Rgb c = img.at(u, v);
      mask.set(u, v, exg(c.r, c.g, c.b) > threshold);
    }
  }
  return mask;
}

std::vector<CropDetection> detect_crops(const BinaryMask& mask, int min_blob_area) {
  const int w = mask.width;
  const int h = mask.height;
  // Two-pass labeling with union-find over provisional labels.
  std::vector<int> labels(static_cast<std::size_t>(w) * h, 0);
  std::vector<int> parent{0};
  auto find = [&parent](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * w + u;
      if (!mask.bits[i]) continue;
      const int left = u > 0 ? labels[i - 1] : 0;
      const int up = v > 0 ? labels[i - static_cast<std::size_t>(w)] : 0;
      if (left == 0 && up == 0) {
        const int l = static_cast<int>(parent.size());
        parent.push_back(l);
        labels[i] = l;
      } else if (left != 0 && up != 0) {
        const int a = find(left);
        const int b = find(up);
        labels[i] = std::min(a, b);
        parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      } else {
        labels[i] = left != 0 ? left : up;
      }
    }
  }

  struct Acc {
    double su = 0.0, sv = 0.0;
    int n = 0;
  };
  std::vector<Acc> acc(parent.size());
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const int l = labels[static_cast<std::size_t>(v) * w + u];
      if (l == 0) continue;
      Acc& a = acc[static_cast<std::size_t>(find(l))];
      a.su += u;
      a.sv += v;
      ++a.n;
    }
  }
  std::vector<CropDetection> out;
  for (const auto& a : acc) {
    if (a.n == 0 || a.n < min_blob_area) continue;
    out.push_back({{a.su / a.n, a.sv / a.n}, a.n});
  }
  std::sort(out.begin(), out.end(), [](const CropDetection& x, const CropDetection& y) {
    if (x.centroid.v != y.centroid.v) return x.centroid.v > y.centroid.v;
    return x.centroid.u < y.centroid.u;
  });
  return out;
}

std::vector<CropDetection> detect_crops_in_image(const RgbImage& img, const PerceptionParams& params) {
  return detect_crops(exg_mask(img, params.exg_threshold), params.min_blob_area);
}

std::vector<CropDetection> crops_in_window(const std::vector<CropDetection>& dets, const SlidingWindow& win) {
  const double lo = win.center_x - win.width / 2.0;
  const double hi = win.center_x + win.width / 2.0;
  std::vector<CropDetection> out;
  std::copy_if(dets.begin(), dets.end(), std::back_inserter(out),
               [&](const CropDetection& d) { return d.centroid.u >= lo && d.centroid.u <= hi; });
  return out;
}

LineFit fit_row_line(const std::vector<CropDetection>& dets) {
  if (dets.size() < 2) throw PerceptionError("fit_row_line: need at least two detections");
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(dets.size());
  for (const auto& d : dets) pts.emplace_back(d.centroid.u, d.centroid.v);

  std::vector<double> w(pts.size(), 1.0);
  Line line = weighted_tls(pts, w);
  int iterations = 0;
  if (pts.size() > 2) {
    line = repeated_median(pts, line);
    // Scale is fixed from the high-breakdown start; a redescending weight lets
    // far-end points of a neighbouring row drop out instead of levering the line.
    std::vector<double> r(pts.size());
    const auto residuals = [&] {
      const Eigen::Vector2d n(-line.dir.y(), line.dir.x());
      for (std::size_t i = 0; i < pts.size(); ++i) r[i] = std::abs((pts[i] - line.point).dot(n));
    };
    residuals();
    const double c = kBisquareTuning * std::max(kMadToSigma * median(r), kMinScale);
    for (; iterations < kMaxIrlsIterations; ++iterations) {
      double change = 0.0;
      int active = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double q = r[i] / c;
        const double wi = q < 1.0 ? (1.0 - q * q) * (1.0 - q * q) : 0.0;
        change = std::max(change, std::abs(wi - w[i]));
        w[i] = wi;
        active += wi > 0.0;
      }
      if (active < 2) break;
      line = weighted_tls(pts, w);
      residuals();
      if (change < kWeightTolerance && iterations > 0) {
        ++iterations;
        break;
      }
    }
  }

  Eigen::Vector2d dir = line.dir;
  if (dir.y() > 0.0 || (dir.y() == 0.0 && dir.x() < 0.0)) dir = -dir;
  LineFit fit;
  fit.point = {line.point.x(), line.point.y()};
  fit.direction = {dir.x(), dir.y()};
  fit.weights = w;
  fit.inliers.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) fit.inliers[i] = w[i] > 0.5;
  fit.iterations = iterations;
  return fit;
}

FeatureVec feature_from_fit(const LineFit& fit, const std::vector<CropDetection>& dets,
                            const CameraIntrinsics& intr) {
  // Bottom-most inlier: the first crop along the visible path.
  const CropDetection* first = nullptr;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (i < fit.inliers.size() && !fit.inliers[i]) continue;
    if (first == nullptr || dets[i].centroid.v > first->centroid.v) first = &dets[i];
  }
  PixelPoint p = fit.point;
  if (first != nullptr) {
    const auto& d = fit.direction;
    if (std::abs(d.v) > 1e-9) {
      const double t = (first->centroid.v - fit.point.v) / d.v;
      p = {fit.point.u + t * d.u, first->centroid.v};
    } else {
      const double t = (first->centroid.u - fit.point.u) * d.u + (first->centroid.v - fit.point.v) * d.v;
      p = {fit.point.u + t * d.u, fit.point.v + t * d.v};
    }
  }
  return {p.u - intr.cx, p.v - intr.cy, std::atan2(fit.direction.u, -fit.direction.v)};
}

SlidingWindow initialize_window(const CameraIntrinsics& intr, double width_fraction) {
  return {intr.width / 2.0, width_fraction * intr.width};
}

namespace {
double clamp_center(double c, const CameraIntrinsics& intr) {
  return std::clamp(c, 0.0, static_cast<double>(intr.width - 1));
}
}  // namespace

SlidingWindow update_window(const SlidingWindow& win, const std::vector<CropDetection>& dets_in_win,
                            const CameraIntrinsics& intr) {
  if (dets_in_win.empty()) return win;
  double sum = 0.0;
  for (const auto& d : dets_in_win) sum += d.centroid.u;
  return {clamp_center(sum / static_cast<double>(dets_in_win.size()), intr), win.width};
}

SlidingWindow shift_window(const SlidingWindow& win, const CameraRig& rig, const Pose2& robot, double delta,
                           Side side) {
  if (delta == 0.0) return win;
  const auto& k = rig.intrinsics;
  GroundPoint g;
  try {
    g = backproject_to_ground(rig, robot, {win.center_x, k.cy});
  } catch (const GeometryError&) {
    g = backproject_to_ground(rig, robot, {win.center_x, static_cast<double>(k.height - 1)});
  }
  const double sign = side == Side::left ? 1.0 : -1.0;
  const GroundPoint moved{g.x - sign * delta * std::sin(robot.theta), g.y + sign * delta * std::cos(robot.theta)};
  const PixelPoint px = project(k, world_to_camera(rig, robot, moved));
  return {clamp_center(px.u, k), win.width};
}

}  // namespace rownav
