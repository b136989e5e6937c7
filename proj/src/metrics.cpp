#include "rownav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace rownav {

namespace {

// Uniform grid over trajectory points for range queries.
class PointGrid {
 public:
  PointGrid(const Trajectory& traj, double cell) : cell_(cell) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
      cells_[key(cell_index(traj[i].pose.x), cell_index(traj[i].pose.y))].push_back(i);
    }
  }

  bool any_within(const Trajectory& traj, const GroundPoint& p, double range) const {
    const long cx = cell_index(p.x);
    const long cy = cell_index(p.y);
    const long reach = static_cast<long>(std::ceil(range / cell_));
    const double r2 = range * range;
    for (long dx = -reach; dx <= reach; ++dx) {
      for (long dy = -reach; dy <= reach; ++dy) {
        const auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (const std::size_t i : it->second) {
          const double ex = traj[i].pose.x - p.x;
          const double ey = traj[i].pose.y - p.y;
          if (ex * ex + ey * ey <= r2) return true;
        }
      }
    }
    return false;
  }

 private:
  long cell_index(double c) const { return static_cast<long>(std::floor(c / cell_)); }
  static long long key(long a, long b) { return (static_cast<long long>(a) << 32) ^ (b & 0xffffffffLL); }

  double cell_;
  std::unordered_map<long long, std::vector<std::size_t>> cells_;
};

struct Interval {
  double begin;
  double end;
};

// Following intervals: from the start (or a row_entered) to the next camera switch.
std::vector<Interval> following_intervals(const Trajectory& traj, const std::vector<NavEvent>& events) {
  std::vector<Interval> out;
  const double inf = std::numeric_limits<double>::infinity();
  double open = traj.front().t;
  bool is_open = true;
  for (const auto& e : events) {
    if (e.kind == NavEventKind::row_entered && !is_open) {
      open = e.sim_time;
      is_open = true;
    } else if ((e.kind == NavEventKind::camera_switched || e.kind == NavEventKind::navigation_done) && is_open) {
      out.push_back({open, e.sim_time});
      is_open = false;
    }
  }
  if (is_open) out.push_back({open, inf});
  return out;
}

}  // namespace

std::vector<std::vector<bool>> covered_plants(const Field& field, const Trajectory& traj) {
  std::vector<std::vector<bool>> out;
  const PointGrid grid(traj, kCoverageRange);
  for (const auto& row : field.rows) {
    std::vector<bool> flags(row.plants().size(), false);
    for (std::size_t i = 0; i < flags.size(); ++i)
      flags[i] = grid.any_within(traj, row.plants()[i].position, kCoverageRange);
    out.push_back(std::move(flags));
  }
  return out;
}

CoverageReport coverage_report(const Field& field, const Trajectory& traj, const std::vector<NavEvent>& events) {
  CoverageReport rep;
  if (traj.empty() || field.rows.empty()) return rep;

  // Row-following accuracy, against the row tracked in each following interval.
  std::vector<double> dists;
  std::vector<std::size_t> interval_row;
  const auto intervals = following_intervals(traj, events);
  for (const auto& iv : intervals) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (traj[i].phase == NavPhase::following && traj[i].t >= iv.begin && traj[i].t < iv.end) idx.push_back(i);
    }
    if (idx.empty()) continue;
    // The robot is aligned with its row at the end of the interval, not at its start.
    const auto& last = traj[idx.back()].pose;
    const std::size_t row_i = nearest_row_distance(field, {last.x, last.y}).row_index;
    interval_row.push_back(row_i);
    const CropRow& row = field.rows[row_i];
    for (const std::size_t i : idx) {
      const auto proj = row.project({traj[i].pose.x, traj[i].pose.y});
      if (proj.arc_length <= 1e-9 || proj.arc_length >= row.length() - 1e-9) continue;
      dists.push_back(proj.distance);
    }
  }
  rep.distance_samples = dists.size();
  if (!dists.empty()) {
    const double mean = std::accumulate(dists.begin(), dists.end(), 0.0) / static_cast<double>(dists.size());
    double var = 0.0;
    for (const double d : dists) var += (d - mean) * (d - mean);
    var /= static_cast<double>(dists.size());
    rep.avg_row_distance = 100.0 * mean;
    rep.std_row_distance = 100.0 * std::sqrt(var);
  }

  // Crop coverage.
  const auto covered = covered_plants(field, traj);
  rep.missed_per_row.assign(field.rows.size(), 0);
  for (std::size_t r = 0; r < field.rows.size(); ++r) {
    const CropRow& row = field.rows[r];
    for (std::size_t p = 0; p < covered[r].size(); ++p) {
      if (covered[r][p]) continue;
      ++rep.missed_per_row[r];
      const double s = row.project(row.plants()[p].position).arc_length;
      rep.missed.push_back({r, p, std::min(s, row.length() - s)});
    }
    if (rep.missed_per_row[r] < kVisitedMissLimit) ++rep.rows_visited;
  }
  rep.missed_crops_per_row = static_cast<double>(std::accumulate(rep.missed_per_row.begin(),
                                                                 rep.missed_per_row.end(), 0)) /
                             static_cast<double>(field.rows.size());
  rep.visited_rows_pct = 100.0 * static_cast<double>(rep.rows_visited) / static_cast<double>(field.rows.size());

  // Maneuvering space: excursion past the row-end line of the row being left.
  std::size_t seg = 0;
  std::size_t i = 0;
  while (i < traj.size()) {
    if (traj[i].phase == NavPhase::following) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < traj.size() && traj[j].phase != NavPhase::following) ++j;
    // Following interval that ended right before this episode.
    while (seg + 1 < intervals.size() && intervals[seg + 1].begin <= traj[i].t) ++seg;
    if (seg < interval_row.size()) {
      const CropRow& row = field.rows[interval_row[seg]];
      if (!row.plants().empty()) {
        const GroundPoint at{traj[i].pose.x, traj[i].pose.y};
        const bool far_end = row.project(at).arc_length > 0.5 * row.length();
        const GroundPoint end = far_end ? row.plants().back().position : row.plants().front().position;
        GroundPoint out = far_end ? row.tangent_at(row.length()) : row.tangent_at(0.0);
        if (!far_end) out = {-out.x, -out.y};
        double excursion = 0.0;
        for (std::size_t k = i; k < j; ++k) {
          excursion = std::max(excursion,
                               (traj[k].pose.x - end.x) * out.x + (traj[k].pose.y - end.y) * out.y);
        }
        rep.maneuvers.push_back(excursion);
      }
    }
    i = j;
  }
  if (!rep.maneuvers.empty()) {
    rep.maneuvering_space = *std::max_element(rep.maneuvers.begin(), rep.maneuvers.end());
    rep.maneuvering_space_mean = std::accumulate(rep.maneuvers.begin(), rep.maneuvers.end(), 0.0) /
                                 static_cast<double>(rep.maneuvers.size());
  }
  return rep;
}

SweepCurve sweep_summary(const std::vector<std::pair<double, CoverageReport>>& runs) {
  SweepCurve c;
  for (const auto& [p, r] : runs) c.points.push_back({p, r.visited_rows_pct});
  std::stable_sort(c.points.begin(), c.points.end(),
                   [](const SweepPoint& a, const SweepPoint& b) { return a.param < b.param; });
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < c.points.size();) {
    if (c.points[i].visited_rows_pct < 100.0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < c.points.size() && c.points[j].visited_rows_pct >= 100.0) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      c.has_full_interval = true;
      c.full_lo = c.points[i].param;
      c.full_hi = c.points[j - 1].param;
    }
    i = j;
  }
  return c;
}

nlohmann::json report_to_json(const CoverageReport& r) {
  nlohmann::json missed = nlohmann::json::array();
  for (const auto& m : r.missed)
    missed.push_back({{"row", m.row}, {"plant", m.plant}, {"distance_from_row_end", m.distance_from_row_end}});
  return {{"avg_row_distance_cm", r.avg_row_distance},
          {"std_row_distance_cm", r.std_row_distance},
          {"missed_crops_per_row", r.missed_crops_per_row},
          {"visited_rows_pct", r.visited_rows_pct},
          {"maneuvering_space_m", r.maneuvering_space},
          {"maneuvering_space_mean_m", r.maneuvering_space_mean},
          {"maneuvers_m", r.maneuvers},
          {"missed_per_row", r.missed_per_row},
          {"missed_crops", missed},
          {"rows_visited", r.rows_visited},
          {"distance_samples", r.distance_samples}};
}

}  // namespace rownav
