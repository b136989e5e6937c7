#pragma once

#include "rownav/field.hpp"
#include "rownav/navigator.hpp"
#include "rownav/sim.hpp"

#include "json.hpp"

#include <vector>

namespace rownav {

/// A crop counts as covered when the trajectory passes within this range [m].
inline constexpr double kCoverageRange = 0.10;
/// A row is visited when fewer than this many of its crops are missed.
inline constexpr int kVisitedMissLimit = 5;

struct MissedCrop {
  std::size_t row = 0;
  std::size_t plant = 0;
  /// Arc-length distance from the closer end of its row [m].
  double distance_from_row_end = 0.0;
};

struct CoverageReport {
  double avg_row_distance = 0.0;  // cm
  double std_row_distance = 0.0;  // cm
  double missed_crops_per_row = 0.0;
  double visited_rows_pct = 0.0;
  double maneuvering_space = 0.0;  // max over row transitions [m]

  double maneuvering_space_mean = 0.0;
  std::vector<double> maneuvers;  // one excursion per exit/entry episode [m]
  std::vector<int> missed_per_row;
  std::vector<MissedCrop> missed;
  std::size_t rows_visited = 0;
  std::size_t distance_samples = 0;
};

CoverageReport coverage_report(const Field& field, const Trajectory& traj, const std::vector<NavEvent>& events);

/// Per-plant coverage flags: true iff some trajectory point is within kCoverageRange.
std::vector<std::vector<bool>> covered_plants(const Field& field, const Trajectory& traj);

struct SweepPoint {
  double param = 0.0;
  double visited_rows_pct = 0.0;
};

struct SweepCurve {
  std::vector<SweepPoint> points;  // ascending param
  bool has_full_interval = false;
  double full_lo = 0.0;  // longest contiguous run of 100% coverage
  double full_hi = 0.0;
};

SweepCurve sweep_summary(const std::vector<std::pair<double, CoverageReport>>& runs);

nlohmann::json report_to_json(const CoverageReport& r);

}  // namespace rownav
