#pragma once

#include "rownav/field.hpp"
#include "rownav/navigator.hpp"
#include "rownav/sim.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace rownav {

/// Writes to a sibling temporary file, then renames over `path`.
void atomic_write(const std::string& path, const std::string& bytes);

/// Columns t,x,y,theta,v,omega,phase with fixed 9-digit precision.
std::string trajectory_to_csv(const Trajectory& traj);
/// Inverse of trajectory_to_csv (camera and error columns are not stored).
Trajectory trajectory_from_csv(const std::string& text);

nlohmann::json events_to_json(const std::vector<NavEvent>& events);
std::vector<NavEvent> events_from_json(const nlohmann::json& j);

/// Top-down plot: plants as dots, trajectory segments colored by phase.
std::string render_svg(const Field& field, const Trajectory& traj);

}  // namespace rownav
