#include "rownav/io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rownav {

void atomic_write(const std::string& path, const std::string& bytes) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

namespace {

NavPhase phase_from_string(const std::string& s) {
  for (const NavPhase p : {NavPhase::following, NavPhase::exiting, NavPhase::entering, NavPhase::done})
    if (s == to_string(p)) return p;
  throw std::invalid_argument("unknown phase '" + s + "'");
}

NavEventKind event_from_string(const std::string& s) {
  for (const NavEventKind k : {NavEventKind::row_end_reached, NavEventKind::camera_switched,
                               NavEventKind::window_shifted, NavEventKind::row_entered,
                               NavEventKind::navigation_done})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown event '" + s + "'");
}

}  // namespace

std::string trajectory_to_csv(const Trajectory& traj) {
  std::string out = "t,x,y,theta,v,omega,phase\n";
  char buf[256];
  for (const auto& s : traj) {
    std::snprintf(buf, sizeof buf, "%.3f,%.9f,%.9f,%.9f,%.9f,%.9f,%s\n", s.t, s.pose.x, s.pose.y, s.pose.theta,
                  s.control.v, s.control.omega, to_string(s.phase));
    out += buf;
  }
  return out;
}

Trajectory trajectory_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x,y,theta,v,omega,phase", 0) != 0)
    throw std::invalid_argument("trajectory CSV: bad header");
  Trajectory traj;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<double, 6> v{};
    char phase[32] = {0};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%31s", &v[0], &v[1], &v[2], &v[3], &v[4], &v[5],
                    phase) != 7)
      throw std::invalid_argument("trajectory CSV line " + std::to_string(lineno) + ": malformed");
    TrajectorySample s;
    s.t = v[0];
    s.pose = Pose2(v[1], v[2], v[3]);
    s.control = {v[4], v[5]};
    s.phase = phase_from_string(phase);
    traj.push_back(s);
  }
  return traj;
}

nlohmann::json events_to_json(const std::vector<NavEvent>& events) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& e : events) a.push_back({{"t", e.sim_time}, {"kind", to_string(e.kind)}});
  return a;
}

std::vector<NavEvent> events_from_json(const nlohmann::json& j) {
  std::vector<NavEvent> out;
  for (const auto& e : j) out.push_back({event_from_string(e.at("kind").get<std::string>()), e.at("t").get<double>()});
  return out;
}

std::string render_svg(const Field& field, const Trajectory& traj) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  const auto grow = [&](double x, double y) {
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  for (const auto& row : field.rows)
    for (const auto& p : row.plants()) grow(p.position.x, p.position.y);
  for (const auto& s : traj) grow(s.pose.x, s.pose.y);
  if (!(lo_x <= hi_x)) lo_x = lo_y = 0.0, hi_x = hi_y = 1.0;

  const double margin = 0.5;
  const double scale = 40.0;  // px per meter
  const double w = (hi_x - lo_x + 2 * margin) * scale;
  const double h = (hi_y - lo_y + 2 * margin) * scale;
  // World y points up; SVG y points down.
  const auto sx = [&](double x) { return (x - lo_x + margin) * scale; };
  const auto sy = [&](double y) { return (hi_y - y + margin) * scale; };

  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
    << ' ' << h << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"#f4efe6\"/>\n<g fill=\"#2e9e3a\">\n";
  for (const auto& row : field.rows)
    for (const auto& p : row.plants())
      o << "<circle cx=\"" << sx(p.position.x) << "\" cy=\"" << sy(p.position.y) << "\" r=\""
        << std::max(0.5, p.canopy_radius * scale) << "\"/>\n";
  o << "</g>\n<g fill=\"none\" stroke-width=\"1.5\">\n";
  const auto color = [](NavPhase p) {
    switch (p) {
      case NavPhase::following: return "#1f4fd1";
      case NavPhase::exiting: return "#d1341f";
      case NavPhase::entering: return "#e39b12";
      case NavPhase::done: return "#555555";
    }
    return "#000000";
  };
  std::size_t i = 0;
  while (i + 1 < traj.size()) {
    std::size_t j = i + 1;
    while (j + 1 < traj.size() && traj[j].phase == traj[i].phase) ++j;
    o << "<polyline stroke=\"" << color(traj[i].phase) << "\" points=\"";
    for (std::size_t k = i; k <= j; ++k) o << sx(traj[k].pose.x) << ',' << sy(traj[k].pose.y) << ' ';
    o << "\"/>\n";
    i = j;
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace rownav
