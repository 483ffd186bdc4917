#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "senselab/dataset.hpp"
#include "senselab/geometry.hpp"
#include "senselab/rng.hpp"
#include "senselab/sensors.hpp"
#include "senselab/sha256.hpp"

namespace senselab {

// ---------------------------------------------------------------------------
// Simulation configuration
// ---------------------------------------------------------------------------

// Room coordinates are in cm with the robot shell center at the origin.
// Bearings are degrees counterclockwise from +x. The room dimensions, door
// placement, light bearing and all response amplitudes are conventions of
// this simulator, not measured values; they are documented in
// configs/default.cfg and can be overridden per run.
struct SimConfig {
  // sampling
  double dt_lo = 0.1;  // s, min interval between observations
  double dt_hi = 0.2;  // s, max interval

  // environment
  double ambient_temp_c = 21.0;
  double body_temp_c = 33.0;  // clothed-person surface temperature
  double ambient_light = 620.0;
  double room_width_cm = 300.0;
  double room_height_cm = 300.0;
  std::array<Vec2, 3> doors = {{{0.0, 150.0}, {150.0, 0.0}, {-150.0, 0.0}}};
  double light_bearing_deg = 45.0;

  // walker
  double walker_speed_cm_s = 65.0;
  double contact_dwell_s = 1.0;  // pause while touching the shell

  // robot geometry
  double bumper_radius_cm = 17.0;
  double contact_eps_cm = 0.75;

  // heading-cycle responses (the scan pivot shows up in these channels)
  double therm_heading_amp_c = 0.278;  // per sensor, opposite phase:
                                       // pair asymmetry peaks near 1 degF
  double photo_heading_amp = 20.0;

  // thermometers (the upward-tilted pair accepts a wide cone each, so the
  // two together see most bearings; thermopile and housing settle with a
  // first-order lag)
  double therm_fov_half_deg = 80.0;
  double therm_body_scale_cm = 40.0;
  double therm_time_const_s = 2.0;

  // photo cell shadow response
  double shadow_half_deg = 30.0;
  double shadow_max = 170.0;
  double shadow_scale_cm = 150.0;

  // rear IR rangers
  double ir_fov_half_deg = 25.0;
  double ir_medium_gain = 9000.0;
  double ir_medium_offset_cm = 5.0;
  double ir_medium_bg = 90.0;
  double ir_long_gain = 40000.0;
  double ir_long_offset_cm = 25.0;
  double ir_long_bg = 80.0;

  // cliff sensors (walker feet/shadow lower the floor IR return)
  double cliff_fov_half_deg = 35.0;
  double cliff_range_cm = 45.0;
  double cliff_dip = 260.0;
  std::array<double, 4> cliff_bg = {1180.0, 1210.0, 1190.0, 1205.0};

  // wall sensor (right side, very short range)
  double wall_bg = 30.0;
  double wall_gain = 900.0;
  double wall_range_cm = 6.0;

  // noise standard deviations
  double noise_ir = 8.0;
  double noise_photo = 5.0;
  double noise_therm_c = 0.05;
  double noise_cliff = 12.0;
  double noise_wall = 3.0;
};

// Physical ranges of the two Sharp rangers, cm from the sensor.
inline constexpr double kIrMediumMinCm = 4.0;
inline constexpr double kIrMediumMaxCm = 30.0;
inline constexpr double kIrLongMinCm = 15.0;
inline constexpr double kIrLongMaxCm = 150.0;

// Scan behavior: a 30 degree pivot every 20 seconds.
inline constexpr double kScanStepDeg = 30.0;
inline constexpr double kScanPeriodS = 20.0;

// Observation-count statistics per scenario (mean, sd) and the floor
// applied when drawing counts.
inline constexpr std::array<std::array<double, 2>, kScenarioCount>
    kObsCountStats = {{{134.92, 57.18}, {38.54, 15.59}, {70.46, 21.19}}};
inline constexpr int kObsCountFloor = 10;

// Cliff sensor bearings relative to the robot heading, left to right.
inline constexpr std::array<double, 4> kCliffOffsetsDeg = {60.0, 20.0, -20.0,
                                                           -60.0};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_vec2(Vec2 v) {
  return fmt_double(v.x) + "," + fmt_double(v.y);
}

inline std::string_view trim(std::string_view s) {
  const auto from = s.find_first_not_of(" \t\r\n");
  if (from == std::string_view::npos) return {};
  const auto to = s.find_last_not_of(" \t\r\n");
  return s.substr(from, to - from + 1);
}

inline double parse_double_value(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty()) {
    throw ConfigError("config key '" + std::string(key) +
                      "' has a non-numeric value: '" + s + "'");
  }
  return x;
}

inline Vec2 parse_vec2_value(std::string_view key, std::string_view v) {
  const auto comma = v.find(',');
  if (comma == std::string_view::npos) {
    throw ConfigError("config key '" + std::string(key) +
                      "' expects 'x,y': '" + std::string(v) + "'");
  }
  return {parse_double_value(key, trim(v.substr(0, comma))),
          parse_double_value(key, trim(v.substr(comma + 1)))};
}

}  // namespace detail

// Canonical serialization, one key per line in a fixed order. The config
// digest is the SHA-256 of this text, so provenance does not depend on
// file formatting or comments.
inline std::string config_canonical_text(const SimConfig& c) {
  using detail::fmt_double;
  using detail::fmt_vec2;
  std::ostringstream out;
  auto put = [&](std::string_view k, const std::string& v) {
    out << k << " = " << v << "\n";
  };
  put("dt_lo", fmt_double(c.dt_lo));
  put("dt_hi", fmt_double(c.dt_hi));
  put("ambient_temp_c", fmt_double(c.ambient_temp_c));
  put("body_temp_c", fmt_double(c.body_temp_c));
  put("ambient_light", fmt_double(c.ambient_light));
  put("room_width_cm", fmt_double(c.room_width_cm));
  put("room_height_cm", fmt_double(c.room_height_cm));
  put("door0", fmt_vec2(c.doors[0]));
  put("door1", fmt_vec2(c.doors[1]));
  put("door2", fmt_vec2(c.doors[2]));
  put("light_bearing_deg", fmt_double(c.light_bearing_deg));
  put("walker_speed_cm_s", fmt_double(c.walker_speed_cm_s));
  put("contact_dwell_s", fmt_double(c.contact_dwell_s));
  put("bumper_radius_cm", fmt_double(c.bumper_radius_cm));
  put("contact_eps_cm", fmt_double(c.contact_eps_cm));
  put("therm_heading_amp_c", fmt_double(c.therm_heading_amp_c));
  put("photo_heading_amp", fmt_double(c.photo_heading_amp));
  put("therm_fov_half_deg", fmt_double(c.therm_fov_half_deg));
  put("therm_body_scale_cm", fmt_double(c.therm_body_scale_cm));
  put("therm_time_const_s", fmt_double(c.therm_time_const_s));
  put("shadow_half_deg", fmt_double(c.shadow_half_deg));
  put("shadow_max", fmt_double(c.shadow_max));
  put("shadow_scale_cm", fmt_double(c.shadow_scale_cm));
  put("ir_fov_half_deg", fmt_double(c.ir_fov_half_deg));
  put("ir_medium_gain", fmt_double(c.ir_medium_gain));
  put("ir_medium_offset_cm", fmt_double(c.ir_medium_offset_cm));
  put("ir_medium_bg", fmt_double(c.ir_medium_bg));
  put("ir_long_gain", fmt_double(c.ir_long_gain));
  put("ir_long_offset_cm", fmt_double(c.ir_long_offset_cm));
  put("ir_long_bg", fmt_double(c.ir_long_bg));
  put("cliff_fov_half_deg", fmt_double(c.cliff_fov_half_deg));
  put("cliff_range_cm", fmt_double(c.cliff_range_cm));
  put("cliff_dip", fmt_double(c.cliff_dip));
  put("cliff_bg_left", fmt_double(c.cliff_bg[0]));
  put("cliff_bg_front_left", fmt_double(c.cliff_bg[1]));
  put("cliff_bg_front_right", fmt_double(c.cliff_bg[2]));
  put("cliff_bg_right", fmt_double(c.cliff_bg[3]));
  put("wall_bg", fmt_double(c.wall_bg));
  put("wall_gain", fmt_double(c.wall_gain));
  put("wall_range_cm", fmt_double(c.wall_range_cm));
  put("noise_ir", fmt_double(c.noise_ir));
  put("noise_photo", fmt_double(c.noise_photo));
  put("noise_therm_c", fmt_double(c.noise_therm_c));
  put("noise_cliff", fmt_double(c.noise_cliff));
  put("noise_wall", fmt_double(c.noise_wall));
  return out.str();
}

inline std::string config_digest(const SimConfig& c) {
  return sha256_hex(config_canonical_text(c));
}

// Enforces the structural invariants; throws ConfigError on violation.
inline void validate_sim_config(const SimConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(c.dt_lo > 0.0)) fail("dt_lo must be > 0");
  if (!(c.dt_lo <= c.dt_hi)) fail("dt_lo must be <= dt_hi");
  if (!(c.body_temp_c > c.ambient_temp_c)) {
    fail("body_temp_c must exceed ambient_temp_c");
  }
  if (!(c.walker_speed_cm_s > 0.0)) fail("walker_speed_cm_s must be > 0");
  if (!(c.therm_time_const_s >= 0.0)) fail("therm_time_const_s must be >= 0");
  if (!(c.room_width_cm > 0.0 && c.room_height_cm > 0.0)) {
    fail("room dimensions must be positive");
  }
  if (!(c.bumper_radius_cm > 0.0)) fail("bumper_radius_cm must be > 0");
  if (!(c.contact_dwell_s >= 0.0)) fail("contact_dwell_s must be >= 0");
  for (int i = 0; i < 3; ++i) {
    const Vec2 d = c.doors[static_cast<std::size_t>(i)];
    const double hw = c.room_width_cm / 2.0;
    const double hh = c.room_height_cm / 2.0;
    const bool on_x_wall =
        std::fabs(std::fabs(d.x) - hw) < 1e-6 && std::fabs(d.y) <= hh + 1e-6;
    const bool on_y_wall =
        std::fabs(std::fabs(d.y) - hh) < 1e-6 && std::fabs(d.x) <= hw + 1e-6;
    if (!on_x_wall && !on_y_wall) {
      fail("door" + std::to_string(i) + " must lie on the room boundary");
    }
  }
  for (double s : {c.noise_ir, c.noise_photo, c.noise_therm_c, c.noise_cliff,
                   c.noise_wall}) {
    if (!(s >= 0.0)) fail("noise scales must be >= 0");
  }
}

// Parses the flat key = value format. Lines starting with '#' and blank
// lines are ignored; unknown keys are rejected by name. Values not present
// keep their defaults.
inline SimConfig parse_sim_config_text(std::string_view text) {
  SimConfig c;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        " is not 'key = value': '" + std::string(line) + "'");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    auto num = [&] { return detail::parse_double_value(key, value); };
    auto vec = [&] { return detail::parse_vec2_value(key, value); };
    if (key == "dt_lo") c.dt_lo = num();
    else if (key == "dt_hi") c.dt_hi = num();
    else if (key == "ambient_temp_c") c.ambient_temp_c = num();
    else if (key == "body_temp_c") c.body_temp_c = num();
    else if (key == "ambient_light") c.ambient_light = num();
    else if (key == "room_width_cm") c.room_width_cm = num();
    else if (key == "room_height_cm") c.room_height_cm = num();
    else if (key == "door0") c.doors[0] = vec();
    else if (key == "door1") c.doors[1] = vec();
    else if (key == "door2") c.doors[2] = vec();
    else if (key == "light_bearing_deg") c.light_bearing_deg = num();
    else if (key == "walker_speed_cm_s") c.walker_speed_cm_s = num();
    else if (key == "contact_dwell_s") c.contact_dwell_s = num();
    else if (key == "bumper_radius_cm") c.bumper_radius_cm = num();
    else if (key == "contact_eps_cm") c.contact_eps_cm = num();
    else if (key == "therm_heading_amp_c") c.therm_heading_amp_c = num();
    else if (key == "photo_heading_amp") c.photo_heading_amp = num();
    else if (key == "therm_fov_half_deg") c.therm_fov_half_deg = num();
    else if (key == "therm_body_scale_cm") c.therm_body_scale_cm = num();
    else if (key == "therm_time_const_s") c.therm_time_const_s = num();
    else if (key == "shadow_half_deg") c.shadow_half_deg = num();
    else if (key == "shadow_max") c.shadow_max = num();
    else if (key == "shadow_scale_cm") c.shadow_scale_cm = num();
    else if (key == "ir_fov_half_deg") c.ir_fov_half_deg = num();
    else if (key == "ir_medium_gain") c.ir_medium_gain = num();
    else if (key == "ir_medium_offset_cm") c.ir_medium_offset_cm = num();
    else if (key == "ir_medium_bg") c.ir_medium_bg = num();
    else if (key == "ir_long_gain") c.ir_long_gain = num();
    else if (key == "ir_long_offset_cm") c.ir_long_offset_cm = num();
    else if (key == "ir_long_bg") c.ir_long_bg = num();
    else if (key == "cliff_fov_half_deg") c.cliff_fov_half_deg = num();
    else if (key == "cliff_range_cm") c.cliff_range_cm = num();
    else if (key == "cliff_dip") c.cliff_dip = num();
    else if (key == "cliff_bg_left") c.cliff_bg[0] = num();
    else if (key == "cliff_bg_front_left") c.cliff_bg[1] = num();
    else if (key == "cliff_bg_front_right") c.cliff_bg[2] = num();
    else if (key == "cliff_bg_right") c.cliff_bg[3] = num();
    else if (key == "wall_bg") c.wall_bg = num();
    else if (key == "wall_gain") c.wall_gain = num();
    else if (key == "wall_range_cm") c.wall_range_cm = num();
    else if (key == "noise_ir") c.noise_ir = num();
    else if (key == "noise_photo") c.noise_photo = num();
    else if (key == "noise_therm_c") c.noise_therm_c = num();
    else if (key == "noise_cliff") c.noise_cliff = num();
    else if (key == "noise_wall") c.noise_wall = num();
    else {
      throw ConfigError("unknown config key: '" + key + "'");
    }
  }
  validate_sim_config(c);
  return c;
}

inline SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sim_config_text(buf.str());
}

// ---------------------------------------------------------------------------
// Scan and walker kinematics
// ---------------------------------------------------------------------------

// Robot heading at time t: a 30 degree pivot every 20 seconds, piecewise
// constant, wrapped to [0, 360).
inline double scan_heading(double t) {
  if (t < 0.0) throw std::invalid_argument("scan_heading: negative time");
  return wrap_deg(kScanStepDeg * std::floor(t / kScanPeriodS));
}

// Number of observations for one experiment: a normal draw with the
// per-scenario protocol statistics, rounded, floored at 10. The floor acts
// as a clamp; resampling instead would shift the means visibly above the
// protocol values.
inline int sample_observation_count(int scenario, Rng& rng) {
  if (scenario < 0 || scenario >= kScenarioCount) {
    throw std::invalid_argument("sample_observation_count: bad scenario");
  }
  const auto& [m, sd] = kObsCountStats[static_cast<std::size_t>(scenario)];
  const long n = std::lround(rng.normal(m, sd));
  return static_cast<int>(std::max<long>(n, kObsCountFloor));
}

struct Waypoint {
  Vec2 pos;
  double t = 0.0;  // arrival time at nominal walker speed, seconds
};

struct WalkerPath {
  int scenario = 0;
  std::vector<Waypoint> waypoints;
  double closest_approach_cm = std::numeric_limits<double>::infinity();

  double duration() const {
    return waypoints.empty() ? 0.0 : waypoints.back().t;
  }

  std::vector<Vec2> points() const {
    std::vector<Vec2> p;
    p.reserve(waypoints.size());
    for (const auto& w : waypoints) p.push_back(w.pos);
    return p;
  }

  // Piecewise-linear position; clamped to the endpoints outside [0, T].
  Vec2 position_at(double t) const {
    if (waypoints.empty()) return {0.0, 0.0};
    if (t <= waypoints.front().t) return waypoints.front().pos;
    if (t >= waypoints.back().t) return waypoints.back().pos;
    std::size_t i = 1;
    while (waypoints[i].t < t) ++i;
    const auto& a = waypoints[i - 1];
    const auto& b = waypoints[i];
    const double span = b.t - a.t;
    if (span <= 0.0) return b.pos;
    const double f = (t - a.t) / span;
    return a.pos + (b.pos - a.pos) * f;
  }
};

namespace detail {

inline constexpr double kCorridorHalfLenCm = 30.0;
inline constexpr double kCircleStepDeg = 5.0;

inline void append_leg(std::vector<Waypoint>& wps, Vec2 to, double speed) {
  const Vec2 from = wps.back().pos;
  const double t = wps.back().t + (to - from).norm() / speed;
  wps.push_back({to, t});
}

}  // namespace detail

// Builds the walker trajectory for one experiment.
//   scenario 1: door -> straight pass corridor at the sampled band
//               distance -> other door (with a touch-and-pause at the shell
//               for the contact band);
//   scenario 2: door -> radial approach -> one full circuit around the
//               robot at the band radius -> radial exit -> other door.
// The path's closest approach to the robot shell lands exactly on the
// sampled in-band distance.
inline WalkerPath build_walker_path(int scenario, ProximityBand band,
                                    int door_start, int door_end,
                                    const SimConfig& cfg, Rng& rng) {
  if (scenario != kScenarioWalkAcross && scenario != kScenarioWalkAround) {
    throw std::invalid_argument(
        "build_walker_path: scenario must be 1 or 2 (scenario 0 has no "
        "walker)");
  }
  if (door_start == door_end || door_start < 0 || door_start > 2 ||
      door_end < 0 || door_end > 2) {
    throw std::invalid_argument("build_walker_path: bad door pair");
  }
  const Vec2 a = cfg.doors[static_cast<std::size_t>(door_start)];
  const Vec2 b = cfg.doors[static_cast<std::size_t>(door_end)];
  const double shell_dist =
      band.is_contact() ? 0.0 : rng.uniform(band.lo_cm(), band.hi_cm());
  const double radius = cfg.bumper_radius_cm + shell_dist;
  const double speed = cfg.walker_speed_cm_s;

  WalkerPath path;
  path.scenario = scenario;
  path.waypoints.push_back({a, 0.0});

  if (scenario == kScenarioWalkAcross) {
    const Vec2 u = (b - a).normalized();
    const Vec2 foot = a + u * (Vec2{0, 0} - a).dot(u);  // origin onto line ab
    const Vec2 toward =
        foot.norm() > 1e-9 ? foot.normalized() : u.perp();
    const Vec2 near = toward * radius;
    detail::append_leg(path.waypoints, near - u * detail::kCorridorHalfLenCm,
                       speed);
    detail::append_leg(path.waypoints, near, speed);
    if (band.is_contact() && cfg.contact_dwell_s > 0.0) {
      path.waypoints.push_back(
          {near, path.waypoints.back().t + cfg.contact_dwell_s});
    }
    detail::append_leg(path.waypoints, near + u * detail::kCorridorHalfLenCm,
                       speed);
    detail::append_leg(path.waypoints, b, speed);
  } else {
    // Circle waypoints sit slightly outside the band radius so the chord
    // midpoints touch it exactly.
    const double step = detail::kCircleStepDeg;
    const double ring = radius / std::cos(deg_to_rad(step / 2.0));
    const double theta_in = bearing_deg(a);
    const double theta_out = bearing_deg(b);
    const double dir = rng.bernoulli(0.5) ? 1.0 : -1.0;
    auto ring_point = [&](double theta_deg) {
      return Vec2{ring * std::cos(deg_to_rad(theta_deg)),
                  ring * std::sin(deg_to_rad(theta_deg))};
    };
    detail::append_leg(path.waypoints, ring_point(theta_in), speed);
    const double exit_arc =
        dir > 0.0 ? wrap_deg(theta_out - theta_in) : wrap_deg(theta_in - theta_out);
    const double total_arc = 360.0 + exit_arc;
    const int n_steps = static_cast<int>(std::ceil(total_arc / step));
    for (int i = 1; i <= n_steps; ++i) {
      const double arc = std::min(step * i, total_arc);
      detail::append_leg(path.waypoints, ring_point(theta_in + dir * arc),
                         speed);
    }
    detail::append_leg(path.waypoints, b, speed);
  }

  const auto pts = path.points();
  const double min_center = polyline_min_origin_distance(pts);
  path.closest_approach_cm =
      std::max(0.0, min_center - cfg.bumper_radius_cm);
  return path;
}

// ---------------------------------------------------------------------------
// Sensor response model
// ---------------------------------------------------------------------------

namespace detail {

inline int clamp_adc(double v, double lo, double hi) {
  return static_cast<int>(std::lround(std::clamp(v, lo, hi)));
}

// Round through the decimal text form so a value survives the CSV
// round trip bit for bit.
inline double quantize_decimal(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return std::strtod(buf, nullptr);
}

inline double heat_gain(double dist_cm, double scale_cm) {
  const double g = scale_cm / (scale_cm + std::max(dist_cm, 0.0));
  return g * std::sqrt(g);  // exponent 1.5
}

}  // namespace detail

// First-order thermometer lag state carried across an experiment's ticks.
struct ThermometerState {
  double a = 0.0;
  double b = 0.0;
  double last_t = 0.0;
  bool initialized = false;
};

// One observation of all 15 sensors at time t with the robot at heading
// degrees and the walker (if any) at the given position. All noise comes
// from the provided rng; the draw order is fixed so streams are stable.
// Without a ThermometerState the thermometers report their settled values;
// with one they follow the configured first-order lag between ticks.
inline Observation sense(double t, double heading,
                         const std::optional<Vec2>& walker,
                         const SimConfig& cfg, Rng& rng,
                         ThermometerState* therm_state = nullptr) {
  // Fixed noise draw order: ir medium, ir long, photo, therm a, therm b,
  // cliffs left to right, wall.
  const double n_ir_m = rng.normal(0.0, cfg.noise_ir);
  const double n_ir_l = rng.normal(0.0, cfg.noise_ir);
  const double n_photo = rng.normal(0.0, cfg.noise_photo);
  const double n_therm_a = rng.normal(0.0, cfg.noise_therm_c);
  const double n_therm_b = rng.normal(0.0, cfg.noise_therm_c);
  std::array<double, 4> n_cliff{};
  for (auto& n : n_cliff) n = rng.normal(0.0, cfg.noise_cliff);
  const double n_wall = rng.normal(0.0, cfg.noise_wall);

  double walker_bearing = 0.0;
  double walker_dist = std::numeric_limits<double>::infinity();  // from shell
  if (walker) {
    walker_bearing = bearing_deg(*walker);
    walker_dist = std::max(0.0, walker->norm() - cfg.bumper_radius_cm);
  }
  auto in_cone = [&](double facing_deg, double half_deg) {
    return walker &&
           std::fabs(angle_diff_deg(walker_bearing, facing_deg)) <= half_deg;
  };

  Observation obs;
  obs.t = detail::quantize_decimal(t, 6);

  // Rear IR rangers: monotone-decreasing distance response inside the
  // physical range, background otherwise.
  const double rear = heading + 180.0;
  double ir_m = cfg.ir_medium_bg;
  if (in_cone(rear, cfg.ir_fov_half_deg) && walker_dist >= kIrMediumMinCm &&
      walker_dist <= kIrMediumMaxCm) {
    ir_m = cfg.ir_medium_gain / (walker_dist + cfg.ir_medium_offset_cm);
  }
  double ir_l = cfg.ir_long_bg;
  if (in_cone(rear, cfg.ir_fov_half_deg) && walker_dist >= kIrLongMinCm &&
      walker_dist <= kIrLongMaxCm) {
    ir_l = cfg.ir_long_gain / (walker_dist + cfg.ir_long_offset_cm);
  }
  obs.ir_rear_medium = detail::clamp_adc(ir_m + n_ir_m, 0, 1023);
  obs.ir_rear_long = detail::clamp_adc(ir_l + n_ir_l, 0, 1023);

  // Photo cell: slight forward directionality plus a shadow dip when the
  // walker stands between the light and the robot.
  double photo = cfg.ambient_light +
                 cfg.photo_heading_amp *
                     std::cos(deg_to_rad(heading - cfg.light_bearing_deg));
  if (in_cone(cfg.light_bearing_deg, cfg.shadow_half_deg)) {
    photo -= cfg.shadow_max * cfg.shadow_scale_cm /
             (cfg.shadow_scale_cm + walker_dist);
  }
  obs.photo = detail::clamp_adc(photo + n_photo, 0, 1023);

  // Thermometers: opposite-facing, heading-cyclic offsets in opposite
  // phase, plus body heat when the walker is inside the view cone. The
  // sensed value trails the scene by the configured time constant.
  const double cycle =
      cfg.therm_heading_amp_c * std::cos(deg_to_rad(heading));
  double target_a = cfg.ambient_temp_c + cycle;
  double target_b = cfg.ambient_temp_c - cycle;
  const double body_delta = cfg.body_temp_c - cfg.ambient_temp_c;
  if (in_cone(heading, cfg.therm_fov_half_deg)) {
    target_a +=
        body_delta * detail::heat_gain(walker_dist, cfg.therm_body_scale_cm);
  }
  if (in_cone(heading + 180.0, cfg.therm_fov_half_deg)) {
    target_b +=
        body_delta * detail::heat_gain(walker_dist, cfg.therm_body_scale_cm);
  }
  double therm_a = target_a;
  double therm_b = target_b;
  if (therm_state != nullptr && cfg.therm_time_const_s > 0.0) {
    if (!therm_state->initialized) {
      therm_state->a = target_a;
      therm_state->b = target_b;
      therm_state->initialized = true;
    } else {
      const double dt = std::max(0.0, t - therm_state->last_t);
      const double blend = 1.0 - std::exp(-dt / cfg.therm_time_const_s);
      therm_state->a += blend * (target_a - therm_state->a);
      therm_state->b += blend * (target_b - therm_state->b);
    }
    therm_state->last_t = t;
    therm_a = therm_state->a;
    therm_b = therm_state->b;
  }
  const auto& therm_spec = sensor_table()[kThermA];
  obs.therm_a = std::clamp(detail::quantize_decimal(therm_a + n_therm_a, 2),
                           therm_spec.lo, therm_spec.hi);
  obs.therm_b = std::clamp(detail::quantize_decimal(therm_b + n_therm_b, 2),
                           therm_spec.lo, therm_spec.hi);

  // Cliff sensors: floor IR return dips when the walker stands close in
  // front of that sensor.
  std::array<int*, 4> cliff_out = {&obs.cliff_left, &obs.cliff_front_left,
                                   &obs.cliff_front_right, &obs.cliff_right};
  for (std::size_t i = 0; i < 4; ++i) {
    double v = cfg.cliff_bg[i];
    if (in_cone(heading + kCliffOffsetsDeg[i], cfg.cliff_fov_half_deg) &&
        walker_dist <= cfg.cliff_range_cm) {
      v -= cfg.cliff_dip * (1.0 - walker_dist / cfg.cliff_range_cm);
    }
    *cliff_out[i] = detail::clamp_adc(v + n_cliff[i], 0, 4095);
  }

  // Wall sensor: right-facing, very short range.
  double wall = cfg.wall_bg;
  if (in_cone(heading - 90.0, 30.0) && walker_dist <= cfg.wall_range_cm) {
    wall += cfg.wall_gain * (1.0 - walker_dist / cfg.wall_range_cm);
  }
  obs.wall = detail::clamp_adc(wall + n_wall, 0, 4095);

  // Bumper switches: only on shell contact, mapped by where the walker
  // sits relative to the heading. Rear contacts do not reach the bumper.
  if (walker && walker_dist <= cfg.contact_eps_cm) {
    const double rel = angle_diff_deg(walker_bearing, heading);
    if (std::fabs(rel) <= 20.0) {
      obs.bump_left = true;
      obs.bump_right = true;
    } else if (rel > 20.0 && rel <= 95.0) {
      obs.bump_left = true;
    } else if (rel < -20.0 && rel >= -95.0) {
      obs.bump_right = true;
    }
  }

  // Wheel-drop switches never fire while the robot sits on the floor.
  return obs;
}

// ---------------------------------------------------------------------------
// Experiments and campaigns
// ---------------------------------------------------------------------------

// One labeled run: draws the door pair, the observation count and the
// sampling clock, builds the walker path, and senses every tick. The
// walker traversal is time-scaled to span the whole experiment.
// Deterministic for a fixed seed.
inline Experiment simulate_experiment(const SimConfig& cfg, int scenario,
                                      ProximityBand band, std::uint64_t seed,
                                      int id = 0) {
  if (scenario < 0 || scenario >= kScenarioCount || band.index < 0 ||
      band.index >= kProximityBandCount) {
    throw std::invalid_argument("simulate_experiment: bad condition");
  }
  Rng rng(seed);

  Experiment exp;
  exp.id = id;
  exp.scenario = scenario;
  exp.proximity = band.index;
  exp.door_start = static_cast<int>(rng.uniform_index(3));
  exp.door_end =
      static_cast<int>((exp.door_start + 1 + rng.uniform_index(2)) % 3);

  const int count = sample_observation_count(scenario, rng);
  std::vector<double> times(static_cast<std::size_t>(count));
  double t = 0.0;
  for (auto& ti : times) {
    t += rng.uniform(cfg.dt_lo, cfg.dt_hi);
    ti = t;
  }
  const double duration = times.back();

  std::optional<WalkerPath> path;
  if (scenario != kScenarioEmpty) {
    path = build_walker_path(scenario, band, exp.door_start, exp.door_end,
                             cfg, rng);
  }

  exp.observations.reserve(times.size());
  ThermometerState therm_state;
  for (double ti : times) {
    std::optional<Vec2> walker;
    if (path) {
      walker = path->position_at(ti / duration * path->duration());
    }
    exp.observations.push_back(
        sense(ti, scan_heading(ti), walker, cfg, rng, &therm_state));
  }
  return exp;
}

// The full campaign: 10 experiments for each of the 15 scenario-proximity
// conditions, run in a random order. Empty-room runs keep a nominal
// proximity label so the condition grid stays a uniform 3x5. Each
// experiment gets its own seed derived from the campaign seed by a stable
// rule, so the campaign is reproducible bit for bit.
inline Dataset simulate_campaign(const SimConfig& cfg, std::uint64_t seed) {
  struct Slot {
    int scenario;
    int band;
    int rep;
  };
  std::vector<Slot> slots;
  slots.reserve(150);
  for (int s = 0; s < kScenarioCount; ++s) {
    for (int b = 0; b < kProximityBandCount; ++b) {
      for (int r = 0; r < 10; ++r) slots.push_back({s, b, r});
    }
  }
  Rng order_rng(derive_seed(seed, 0xfeedULL));
  order_rng.shuffle(slots);

  Dataset ds;
  ds.seed = seed;
  ds.config_digest = config_digest(cfg);
  ds.experiments.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto [s, b, r] = slots[i];
    const auto tag = static_cast<std::uint64_t>((s * 5 + b) * 10 + r + 1);
    ds.experiments.push_back(simulate_experiment(
        cfg, s, ProximityBand{b}, derive_seed(seed, tag),
        static_cast<int>(i)));
  }
  return ds;
}

}  // namespace senselab
