#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace senselab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{1.0, 0.0};
  }
  // counterclockwise quarter turn
  Vec2 perp() const { return {-y, x}; }
};

inline double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

// Wrap into [0, 360).
inline double wrap_deg(double d) {
  double w = std::fmod(d, 360.0);
  if (w < 0.0) w += 360.0;
  return w;
}

// Signed smallest difference a - b, in (-180, 180].
inline double angle_diff_deg(double a, double b) {
  double d = std::fmod(a - b, 360.0);
  if (d > 180.0) d -= 360.0;
  if (d <= -180.0) d += 360.0;
  return d;
}

// Bearing of p as seen from the origin, degrees in [0, 360).
inline double bearing_deg(Vec2 p) {
  return wrap_deg(rad_to_deg(std::atan2(p.y, p.x)));
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

// Minimum distance from the origin to a polyline.
inline double polyline_min_origin_distance(std::span<const Vec2> pts) {
  if (pts.empty()) return std::numeric_limits<double>::infinity();
  if (pts.size() == 1) return pts[0].norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    best = std::min(best, point_segment_distance({0, 0}, pts[i], pts[i + 1]));
  }
  return best;
}

// Total signed angle (degrees) swept around the origin along a polyline.
inline double polyline_winding_deg(std::span<const Vec2> pts) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    total += angle_diff_deg(bearing_deg(pts[i + 1]), bearing_deg(pts[i]));
  }
  return total;
}

}  // namespace senselab
