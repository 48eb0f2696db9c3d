#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>

#include <Eigen/Dense>

namespace navg {

using Vec2 = Eigen::Vector2d;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2*pi).
inline double wrap_two_pi(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double a) {
  double w = wrap_two_pi(a);
  if (w > std::numbers::pi) w -= kTwoPi;
  return w;
}

/// Planar pose. Heading is the robot's forward (x) axis, counterclockwise
/// from the world x axis.
struct Pose2 {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;

  Vec2 forward() const { return {std::cos(heading), std::sin(heading)}; }

  /// World point expressed in the robot frame (x forward, y left).
  Vec2 to_local(const Vec2& world) const {
    const Vec2 d = world - position;
    const double c = std::cos(heading), s = std::sin(heading);
    return {c * d.x() + s * d.y(), -s * d.x() + c * d.y()};
  }

  Vec2 to_world(const Vec2& local) const {
    const double c = std::cos(heading), s = std::sin(heading);
    return position + Vec2{c * local.x() - s * local.y(), s * local.x() + c * local.y()};
  }
};

/// Circle primitive (pillars, pedestrian bodies).
struct Circle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// Oriented rectangle given by its center, half extents along its own axes and yaw.
struct Box {
  Vec2 center = Vec2::Zero();
  Vec2 half_extents = Vec2::Zero();
  double yaw = 0.0;

  std::array<Vec2, 4> corners() const;
  bool contains(const Vec2& p) const;
};

struct Segment {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
};

double cross(const Vec2& a, const Vec2& b);

double point_segment_distance(const Vec2& p, const Segment& s);

double segment_segment_distance(const Segment& s, const Segment& t);

bool segments_intersect(const Segment& s, const Segment& t);

/// Distance along a unit direction from origin to the first hit, if any, with t >= 0.
std::optional<double> ray_segment(const Vec2& origin, const Vec2& dir, const Segment& s);
std::optional<double> ray_circle(const Vec2& origin, const Vec2& dir, const Circle& c);
std::optional<double> ray_box(const Vec2& origin, const Vec2& dir, const Box& b);

/// Separation between a convex polygon and another shape; zero or negative
/// values are never returned, overlap is reported as 0.
double polygon_circle_clearance(std::span<const Vec2> poly, const Circle& c);
double polygon_polygon_clearance(std::span<const Vec2> p, std::span<const Vec2> q);
bool polygon_contains(std::span<const Vec2> poly, const Vec2& p);

/// Distance from the center of a centered rectangle to its edge along `angle`
/// (rectangle frame). Zero-size rectangles give zero.
double rectangle_support(double half_length, double half_width, double angle);

}  // namespace navg
