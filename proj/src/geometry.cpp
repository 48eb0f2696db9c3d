#include "navg/geometry.hpp"

#include <algorithm>
#include <limits>

namespace navg {

std::array<Vec2, 4> Box::corners() const {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const Vec2 ax{c * half_extents.x(), s * half_extents.x()};
  const Vec2 ay{-s * half_extents.y(), c * half_extents.y()};
  // counterclockwise
  return {center - ax - ay, center + ax - ay, center + ax + ay, center - ax + ay};
}

bool Box::contains(const Vec2& p) const {
  const Vec2 d = p - center;
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double lx = c * d.x() + s * d.y();
  const double ly = -s * d.x() + c * d.y();
  return std::abs(lx) <= half_extents.x() && std::abs(ly) <= half_extents.y();
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Vec2& p, const Segment& s) {
  const Vec2 ab = s.b - s.a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - s.a).norm();
  const double t = std::clamp((p - s.a).dot(ab) / len2, 0.0, 1.0);
  return (p - (s.a + t * ab)).norm();
}

bool segments_intersect(const Segment& s, const Segment& t) {
  const auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
  };
  const auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
  };
  const int o1 = orient(s.a, s.b, t.a), o2 = orient(s.a, s.b, t.b);
  const int o3 = orient(t.a, t.b, s.a), o4 = orient(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
  return false;
}

double segment_segment_distance(const Segment& s, const Segment& t) {
  if (segments_intersect(s, t)) return 0.0;
  return std::min({point_segment_distance(s.a, t), point_segment_distance(s.b, t),
                   point_segment_distance(t.a, s), point_segment_distance(t.b, s)});
}

std::optional<double> ray_segment(const Vec2& origin, const Vec2& dir, const Segment& s) {
  const Vec2 e = s.b - s.a;
  const double denom = cross(dir, e);
  const Vec2 w = s.a - origin;
  if (std::abs(denom) < 1e-15) {
    // parallel; only a collinear overlap can hit, take the nearest endpoint ahead
    if (std::abs(cross(w, dir)) > 1e-12) return std::nullopt;
    const double ta = (s.a - origin).dot(dir), tb = (s.b - origin).dot(dir);
    if (ta < 0.0 && tb < 0.0) return std::nullopt;
    if (ta <= 0.0 || tb <= 0.0) return 0.0;
    return std::min(ta, tb);
  }
  const double t = cross(w, e) / denom;
  const double u = cross(w, dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

std::optional<double> ray_circle(const Vec2& origin, const Vec2& dir, const Circle& c) {
  const Vec2 m = origin - c.center;
  const double b = m.dot(dir);
  const double cc = m.squaredNorm() - c.radius * c.radius;
  if (cc <= 0.0) return 0.0;  // origin inside
  if (b > 0.0) return std::nullopt;
  const double disc = b * b - cc;
  if (disc < 0.0) return std::nullopt;
  return -b - std::sqrt(disc);
}

std::optional<double> ray_box(const Vec2& origin, const Vec2& dir, const Box& b) {
  if (b.contains(origin)) return 0.0;
  const auto c = b.corners();
  std::optional<double> best;
  for (std::size_t i = 0; i < 4; ++i) {
    if (auto t = ray_segment(origin, dir, {c[i], c[(i + 1) % 4]})) {
      if (!best || *t < *best) best = t;
    }
  }
  return best;
}

bool polygon_contains(std::span<const Vec2> poly, const Vec2& p) {
  // convex, either orientation
  int sign = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const double v = cross(poly[(i + 1) % poly.size()] - poly[i], p - poly[i]);
    const int sv = (v > 0.0) - (v < 0.0);
    if (sv == 0) continue;
    if (sign == 0) sign = sv;
    else if (sv != sign) return false;
  }
  return true;
}

double polygon_circle_clearance(std::span<const Vec2> poly, const Circle& c) {
  if (polygon_contains(poly, c.center)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    d = std::min(d, point_segment_distance(c.center, {poly[i], poly[(i + 1) % poly.size()]}));
  }
  return std::max(0.0, d - c.radius);
}

double polygon_polygon_clearance(std::span<const Vec2> p, std::span<const Vec2> q) {
  if (!p.empty() && polygon_contains(q, p[0])) return 0.0;
  if (!q.empty() && polygon_contains(p, q[0])) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Segment a{p[i], p[(i + 1) % p.size()]};
    for (std::size_t j = 0; j < q.size(); ++j) {
      d = std::min(d, segment_segment_distance(a, {q[j], q[(j + 1) % q.size()]}));
    }
  }
  return d;
}

double rectangle_support(double half_length, double half_width, double angle) {
  const double c = std::abs(std::cos(angle)), s = std::abs(std::sin(angle));
  double d = std::numeric_limits<double>::infinity();
  if (c > 0.0) d = std::min(d, half_length / c);
  if (s > 0.0) d = std::min(d, half_width / s);
  return std::isfinite(d) ? d : 0.0;
}

}  // namespace navg
