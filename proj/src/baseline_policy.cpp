#include "navg/baseline_policy.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace navg {

namespace {

double bin_center(int k, int n) { return wrap_pi((k + 0.5) * kTwoPi / n); }

double angle_between(double a, double b) { return std::abs(wrap_pi(a - b)); }

// Laser returns as robot-frame points (bin center direction, edge distance
// plus body support). Each bin keeps its farthest return, so a bin straddling
// an obstacle corner looks open; taking the minimum over the neighbouring bins
// closes those holes.
struct Obstacles {
  std::vector<Vec2> points;
};

Obstacles laser_points(const ObservationFrame& obs, const BaselineParams& p, const KinematicLimits& limits) {
  Obstacles o;
  const int n = obs.n;
  for (int k = 0; k < n; ++k) {
    const double v = std::min({obs.laser_now[(k + n - 1) % n], obs.laser_now[k], obs.laser_now[(k + 1) % n]});
    if (v >= 1.0) continue;
    const double a = bin_center(k, n);
    const double r = v * p.d_max + rectangle_support(0.5 * limits.length, 0.5 * limits.width, a);
    o.points.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return o;
}

// Distance a body-wide strip from the robot along `bearing` stays free, capped at `cap`.
double free_distance(const Obstacles& o, double bearing, double cap, double half_width) {
  const Vec2 dir(std::cos(bearing), std::sin(bearing));
  double free = cap;
  for (const Vec2& q : o.points) {
    const double along = q.dot(dir);
    if (along <= 0.0 || along >= free) continue;
    if (std::abs(q.x() * dir.y() - q.y() * dir.x()) < half_width) free = along;
  }
  return free;
}

// Raw laser returns as robot-frame points, used to judge gap widths.
std::vector<Vec2> raw_points(const ObservationFrame& obs, const BaselineParams& p, const KinematicLimits& limits) {
  std::vector<Vec2> out;
  for (int k = 0; k < obs.n; ++k) {
    if (obs.laser_now[k] >= 1.0) continue;
    const double a = bin_center(k, obs.n);
    const double r = obs.laser_now[k] * p.d_max + rectangle_support(0.5 * limits.length, 0.5 * limits.width, a);
    out.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return out;
}

// A guidance point sits midway between two obstacles, so its distance to the
// nearest return is about half the gap.
bool gap_passable(const std::vector<Vec2>& raw, const Vec2& point, double min_half_gap) {
  for (const Vec2& q : raw) {
    if ((q - point).norm() < min_half_gap) return false;
  }
  return true;
}

// Path length the inflated footprint can travel along a constant-curvature
// arc before touching a return; `direction` is +1 forward, -1 reverse.
double arc_room(const std::vector<Vec2>& raw, double curvature, double direction, double reach, double half_length,
                double half_width) {
  constexpr double kStep = 0.05;
  for (double s = kStep; s <= reach + 1e-12; s += kStep) {
    const double d = direction * s;
    const double th = curvature * d;
    const Vec2 c = std::abs(curvature) < 1e-9 ? Vec2(d, 0.0)
                                             : Vec2(std::sin(th) / curvature, (1.0 - std::cos(th)) / curvature);
    const double ct = std::cos(th), st = std::sin(th);
    for (const Vec2& q : raw) {
      const Vec2 r = q - c;
      const double lx = ct * r.x() + st * r.y();
      const double ly = -st * r.x() + ct * r.y();
      if (std::abs(lx) <= half_length && std::abs(ly) <= half_width) return s - kStep;
    }
  }
  return reach;
}

}  // namespace

Action baseline_act(const ObservationFrame& obs, const BaselineParams& p, const KinematicLimits& limits) {
  const Obstacles o = laser_points(obs, p, limits);
  const double half_width = 0.5 * limits.width + p.margin;
  const double goal_dist = obs.goal.distance * p.goal_norm;
  const double goal_angle = obs.goal.angle;

  // reference bearing: the goal when its strip is open, else the guidance bin
  // closest to the goal bearing (far points count as farther off), else the goal
  double ref = goal_angle;
  double ref_dist = goal_dist;
  const double goal_reach = std::min(goal_dist, p.horizon);
  if (free_distance(o, goal_angle, goal_reach, half_width) < goal_reach) {
    const std::vector<Vec2> raw = raw_points(obs, p, limits);
    const double min_half_gap = 0.5 * limits.width + p.gap_margin;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < obs.n; ++k) {
      const double v = obs.guidance[k];
      if (v <= 0.0) continue;
      const double a = bin_center(k, obs.n);
      const double dist = (1.0 - v) * p.d_max;
      if (!gap_passable(raw, dist * Vec2(std::cos(a), std::sin(a)), min_half_gap)) continue;
      const double score = angle_between(a, goal_angle) * (1.0 + p.goal_bias * (1.0 - v));
      if (score < best) {
        best = score;
        ref = a;
        ref_dist = dist;
      }
    }
  }

  // steer for the bin that trades closeness to the reference against free room
  const double cap = std::max(std::min(ref_dist, p.horizon), 1e-3);
  double bearing = ref;
  double free = free_distance(o, ref, cap, half_width);
  double best = 1.0 + p.free_weight * free / cap;
  for (int k = 0; k < obs.n; ++k) {
    const double a = bin_center(k, obs.n);
    const double f = free_distance(o, a, cap, half_width);
    const double score = std::cos(a - ref) + p.free_weight * f / cap;
    if (score > best) {
      best = score;
      bearing = a;
      free = f;
    }
  }

  // pure pursuit toward a point `lookahead` away along the bearing
  const double curvature = 2.0 * std::sin(bearing) / p.lookahead;
  const double steer = std::clamp(std::atan(limits.wheelbase * curvature), -limits.steer_max, limits.steer_max);

  double forward = p.d_max;
  for (int k = 0; k < obs.n; ++k) {
    if (angle_between(bin_center(k, obs.n), 0.0) > p.forward_half_angle) continue;
    forward = std::min(forward, obs.laser_now[k] * p.d_max);
  }
  const std::vector<Vec2> raw = raw_points(obs, p, limits);
  const double hl = 0.5 * limits.length + p.safety_margin;
  const double hw = 0.5 * limits.width + p.safety_margin;
  const double back_off = arc_room(raw, -std::tan(steer) / limits.wheelbase, -1.0, p.stop_clearance, hl, hw) > 0.0
                              ? limits.v_min
                              : 0.0;
  if (forward < p.stop_clearance) return {back_off, -steer};
  if (free < std::min(p.blocked_distance, cap) && std::abs(bearing) > p.forward_half_angle) return {back_off, -steer};

  // room along the arc actually driven caps the speed so the robot can still stop
  const double room = arc_room(raw, std::tan(steer) / limits.wheelbase, 1.0, p.arc_reach, hl, hw);
  if (room < p.stop_clearance) return {back_off, -steer};
  // once backing off, keep at it until the arc ahead has real room (the
  // previous achieved speed is part of the observation)
  if (obs.action_history[2].x() < 0.0 && room < p.reverse_until) return {back_off, -steer};
  double speed = limits.v_max * std::clamp(p.slowdown_gain * (forward - p.stop_clearance), 0.0, 1.0);
  speed = std::max(speed, p.creep_speed);
  speed *= std::max(0.3, std::cos(bearing));
  speed = std::min(speed, std::sqrt(2.0 * limits.accel_max * (room - p.stop_clearance)) + 0.5 * p.creep_speed);
  if (goal_dist < 1.0) speed = std::min(speed, std::max(0.3, goal_dist));
  return {std::clamp(speed, limits.v_min, limits.v_max), steer};
}

}  // namespace navg
