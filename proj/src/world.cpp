#include "navg/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace navg {

namespace {

double ramp(double current, double target, double max_delta) {
  return current + std::clamp(target - current, -max_delta, max_delta);
}

}  // namespace

RobotState step_robot(const RobotState& state, const Action& action, double dt, const KinematicLimits& limits,
                      StepInfo* info) {
  const double v_cmd = std::clamp(action.speed, limits.v_min, limits.v_max);
  const double phi_cmd = std::clamp(action.steer, -limits.steer_max, limits.steer_max);
  if (info) info->clamped = v_cmd != action.speed || phi_cmd != action.steer;

  RobotState next = state;
  next.speed = std::clamp(ramp(state.speed, v_cmd, limits.accel_max * dt), limits.v_min, limits.v_max);
  next.steer = std::clamp(ramp(state.steer, phi_cmd, limits.steer_rate_max * dt), -limits.steer_max,
                          limits.steer_max);
  const double heading = state.pose.heading + next.speed / limits.wheelbase * std::tan(next.steer) * dt;
  const double mid = 0.5 * (state.pose.heading + heading);
  next.pose.position = state.pose.position + next.speed * dt * Vec2(std::cos(mid), std::sin(mid));
  next.pose.heading = wrap_pi(heading);
  return next;
}

Vec2 Pedestrian::position() const {
  const double len = length();
  if (len == 0.0) return from;
  return from + (to - from) * (progress / len);
}

Vec2 Pedestrian::velocity() const {
  const double len = length();
  if (len == 0.0 || speed == 0.0) return Vec2::Zero();
  return (to - from) / len * (speed * direction);
}

std::vector<HumanState> WorldState::humans() const {
  std::vector<HumanState> out;
  out.reserve(pedestrians.size());
  for (const Pedestrian& p : pedestrians) out.push_back(p.state());
  return out;
}

void step_pedestrians(std::vector<Pedestrian>& pedestrians, double dt) {
  for (Pedestrian& p : pedestrians) {
    const double len = p.length();
    if (len == 0.0 || p.speed == 0.0) continue;
    double s = p.progress + p.direction * p.speed * dt;
    // reflect at the waypoints, possibly several times for long steps
    while (s < 0.0 || s > len) {
      if (s > len) {
        s = 2.0 * len - s;
        p.direction = -1;
      } else {
        s = -s;
        p.direction = 1;
      }
    }
    p.progress = s;
  }
}

double cast_static(const WorldState& world, const Vec2& origin, const Vec2& dir, double d_max) {
  double best = d_max;
  for (const Circle& c : world.circles) {
    if (auto t = ray_circle(origin, dir, c)) best = std::min(best, *t);
  }
  for (const Box& b : world.boxes) {
    if (auto t = ray_box(origin, dir, b)) best = std::min(best, *t);
  }
  return best;
}

std::vector<LaserRay> raycast_lidar(const WorldState& world, const Pose2& pose, int ray_count, double d_max) {
  std::vector<LaserRay> out;
  out.reserve(ray_count);
  for (int i = 0; i < ray_count; ++i) {
    const double angle = kTwoPi * i / ray_count;
    const double a = pose.heading + angle;
    const Vec2 dir(std::cos(a), std::sin(a));
    double range = cast_static(world, pose.position, dir, d_max);
    for (const Pedestrian& p : world.pedestrians) {
      if (auto t = ray_circle(pose.position, dir, Circle{p.position(), p.radius})) range = std::min(range, *t);
    }
    out.push_back({angle, range});
  }
  return out;
}

OccupancyGrid rasterize(const WorldState& world, double resolution) {
  const Vec2 span = world.bounds_max - world.bounds_min;
  const int width = std::max(1, static_cast<int>(std::ceil(span.x() / resolution - 1e-9)));
  const int height = std::max(1, static_cast<int>(std::ceil(span.y() / resolution - 1e-9)));
  OccupancyGrid grid(width, height, resolution, world.bounds_min + Vec2::Constant(0.5 * resolution));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec2 p = grid.cell_center({x, y});
      bool hit = false;
      for (const Circle& c : world.circles) hit = hit || (p - c.center).norm() <= c.radius;
      for (const Box& b : world.boxes) hit = hit || b.contains(p);
      if (hit) grid.set({x, y}, true);
    }
  }
  return grid;
}

double robot_clearance(const WorldState& world, const KinematicLimits& limits) {
  const auto body = world.robot.footprint(limits).corners();
  double best = std::numeric_limits<double>::infinity();
  for (const Circle& c : world.circles) best = std::min(best, polygon_circle_clearance(body, c));
  for (const Box& b : world.boxes) best = std::min(best, polygon_polygon_clearance(body, b.corners()));
  for (const Pedestrian& p : world.pedestrians) {
    best = std::min(best, polygon_circle_clearance(body, Circle{p.position(), p.radius}));
  }
  return best;
}

bool robot_in_bounds(const WorldState& world, const KinematicLimits& limits) {
  for (const Vec2& c : world.robot.footprint(limits).corners()) {
    if ((c.array() < world.bounds_min.array()).any() || (c.array() > world.bounds_max.array()).any()) return false;
  }
  return true;
}

double disc_clearance(const WorldState& world, const Circle& c) {
  double best = std::numeric_limits<double>::infinity();
  for (const Circle& o : world.circles) best = std::min(best, std::max(0.0, (o.center - c.center).norm() - o.radius - c.radius));
  for (const Box& b : world.boxes) best = std::min(best, polygon_circle_clearance(b.corners(), c));
  return best;
}

}  // namespace navg
