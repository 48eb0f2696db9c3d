#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "navg/grid_map.hpp"
#include "navg/polar_encoding.hpp"
#include "navg/types.hpp"

namespace navg {

/// Robot pose is the center of the rectangular body; speed is the rear-wheel
/// speed and steer the front-wheel angle.
struct RobotState {
  Pose2 pose;
  double speed = 0.0;
  double steer = 0.0;

  Box footprint(const KinematicLimits& limits) const {
    return Box{pose.position, {0.5 * limits.length, 0.5 * limits.width}, pose.heading};
  }
};

struct StepInfo {
  bool clamped = false;  // commanded action was outside the limits
};

/// Clamps the command, ramps speed and steer toward it under the rate limits,
/// then integrates the bicycle model with the midpoint heading.
RobotState step_robot(const RobotState& state, const Action& action, double dt, const KinematicLimits& limits,
                      StepInfo* info = nullptr);

/// Walks back and forth between two waypoints at constant speed.
struct Pedestrian {
  int id = 0;
  double radius = 0.3;
  Vec2 from = Vec2::Zero();
  Vec2 to = Vec2::Zero();
  double speed = 0.0;
  double progress = 0.0;  // meters from `from` along the script
  int direction = 1;      // +1 toward `to`, -1 toward `from`

  double length() const { return (to - from).norm(); }
  Vec2 position() const;
  Vec2 velocity() const;
  HumanState state() const { return {id, position(), velocity(), radius}; }
};

struct WorldState {
  std::string template_name;
  std::uint64_t seed = 0;
  Vec2 bounds_min = Vec2::Zero();
  Vec2 bounds_max = Vec2::Zero();
  std::vector<Circle> circles;
  std::vector<Box> boxes;  // walls and rectangular or elongated obstacles
  std::vector<Pedestrian> pedestrians;
  RobotState robot;
  Vec2 goal = Vec2::Zero();
  long steps = 0;
  double dt = 0.2;

  /// Simulated time; derived from the step count so it never drifts.
  double clock() const { return static_cast<double>(steps) * dt; }
  std::vector<HumanState> humans() const;
};

void step_pedestrians(std::vector<Pedestrian>& pedestrians, double dt);

/// Equally spaced rays from angle 0 (robot heading), counterclockwise.
std::vector<LaserRay> raycast_lidar(const WorldState& world, const Pose2& pose, int ray_count, double d_max);

/// First hit along a world direction against static obstacles only.
double cast_static(const WorldState& world, const Vec2& origin, const Vec2& dir, double d_max);

/// Occupancy of the static obstacles over the world bounds; a cell is occupied
/// when its center lies inside an obstacle.
OccupancyGrid rasterize(const WorldState& world, double resolution);

/// Smallest separation between the robot body and any obstacle or pedestrian; 0 on contact.
double robot_clearance(const WorldState& world, const KinematicLimits& limits);

bool robot_in_bounds(const WorldState& world, const KinematicLimits& limits);

/// Static obstacle clearance of a disc, 0 on contact.
double disc_clearance(const WorldState& world, const Circle& c);

}  // namespace navg
