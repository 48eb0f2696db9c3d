#pragma once

#include <numbers>
#include <stdexcept>

#include "navg/geometry.hpp"

namespace navg {

/// Invalid configuration value (unknown model name, bad range, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Commanded (rear-wheel speed, front-wheel steer).
struct Action {
  double speed = 0.0;  // m/s
  double steer = 0.0;  // rad

  friend bool operator==(const Action&, const Action&) = default;
};

/// Kinematic envelope and body of the Ackermann platform.
struct KinematicLimits {
  double v_min = -0.1;
  double v_max = 1.0;
  double steer_max = std::numbers::pi / 4;
  double accel_max = 1.0;                      // m/s^2
  double steer_rate_max = std::numbers::pi / 2;  // rad/s
  double wheelbase = 0.6;
  double length = 0.824;
  double width = 0.624;
};

/// A detected or simulated pedestrian.
struct HumanState {
  int id = 0;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double radius = 0.3;
};

}  // namespace navg
