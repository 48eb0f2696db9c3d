#pragma once

#include <string>

#include "navg/world.hpp"

namespace navg {

struct RewardParams {
  double w1 = 1.0;
  double w2 = 0.1;
  double w3 = 1.0;
  double d_safe = 0.5;    // m
  double d_danger = 0.1;  // m
  double timeout = 60.0;  // s
  double goal_radius = 0.3;

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

enum class EpisodeStatus { kRunning, kSuccess, kCollision, kTimeout, kError };

std::string to_string(EpisodeStatus s);
EpisodeStatus status_from_string(const std::string& s);

/// The case term of the reward; exactly one applies per step.
enum class RewardCase { kGoal, kCollision, kTimeout, kProximity, kClear };

std::string to_string(RewardCase c);

struct RewardBreakdown {
  double v_parallel = 0.0;  // velocity projected on the goal direction
  double progress = 0.0;    // w1 * v_parallel
  double steer_penalty = 0.0;  // w2 * |steer|, subtracted
  RewardCase reward_case = RewardCase::kClear;
  double case_value = 0.0;  // unweighted case value
  double clearance = 0.0;   // d_t
  double total = 0.0;
};

/// Velocity is the current state's, the goal direction is taken from the
/// position at the start of the step.
RewardBreakdown compute_reward(const RobotState& prev, const RobotState& cur, const Vec2& goal, double clearance,
                               EpisodeStatus status, const RewardParams& params);

/// Priority collision > success > timeout. Leaving the world bounds is a collision.
EpisodeStatus check_termination(const WorldState& world, const RewardParams& params, const KinematicLimits& limits);

}  // namespace navg
