#include "navg/reward.hpp"

#include <cmath>

#include "navg/types.hpp"

namespace navg {

void RewardParams::validate() const {
  if (w1 < 0.0 || w2 < 0.0 || w3 < 0.0) throw ConfigError("reward weights must be non-negative");
  if (!(d_danger < d_safe)) throw ConfigError("d_danger must be smaller than d_safe");
  if (!(timeout > 0.0)) throw ConfigError("timeout must be positive");
  if (!(goal_radius > 0.0)) throw ConfigError("goal radius must be positive");
}

std::string to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::kRunning:
      return "running";
    case EpisodeStatus::kSuccess:
      return "success";
    case EpisodeStatus::kCollision:
      return "collision";
    case EpisodeStatus::kTimeout:
      return "timeout";
    case EpisodeStatus::kError:
      return "error";
  }
  return "error";
}

EpisodeStatus status_from_string(const std::string& s) {
  if (s == "running") return EpisodeStatus::kRunning;
  if (s == "success") return EpisodeStatus::kSuccess;
  if (s == "collision") return EpisodeStatus::kCollision;
  if (s == "timeout") return EpisodeStatus::kTimeout;
  if (s == "error") return EpisodeStatus::kError;
  throw std::invalid_argument("unknown episode status '" + s + "'");
}

std::string to_string(RewardCase c) {
  switch (c) {
    case RewardCase::kGoal:
      return "goal";
    case RewardCase::kCollision:
      return "collision";
    case RewardCase::kTimeout:
      return "timeout";
    case RewardCase::kProximity:
      return "proximity";
    case RewardCase::kClear:
      return "clear";
  }
  return "clear";
}

RewardBreakdown compute_reward(const RobotState& prev, const RobotState& cur, const Vec2& goal, double clearance,
                               EpisodeStatus status, const RewardParams& params) {
  RewardBreakdown r;
  const Vec2 to_goal = goal - prev.pose.position;
  const double dist = to_goal.norm();
  const Vec2 velocity = cur.speed * cur.pose.forward();
  r.v_parallel = dist > 0.0 ? velocity.dot(to_goal) / dist : 0.0;
  r.progress = params.w1 * r.v_parallel;
  r.steer_penalty = params.w2 * std::abs(cur.steer);
  r.clearance = clearance;

  if (status == EpisodeStatus::kSuccess) {
    r.reward_case = RewardCase::kGoal;
    r.case_value = 5.0;
  } else if (status == EpisodeStatus::kCollision || clearance < params.d_danger) {
    r.reward_case = RewardCase::kCollision;
    r.case_value = -10.0;
  } else if (status == EpisodeStatus::kTimeout) {
    r.reward_case = RewardCase::kTimeout;
    r.case_value = -5.0;
  } else if (clearance < params.d_safe) {
    r.reward_case = RewardCase::kProximity;
    r.case_value = clearance - params.d_safe;
  } else {
    r.reward_case = RewardCase::kClear;
    r.case_value = 0.0;
  }
  r.total = r.progress - r.steer_penalty + params.w3 * r.case_value;
  return r;
}

EpisodeStatus check_termination(const WorldState& world, const RewardParams& params, const KinematicLimits& limits) {
  if (!robot_in_bounds(world, limits) || robot_clearance(world, limits) <= 0.0) return EpisodeStatus::kCollision;
  if ((world.robot.pose.position - world.goal).norm() <= params.goal_radius) return EpisodeStatus::kSuccess;
  // tolerance keeps steps * dt == timeout from tripping on rounding
  if (world.clock() > params.timeout + 1e-9) return EpisodeStatus::kTimeout;
  return EpisodeStatus::kRunning;
}

}  // namespace navg
