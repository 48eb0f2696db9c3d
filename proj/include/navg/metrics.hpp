#pragma once

#include <optional>
#include <span>
#include <vector>

#include "navg/reward.hpp"

namespace navg {

/// World snapshot used for after-the-fact analysis.
struct TrajectorySample {
  double t = 0.0;
  RobotState robot;
  std::vector<HumanState> pedestrians;  // ground truth
};

enum class PassSide { kFront, kBehind };

struct PassEvent {
  int pedestrian = 0;
  PassSide side = PassSide::kFront;
  double t = 0.0;
};

/// A pass fires at each local minimum of robot-pedestrian distance that is
/// within `radius`; the robot is behind when (robot - pedestrian) points
/// against the pedestrian's velocity. Stationary pedestrians never pass.
std::vector<PassEvent> detect_pass_events(std::span<const TrajectorySample> trajectory, double radius = 2.0);

struct EpisodeResult {
  EpisodeStatus status = EpisodeStatus::kRunning;
  double elapsed = 0.0;  // seconds, at most the timeout
  std::vector<TrajectorySample> trajectory;
  std::vector<PassEvent> pass_events;
};

/// Undefined entries are empty, never silently zero.
struct Metrics {
  std::size_t episodes = 0;
  std::size_t successes = 0;
  std::size_t pass_events = 0;
  std::optional<double> success;       // fraction
  std::optional<double> time_success;  // s, mean over successes
  std::optional<double> stl;           // s, failures charged t_max
  std::optional<double> behind;        // fraction of pass events

  bool defined() const { return episodes > 0; }
};

Metrics compute_metrics(std::span<const EpisodeResult> results, double t_max);

}  // namespace navg
