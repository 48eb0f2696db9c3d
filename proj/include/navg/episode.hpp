#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "navg/detection.hpp"
#include "navg/guidance.hpp"
#include "navg/metrics.hpp"
#include "navg/polar_encoding.hpp"
#include "navg/reward.hpp"
#include "navg/world.hpp"

namespace navg {

struct SimConfig {
  double dt = 0.2;
  int lidar_rays = 360;
  double grid_resolution = 0.1;
  EncoderParams encoder;
  GuidanceParams guidance;
  RewardParams reward;
  KinematicLimits limits;
  DetectionModel detection;

  /// Throws ConfigError.
  void validate() const;
};

void to_json(nlohmann::json& j, const SimConfig& c);
void from_json(const nlohmann::json& j, SimConfig& c);

/// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const SimConfig& c);

struct StepOutcome {
  ObservationFrame obs;
  RewardBreakdown reward;
  EpisodeStatus status = EpisodeStatus::kRunning;
  bool clamped = false;
};

/// One simulated episode: owns the world, the sensor history and the
/// detection rng. Not thread-safe; independent episodes may run in parallel.
class Episode {
 public:
  /// Without a detection seed the detector is seeded from the world seed.
  Episode(WorldState world, SimConfig config, std::optional<std::uint64_t> detection_seed = std::nullopt);

  const SimConfig& config() const { return config_; }
  const WorldState& world() const { return world_; }
  const ObservationFrame& observation() const { return obs_; }
  const std::vector<GuidancePoint>& guidance() const { return guidance_; }
  const std::vector<LaserRay>& laser() const { return laser_; }
  const std::vector<HumanState>& detections() const { return detections_; }
  const OccupancyGrid& grid() const { return grid_; }
  std::uint64_t detection_seed() const { return detection_seed_; }
  EpisodeStatus status() const { return status_; }
  bool done() const { return status_ != EpisodeStatus::kRunning; }
  double elapsed() const;
  double total_reward() const { return total_reward_; }
  const std::vector<TrajectorySample>& trajectory() const { return trajectory_; }

  /// Throws std::invalid_argument for non-finite actions (state untouched) and
  /// std::logic_error once the episode is over.
  StepOutcome step(const Action& action);

  EpisodeResult result() const;

 private:
  void sense();

  SimConfig config_;
  WorldState world_;
  OccupancyGrid grid_;
  StaticGuidance static_guidance_;
  std::uint64_t detection_seed_;
  std::mt19937_64 rng_;
  std::vector<GuidancePoint> guidance_;
  std::vector<LaserRay> laser_;
  std::vector<HumanState> detections_;
  PolarVector laser_prev_;
  std::array<Action, 3> history_{};
  ObservationFrame obs_;
  EpisodeStatus status_ = EpisodeStatus::kRunning;
  double total_reward_ = 0.0;
  std::vector<TrajectorySample> trajectory_;
};

using PolicyFn = std::function<Action(const ObservationFrame&)>;

/// Detection seed for a batch run: the world's default seed offset by the batch seed.
std::uint64_t batch_detection_seed(std::uint64_t world_seed, std::uint64_t batch_seed);

class EpisodeRecorder;

/// Steps until the episode ends. Policy exceptions propagate.
EpisodeResult run_episode(Episode& episode, const PolicyFn& policy, EpisodeRecorder* recorder = nullptr);

}  // namespace navg
