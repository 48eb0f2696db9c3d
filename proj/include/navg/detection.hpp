#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "navg/world.hpp"

namespace navg {

enum class DetectionKind { kTruth, kGaussian, kDegraded };

/// Synthetic pedestrian detector. `gaussian` adds zero-mean noise to the true
/// states; `degraded` also drops pedestrians and reports false ones (negative
/// ids) next to static obstacles.
struct DetectionModel {
  DetectionKind kind = DetectionKind::kTruth;
  double sigma_pos = 0.1;   // m
  double sigma_vel = 0.1;   // m/s
  double p_miss = 0.1;
  double p_false = 0.2;     // per frame
  double false_radius = 0.3;

  /// "truth", "gaussian" or "degraded" with default parameters.
  static DetectionModel parse(const std::string& name);
  std::string name() const;
};

/// Pedestrians within d_max whose centers are not hidden behind static obstacles.
std::vector<HumanState> visible_humans(const WorldState& world, const Pose2& pose, double d_max);

std::vector<HumanState> detect_humans(const WorldState& world, const Pose2& pose, const DetectionModel& model,
                                      double d_max, std::mt19937_64& rng);

}  // namespace navg
