#pragma once

#include <algorithm>
#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "navg/guidance.hpp"
#include "navg/types.hpp"

namespace navg {

/// Robot-centric polar vector; bin k covers [k, k+1) * 2*pi/n counterclockwise
/// from the heading. All values lie in [0, 1].
using PolarVector = Eigen::VectorXd;

/// How the three projected pedestrian positions are merged per bin.
enum class HumanAggregation {
  kMax,         // closest approach dominates
  kMinNonzero,  // smallest non-zero value across timesteps
};

/// Rectangular body, centered on the robot position, length along the heading.
/// A zero-size footprint is a point.
struct Footprint {
  double length = 0.0;
  double width = 0.0;
  double support(double angle) const { return rectangle_support(0.5 * length, 0.5 * width, angle); }
};

/// One lidar return in the robot frame. Ranges >= d_max are treated as no return.
struct LaserRay {
  double angle = 0.0;
  double range = 0.0;
};

struct EncoderParams {
  int n = 72;
  double d_max = 10.0;
  double future_dt = 0.4;     // spacing of the projected pedestrian positions
  double goal_norm = 20.0;    // goal distance normaliser
  HumanAggregation aggregation = HumanAggregation::kMax;
  Footprint footprint{0.824, 0.624};
};

/// Bin of a robot-frame angle. A small tolerance keeps angles that sit on a
/// bin edge (up to rounding) in the bin that starts there.
int bin_index(double angle, int n);

/// Proximity value 1 - d/d_max clipped to [0, 1].
inline double proximity(double distance, double d_max) {
  return std::clamp(1.0 - distance / d_max, 0.0, 1.0);
}

PolarVector encode_guidance(std::span<const GuidancePoint> points, const Pose2& pose, int n, double d_max);

/// Per bin: largest edge distance (range minus footprint support along the ray)
/// over the rays in the bin, clamped to [0, d_max] and divided by d_max. Empty
/// bins and bins with only no-return rays read 1.
PolarVector sparsify_laser(std::span<const LaserRay> scan, int n, double d_max, const Footprint& footprint);

/// Number of body samples used for one circle; even, so the nearest point is sampled.
int circle_samples(double center_distance, double radius, int n);

PolarVector encode_human(const HumanState& h, const Pose2& pose, int n, double d_max, double dt,
                         HumanAggregation aggregation = HumanAggregation::kMax);

/// Far to near; equal distances by ascending id.
std::vector<HumanState> order_humans(std::span<const HumanState> humans, const Pose2& pose);

struct GoalFeature {
  double distance = 0.0;  // normalised, [0, 1]
  double angle = 0.0;     // robot frame, (-pi, pi]
};

/// Network input for one timestep.
struct ObservationFrame {
  int n = 0;
  PolarVector guidance;
  PolarVector laser_now;
  PolarVector laser_prev;
  // Far to near. With nobody detected this holds one all-zero vector and
  // human_ids is empty.
  std::vector<PolarVector> humans;
  std::vector<int> human_ids;
  GoalFeature goal;
  std::array<Eigen::Vector2d, 3> action_history{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
                                                Eigen::Vector2d::Zero()};  // oldest first, each in [-1, 1]^2
};

struct ObservationInputs {
  Pose2 pose;
  Vec2 goal = Vec2::Zero();
  std::span<const GuidancePoint> guidance;
  std::span<const LaserRay> laser;
  std::span<const HumanState> humans;
  PolarVector laser_prev;                 // zeros at episode start
  std::array<Action, 3> action_history;  // oldest first
};

/// Throws std::invalid_argument when laser_prev does not have params.n bins.
ObservationFrame assemble_observation(const ObservationInputs& in, const EncoderParams& params,
                                      const KinematicLimits& limits);

}  // namespace navg
