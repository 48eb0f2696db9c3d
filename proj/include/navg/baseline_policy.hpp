#pragma once

#include "navg/polar_encoding.hpp"
#include "navg/types.hpp"

namespace navg {

struct BaselineParams {
  double goal_bias = 1.0;       // how strongly bin value discounts angular distance to the goal
  double slowdown_gain = 0.8;   // speed fraction per meter of forward clearance beyond stop
  double lookahead = 1.0;       // pure-pursuit lookahead, m
  double stop_clearance = 0.12; // m, below this the robot backs off
  double creep_speed = 0.15;    // m/s, floor while the way ahead is not blocked
  double margin = 0.12;         // lateral margin added to the half-width when testing a heading, m
  double horizon = 3.0;         // how far ahead a heading must be clear, m
  double gap_margin = 0.1;      // m, guidance gaps narrower than the body plus twice this are skipped
  double safety_margin = 0.05;  // m, footprint inflation when sweeping the driven arc
  double arc_reach = 1.5;       // m, how far along the driven arc room is checked
  double reverse_until = 1.0;   // m, a reversing robot keeps reversing until the arc ahead has this much room
  double free_weight = 1.0;     // reward for free room along a heading, relative to alignment
  double blocked_distance = 0.4;  // m, a sharp turn with less room than this backs off first
  double forward_half_angle = 0.5;  // rad, cone used for the speed clearance
  double d_max = 10.0;          // must match the encoder
  double goal_norm = 20.0;      // must match the encoder
};

/// Deterministic guidance follower. The reference bearing is the goal when a
/// body-wide strip toward it is clear, otherwise the guidance bin closest to
/// the goal bearing (weighted by bin value, gaps too narrow for the body
/// skipped), otherwise the goal. The steering bearing trades alignment with
/// the reference against free room; steering is pure pursuit. Speed scales
/// with forward laser clearance and with the room along the driven arc; below
/// the stop clearance, or while a back-off is in progress (read from the
/// action history), the robot reverses with opposite steering. Pure function
/// of the observation.
Action baseline_act(const ObservationFrame& obs, const BaselineParams& params, const KinematicLimits& limits);

}  // namespace navg
