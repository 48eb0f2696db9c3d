#include "navg/polar_encoding.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace navg {

int bin_index(double angle, int n) {
  const double u = wrap_two_pi(angle) * n / kTwoPi;
  const int k = static_cast<int>(std::floor(u + 1e-9));
  return k >= n ? k - n : k;
}

PolarVector encode_guidance(std::span<const GuidancePoint> points, const Pose2& pose, int n, double d_max) {
  PolarVector out = PolarVector::Zero(n);
  for (const GuidancePoint& g : points) {
    const Vec2 local = pose.to_local(g.position);
    const int k = bin_index(std::atan2(local.y(), local.x()), n);
    out[k] = std::max(out[k], proximity(local.norm(), d_max));
  }
  return out;
}

PolarVector sparsify_laser(std::span<const LaserRay> scan, int n, double d_max, const Footprint& footprint) {
  PolarVector edge = PolarVector::Constant(n, -1.0);  // -1: no return in bin yet
  for (const LaserRay& r : scan) {
    if (!(r.range < d_max)) continue;
    const int k = bin_index(r.angle, n);
    edge[k] = std::max(edge[k], std::clamp(r.range - footprint.support(r.angle), 0.0, d_max));
  }
  PolarVector out(n);
  for (int k = 0; k < n; ++k) out[k] = edge[k] < 0.0 ? 1.0 : edge[k] / d_max;
  return out;
}

int circle_samples(double center_distance, double radius, int n) {
  if (radius <= 0.0) return 2;
  const double bin_width = kTwoPi / n;
  // chord spacing at the nearest point well under one bin
  const double near = std::max(center_distance - radius, 0.05);
  const double spacing = 0.25 * near * bin_width;
  const double count = std::ceil(kTwoPi * radius / spacing);
  int s = static_cast<int>(std::min(count, 16384.0));
  s = std::max(s, std::max(16, 4 * n));
  return s + (s % 2);
}

PolarVector encode_human(const HumanState& h, const Pose2& pose, int n, double d_max, double dt,
                         HumanAggregation aggregation) {
  std::array<PolarVector, 3> steps;
  for (int t = 0; t < 3; ++t) {
    PolarVector v = PolarVector::Zero(n);
    const Vec2 center = h.position + h.velocity * (t * dt);
    const Vec2 rel = center - pose.position;
    const double dist = rel.norm();
    const int s_count = circle_samples(dist, h.radius, n);
    // sample 0 is the point nearest the robot
    const double base = dist > 0.0 ? std::atan2(rel.y(), rel.x()) + std::numbers::pi : 0.0;
    for (int s = 0; s < s_count; ++s) {
      const double phi = base + kTwoPi * s / s_count;
      const Vec2 p = center + h.radius * Vec2(std::cos(phi), std::sin(phi));
      const Vec2 local = pose.to_local(p);
      const int k = bin_index(std::atan2(local.y(), local.x()), n);
      v[k] = std::max(v[k], proximity(local.norm(), d_max));
    }
    steps[t] = std::move(v);
  }
  PolarVector out = PolarVector::Zero(n);
  for (int k = 0; k < n; ++k) {
    if (aggregation == HumanAggregation::kMax) {
      out[k] = std::max({steps[0][k], steps[1][k], steps[2][k]});
    } else {
      double best = 0.0;
      for (const PolarVector& v : steps) {
        if (v[k] > 0.0 && (best == 0.0 || v[k] < best)) best = v[k];
      }
      out[k] = best;
    }
  }
  return out;
}

std::vector<HumanState> order_humans(std::span<const HumanState> humans, const Pose2& pose) {
  std::vector<HumanState> out(humans.begin(), humans.end());
  std::stable_sort(out.begin(), out.end(), [&](const HumanState& a, const HumanState& b) {
    const double da = (a.position - pose.position).squaredNorm();
    const double db = (b.position - pose.position).squaredNorm();
    if (da != db) return da > db;
    return a.id < b.id;
  });
  return out;
}

ObservationFrame assemble_observation(const ObservationInputs& in, const EncoderParams& params,
                                      const KinematicLimits& limits) {
  if (params.n <= 0) throw std::invalid_argument("bin count must be positive");
  if (in.laser_prev.size() != params.n) {
    throw std::invalid_argument("previous laser vector has " + std::to_string(in.laser_prev.size()) +
                                " bins, expected " + std::to_string(params.n));
  }
  ObservationFrame f;
  f.n = params.n;
  f.guidance = encode_guidance(in.guidance, in.pose, params.n, params.d_max);
  f.laser_now = sparsify_laser(in.laser, params.n, params.d_max, params.footprint);
  f.laser_prev = in.laser_prev;
  for (const HumanState& h : order_humans(in.humans, in.pose)) {
    f.humans.push_back(encode_human(h, in.pose, params.n, params.d_max, params.future_dt, params.aggregation));
    f.human_ids.push_back(h.id);
  }
  if (f.humans.empty()) f.humans.push_back(PolarVector::Zero(params.n));
  const Vec2 local = in.pose.to_local(in.goal);
  f.goal.distance = std::clamp(local.norm() / params.goal_norm, 0.0, 1.0);
  f.goal.angle = local.squaredNorm() > 0.0 ? wrap_pi(std::atan2(local.y(), local.x())) : 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const Action& a = in.action_history[i];
    f.action_history[i] = Eigen::Vector2d(std::clamp(a.speed / limits.v_max, -1.0, 1.0),
                                          std::clamp(a.steer / limits.steer_max, -1.0, 1.0));
  }
  return f;
}

}  // namespace navg
