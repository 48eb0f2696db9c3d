#include "navg/detection.hpp"

#include <cmath>

namespace navg {

DetectionModel DetectionModel::parse(const std::string& name) {
  DetectionModel m;
  if (name == "truth") {
    m.kind = DetectionKind::kTruth;
  } else if (name == "gaussian") {
    m.kind = DetectionKind::kGaussian;
  } else if (name == "degraded") {
    m.kind = DetectionKind::kDegraded;
  } else {
    throw ConfigError("unknown detection model '" + name + "' (expected truth, gaussian or degraded)");
  }
  return m;
}

std::string DetectionModel::name() const {
  switch (kind) {
    case DetectionKind::kTruth:
      return "truth";
    case DetectionKind::kGaussian:
      return "gaussian";
    case DetectionKind::kDegraded:
      return "degraded";
  }
  return "truth";
}

std::vector<HumanState> visible_humans(const WorldState& world, const Pose2& pose, double d_max) {
  std::vector<HumanState> out;
  for (const Pedestrian& p : world.pedestrians) {
    const Vec2 rel = p.position() - pose.position;
    const double dist = rel.norm();
    if (dist >= d_max) continue;
    if (dist > 0.0 && cast_static(world, pose.position, rel / dist, d_max) < dist) continue;
    out.push_back(p.state());
  }
  return out;
}

std::vector<HumanState> detect_humans(const WorldState& world, const Pose2& pose, const DetectionModel& model,
                                      double d_max, std::mt19937_64& rng) {
  std::vector<HumanState> truth = visible_humans(world, pose, d_max);
  if (model.kind == DetectionKind::kTruth) return truth;

  std::normal_distribution<double> pos_noise(0.0, model.sigma_pos);
  std::normal_distribution<double> vel_noise(0.0, model.sigma_vel);
  std::bernoulli_distribution miss(std::clamp(model.p_miss, 0.0, 1.0));
  std::vector<HumanState> out;
  for (HumanState h : truth) {
    if (model.kind == DetectionKind::kDegraded && miss(rng)) continue;
    h.position += Vec2(pos_noise(rng), pos_noise(rng));
    h.velocity += Vec2(vel_noise(rng), vel_noise(rng));
    out.push_back(h);
  }
  if (model.kind != DetectionKind::kDegraded) return out;

  const std::size_t obstacles = world.circles.size() + world.boxes.size();
  std::bernoulli_distribution spawn(std::clamp(model.p_false, 0.0, 1.0));
  if (obstacles == 0 || !spawn(rng)) return out;
  std::uniform_int_distribution<std::size_t> pick(0, obstacles - 1);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  const std::size_t i = pick(rng);
  const double a = angle(rng);
  const Vec2 dir(std::cos(a), std::sin(a));
  Vec2 p;
  if (i < world.circles.size()) {
    const Circle& c = world.circles[i];
    p = c.center + (c.radius + model.false_radius) * dir;
  } else {
    const Box& b = world.boxes[i - world.circles.size()];
    // just outside the box along a random direction from its center
    const double reach = rectangle_support(b.half_extents.x(), b.half_extents.y(), a - b.yaw);
    p = b.center + (reach + model.false_radius) * dir;
  }
  if ((p - pose.position).norm() >= d_max) return out;
  HumanState ghost;
  ghost.id = -1;
  ghost.position = p + Vec2(pos_noise(rng), pos_noise(rng));
  ghost.velocity = Vec2(vel_noise(rng), vel_noise(rng));
  ghost.radius = model.false_radius;
  out.push_back(ghost);
  return out;
}

}  // namespace navg
