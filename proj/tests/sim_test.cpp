#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "navg/detection.hpp"
#include "navg/json_io.hpp"
#include "navg/reward.hpp"
#include "navg/world.hpp"

namespace navg {
namespace {

constexpr double kPi = std::numbers::pi;

KinematicLimits instant_limits() {
  KinematicLimits l;
  l.accel_max = 1e9;
  l.steer_rate_max = 1e9;
  return l;
}

WorldState open_world(double size = 20.0) {
  WorldState w;
  w.bounds_min = {0.0, 0.0};
  w.bounds_max = {size, size};
  w.robot.pose = {{0.5 * size, 0.5 * size}, 0.0};
  w.goal = {size - 1.0, 0.5 * size};
  return w;
}

// Slab test in the box frame, long double.
std::optional<long double> oracle_ray_box(const Vec2& o, const Vec2& d, const Box& b) {
  const long double c = std::cos(static_cast<long double>(b.yaw)), s = std::sin(static_cast<long double>(b.yaw));
  const long double ox = c * (o.x() - b.center.x()) + s * (o.y() - b.center.y());
  const long double oy = -s * (o.x() - b.center.x()) + c * (o.y() - b.center.y());
  const long double dx = c * d.x() + s * d.y(), dy = -s * d.x() + c * d.y();
  long double lo = -1e300L, hi = 1e300L;
  const long double org[2] = {ox, oy}, dir[2] = {dx, dy}, half[2] = {b.half_extents.x(), b.half_extents.y()};
  for (int k = 0; k < 2; ++k) {
    if (std::abs(dir[k]) < 1e-300L) {
      if (std::abs(org[k]) > half[k]) return std::nullopt;
      continue;
    }
    long double t0 = (-half[k] - org[k]) / dir[k], t1 = (half[k] - org[k]) / dir[k];
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
  }
  if (lo > hi || hi < 0) return std::nullopt;
  return std::max(lo, 0.0L);
}

std::optional<long double> oracle_ray_circle(const Vec2& o, const Vec2& d, const Circle& c) {
  const long double fx = o.x() - c.center.x(), fy = o.y() - c.center.y();
  const long double b = fx * d.x() + fy * d.y();
  const long double q = fx * fx + fy * fy - static_cast<long double>(c.radius) * c.radius;
  const long double disc = b * b - q;
  if (disc < 0) return std::nullopt;
  const long double r = std::sqrt(disc);
  if (-b + r < 0) return std::nullopt;
  return std::max(-b - r, 0.0L);
}

// ---- kinematics ----

TEST(StepRobot, ZeroSpeedKeepsPose) {
  RobotState s;
  s.pose = {{1.0, 2.0}, 0.3};
  const RobotState n = step_robot(s, {0.0, 0.5}, 0.2, instant_limits());
  EXPECT_EQ(n.pose.position, s.pose.position);
  EXPECT_DOUBLE_EQ(n.pose.heading, 0.3);
}

TEST(StepRobot, StraightLineAdvancesOneMeter) {
  RobotState s;
  s.pose = {{0.0, 0.0}, 0.7};
  const RobotState n = step_robot(s, {1.0, 0.0}, 1.0, instant_limits());
  EXPECT_NEAR((n.pose.position - s.pose.position).norm(), 1.0, 1e-12);
  EXPECT_NEAR(n.pose.position.x(), std::cos(0.7), 1e-12);
  EXPECT_NEAR(n.pose.position.y(), std::sin(0.7), 1e-12);
}

TEST(StepRobot, FullCircleRadiusMatchesWheelbaseOverTanSteer) {
  const KinematicLimits l = instant_limits();
  for (double phi : {0.2, 0.4, -0.6, kPi / 4}) {
    RobotState s;
    s.speed = 1.0;
    s.steer = phi;
    const double radius = l.wheelbase / std::tan(std::abs(phi));
    const int steps = static_cast<int>(std::ceil(2.0 * kPi * radius / 0.01));
    std::vector<Vec2> pts;
    for (int i = 0; i < steps; ++i) {
      s = step_robot(s, {1.0, phi}, 0.01, l);
      pts.push_back(s.pose.position);
    }
    Vec2 center = Vec2::Zero();
    for (const Vec2& p : pts) center += p;
    center /= static_cast<double>(pts.size());
    double mean = 0.0;
    for (const Vec2& p : pts) mean += (p - center).norm();
    mean /= static_cast<double>(pts.size());
    EXPECT_NEAR(mean, radius, 0.01 * radius) << "phi " << phi;
    // left turns for positive steer
    EXPECT_EQ(center.y() > 0.0, phi > 0.0);
  }
}

TEST(StepRobot, ClampsAndFlagsOutOfLimitCommands) {
  const KinematicLimits l = instant_limits();
  StepInfo info;
  RobotState n = step_robot({}, {3.0, 2.0}, 0.1, l, &info);
  EXPECT_TRUE(info.clamped);
  EXPECT_DOUBLE_EQ(n.speed, l.v_max);
  EXPECT_DOUBLE_EQ(n.steer, l.steer_max);
  n = step_robot({}, {-1.0, -2.0}, 0.1, l, &info);
  EXPECT_TRUE(info.clamped);
  EXPECT_DOUBLE_EQ(n.speed, l.v_min);
  EXPECT_DOUBLE_EQ(n.steer, -l.steer_max);
  step_robot({}, {0.5, 0.1}, 0.1, l, &info);
  EXPECT_FALSE(info.clamped);
}

TEST(StepRobot, RampsUnderRateLimits) {
  const KinematicLimits l;
  RobotState s = step_robot({}, {1.0, kPi / 4}, 0.2, l);
  EXPECT_NEAR(s.speed, 0.2, 1e-12);
  EXPECT_NEAR(s.steer, kPi / 2 * 0.2, 1e-12);
  for (int i = 0; i < 10; ++i) s = step_robot(s, {1.0, kPi / 4}, 0.2, l);
  EXPECT_DOUBLE_EQ(s.speed, 1.0);
  EXPECT_DOUBLE_EQ(s.steer, kPi / 4);
}

// ---- pedestrians ----

TEST(Pedestrians, StationaryStaysPut) {
  std::vector<Pedestrian> ps(1);
  ps[0].from = {1.0, 1.0};
  ps[0].to = {5.0, 1.0};
  ps[0].progress = 2.0;
  ps[0].speed = 0.0;
  step_pedestrians(ps, 1.0);
  EXPECT_EQ(ps[0].position(), Vec2(3.0, 1.0));
  EXPECT_EQ(ps[0].velocity(), Vec2::Zero());
}

TEST(Pedestrians, ConstantVelocityAdvance) {
  std::vector<Pedestrian> ps(1);
  ps[0].from = {0.0, 0.0};
  ps[0].to = {10.0, 0.0};
  ps[0].progress = 2.0;
  ps[0].speed = 0.5;
  step_pedestrians(ps, 2.0);
  EXPECT_NEAR(ps[0].position().x(), 3.0, 1e-12);
  EXPECT_NEAR(ps[0].velocity().x(), 0.5, 1e-12);
}

TEST(Pedestrians, ReflectsAtEndsKeepingSpeed) {
  std::vector<Pedestrian> ps(1);
  ps[0].from = {0.0, 0.0};
  ps[0].to = {2.0, 0.0};
  ps[0].progress = 1.8;
  ps[0].speed = 0.5;
  step_pedestrians(ps, 1.0);
  EXPECT_NEAR(ps[0].position().x(), 1.7, 1e-12);
  EXPECT_NEAR(ps[0].velocity().x(), -0.5, 1e-12);
  EXPECT_NEAR(ps[0].velocity().norm(), 0.5, 1e-12);
  // long step bouncing off both ends
  step_pedestrians(ps, 9.0);  // 4.5 m: 1.7 -> 0 (1.7), 0 -> 2 (2.0), 2 -> 1.2 (0.8)
  EXPECT_NEAR(ps[0].position().x(), 1.2, 1e-12);
  EXPECT_EQ(ps[0].direction, -1);
}

// ---- lidar ----

TEST(Lidar, EmptyWorldReturnsMaxRange) {
  const WorldState w = open_world();
  for (const LaserRay& r : raycast_lidar(w, w.robot.pose, 360, 10.0)) EXPECT_EQ(r.range, 10.0);
}

TEST(Lidar, RaysAreEquallySpacedFromHeading) {
  const WorldState w = open_world();
  const auto rays = raycast_lidar(w, w.robot.pose, 8, 10.0);
  ASSERT_EQ(rays.size(), 8u);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(rays[i].angle, i * kPi / 4, 1e-15);
}

TEST(Lidar, WallAheadAtThreeMeters) {
  WorldState w = open_world();
  w.robot.pose = {{5.0, 5.0}, 0.0};
  w.boxes.push_back({{8.1, 5.0}, {0.1, 4.0}, 0.0});
  const auto rays = raycast_lidar(w, w.robot.pose, 360, 10.0);
  EXPECT_NEAR(rays[0].range, 3.0, 1e-9);
  // rotated robot facing the wall at an angle
  w.robot.pose.heading = kPi / 2;
  const auto turned = raycast_lidar(w, w.robot.pose, 360, 10.0);
  EXPECT_NEAR(turned[270].range, 3.0, 1e-9);
}

TEST(Lidar, PedestrianTwoMetersAheadGivesOnePointSeven) {
  WorldState w = open_world();
  Pedestrian p;
  p.from = p.to = w.robot.pose.position + Vec2(2.0, 0.0);
  w.pedestrians.push_back(p);
  EXPECT_NEAR(raycast_lidar(w, w.robot.pose, 360, 10.0)[0].range, 1.7, 1e-9);
}

TEST(Lidar, MatchesAnalyticOracleOnRandomWorlds) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    WorldState w = open_world();
    for (int i = 0; i < 4; ++i) w.circles.push_back({{20.0 * u(rng), 20.0 * u(rng)}, 0.2 + u(rng)});
    for (int i = 0; i < 4; ++i) {
      w.boxes.push_back({{20.0 * u(rng), 20.0 * u(rng)}, {0.1 + u(rng), 0.1 + u(rng)}, 2.0 * kPi * u(rng)});
    }
    const Pose2 pose{{20.0 * u(rng), 20.0 * u(rng)}, 2.0 * kPi * u(rng) - kPi};
    const auto rays = raycast_lidar(w, pose, 90, 10.0);
    for (const LaserRay& r : rays) {
      const double a = pose.heading + r.angle;
      const Vec2 d(std::cos(a), std::sin(a));
      long double best = 10.0L;
      for (const Circle& c : w.circles) {
        if (auto t = oracle_ray_circle(pose.position, d, c)) best = std::min(best, *t);
      }
      for (const Box& b : w.boxes) {
        if (auto t = oracle_ray_box(pose.position, d, b)) best = std::min(best, *t);
      }
      ASSERT_NEAR(r.range, static_cast<double>(best), 1e-9) << "trial " << trial;
    }
  }
}

TEST(Rasterize, OccupiesCellsWhoseCentersAreInside) {
  WorldState w = open_world(4.0);
  w.boxes.push_back({{1.0, 1.0}, {0.5, 0.5}, 0.0});
  const OccupancyGrid g = rasterize(w, 0.25);
  EXPECT_EQ(g.width(), 16);
  EXPECT_EQ(g.height(), 16);
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      const Vec2 c = g.cell_center({x, y});
      const bool inside = std::abs(c.x() - 1.0) <= 0.5 && std::abs(c.y() - 1.0) <= 0.5;
      EXPECT_EQ(g.occupied({x, y}), inside) << x << "," << y;
    }
  }
}

// ---- detection ----

WorldState world_with_walker(const Vec2& at, const Vec2& velocity) {
  WorldState w = open_world();
  Pedestrian p;
  p.id = 4;
  p.from = at;
  p.to = at + velocity.normalized() * 5.0;
  p.speed = velocity.norm();
  w.pedestrians.push_back(p);
  return w;
}

TEST(Detection, TruthReportsExactVisibleState) {
  const WorldState w = world_with_walker({13.0, 11.0}, {0.5, 0.0});
  std::mt19937_64 rng(1);
  const auto d = detect_humans(w, w.robot.pose, DetectionModel::parse("truth"), 10.0, rng);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].id, 4);
  EXPECT_EQ(d[0].position, Vec2(13.0, 11.0));
  EXPECT_EQ(d[0].velocity, Vec2(0.5, 0.0));
}

TEST(Detection, HidesOccludedAndDistantPedestrians) {
  WorldState w = world_with_walker({14.0, 10.0}, {0.0, 0.5});
  w.boxes.push_back({{12.0, 10.0}, {0.2, 1.0}, 0.0});
  std::mt19937_64 rng(1);
  EXPECT_TRUE(detect_humans(w, w.robot.pose, DetectionModel{}, 10.0, rng).empty());
  const WorldState far = world_with_walker({10.0, 20.5}, {0.5, 0.0});
  EXPECT_TRUE(detect_humans(far, far.robot.pose, DetectionModel{}, 10.0, rng).empty());
}

TEST(Detection, FullMissRateGivesNothing) {
  WorldState w = world_with_walker({12.0, 10.0}, {0.5, 0.0});
  w.boxes.push_back({{3.0, 3.0}, {0.5, 0.5}, 0.0});
  DetectionModel m = DetectionModel::parse("degraded");
  m.p_miss = 1.0;
  m.p_false = 0.0;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(detect_humans(w, w.robot.pose, m, 10.0, rng).empty());
}

TEST(Detection, SeededDegradedStreamReplays) {
  WorldState w = world_with_walker({12.0, 10.0}, {0.5, 0.0});
  w.circles.push_back({{8.0, 8.0}, 0.5});
  w.boxes.push_back({{12.0, 13.0}, {1.0, 0.3}, 0.4});
  DetectionModel m = DetectionModel::parse("degraded");
  m.p_false = 0.5;
  auto run = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < 200; ++i) out.push_back(detect_humans(w, w.robot.pose, m, 10.0, rng));
    return out;
  };
  const nlohmann::json a = run(42), b = run(42);
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_NE(a.dump(), run(43).dump());
  int ghosts = 0;
  for (const auto& frame : a) {
    for (const auto& h : frame) {
      if (h.at("id").get<int>() >= 0) continue;
      ++ghosts;
      const Vec2 p = vec_from_json(h.at("position"));
      // near an obstacle: within false radius plus generous noise of its surface
      const double dc = (p - Vec2(8.0, 8.0)).norm() - 0.5;
      const double db = polygon_circle_clearance(w.boxes[0].corners(), {p, 0.0});
      EXPECT_LT(std::min(dc, db), 0.3 + 0.6);
    }
  }
  EXPECT_GT(ghosts, 50);
  EXPECT_LT(ghosts, 150);
}

TEST(Detection, GaussianNoiseIsZeroMean) {
  const WorldState w = world_with_walker({12.0, 10.0}, {0.5, 0.0});
  const DetectionModel m = DetectionModel::parse("gaussian");
  std::mt19937_64 rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto d = detect_humans(w, w.robot.pose, m, 10.0, rng);
    ASSERT_EQ(d.size(), 1u);
    const double e = d[0].position.x() - 12.0;
    sum += e;
    sq += e * e;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.005);
  EXPECT_NEAR(std::sqrt(sq / n), m.sigma_pos, 0.005);
}

TEST(Detection, UnknownModelIsAConfigError) {
  EXPECT_THROW(DetectionModel::parse("yolo"), ConfigError);
  EXPECT_EQ(DetectionModel::parse("degraded").name(), "degraded");
}

// ---- reward ----

RobotState moving(const Vec2& at, double heading, double speed, double steer = 0.0) {
  RobotState r;
  r.pose = {at, heading};
  r.speed = speed;
  r.steer = steer;
  return r;
}

TEST(Reward, EachCaseWithItsValue) {
  const RewardParams p;
  const RobotState s = moving({0.0, 0.0}, 0.0, 0.5);
  const Vec2 goal(10.0, 0.0);
  struct Fixture {
    EpisodeStatus status;
    double clearance;
    RewardCase expected;
    double value;
  };
  const std::vector<Fixture> fixtures = {
      {EpisodeStatus::kRunning, 2.0, RewardCase::kClear, 0.0},
      {EpisodeStatus::kRunning, 0.3, RewardCase::kProximity, 0.3 - 0.5},
      {EpisodeStatus::kRunning, 0.05, RewardCase::kCollision, -10.0},
      {EpisodeStatus::kCollision, 0.0, RewardCase::kCollision, -10.0},
      {EpisodeStatus::kTimeout, 2.0, RewardCase::kTimeout, -5.0},
      {EpisodeStatus::kSuccess, 2.0, RewardCase::kGoal, 5.0},
  };
  std::map<RewardCase, int> hits;
  for (const Fixture& f : fixtures) {
    const RewardBreakdown r = compute_reward(s, s, goal, f.clearance, f.status, p);
    EXPECT_EQ(r.reward_case, f.expected) << to_string(f.expected);
    EXPECT_NEAR(r.case_value, f.value, 1e-15);
    EXPECT_NEAR(r.total, p.w1 * 0.5 - 0.0 + p.w3 * f.value, 1e-15);
    ++hits[r.reward_case];
  }
  EXPECT_EQ(hits.size(), 5u);
}

TEST(Reward, PriorityWhenCasesCoincide) {
  const RewardParams p;
  const RobotState s = moving({0.0, 0.0}, 0.0, 0.0);
  EXPECT_EQ(compute_reward(s, s, {1, 0}, 0.0, EpisodeStatus::kSuccess, p).reward_case, RewardCase::kGoal);
  EXPECT_EQ(compute_reward(s, s, {1, 0}, 0.05, EpisodeStatus::kTimeout, p).reward_case, RewardCase::kCollision);
  EXPECT_EQ(compute_reward(s, s, {1, 0}, 0.3, EpisodeStatus::kTimeout, p).reward_case, RewardCase::kTimeout);
}

TEST(Reward, VelocityProjectsOnGoalDirection) {
  const RewardParams p;
  const Vec2 goal(3.0, 4.0);
  const double toward = std::atan2(4.0, 3.0);
  const RobotState prev = moving({0.0, 0.0}, toward, 0.0);
  RewardBreakdown r = compute_reward(prev, moving({0.0, 0.0}, toward, 0.8), goal, 5.0, EpisodeStatus::kRunning, p);
  EXPECT_NEAR(r.v_parallel, 0.8, 1e-15);
  r = compute_reward(prev, moving({0.0, 0.0}, toward + kPi / 2, 0.8), goal, 5.0, EpisodeStatus::kRunning, p);
  EXPECT_NEAR(r.v_parallel, 0.0, 1e-15);
  r = compute_reward(prev, moving({0.0, 0.0}, toward, -0.1), goal, 5.0, EpisodeStatus::kRunning, p);
  EXPECT_NEAR(r.v_parallel, -0.1, 1e-15);
  // clear, non-terminal, heading straight at the goal: w1 |v| - w2 |phi|
  r = compute_reward(prev, moving({0.0, 0.0}, toward, 0.8, -0.3), goal, 5.0, EpisodeStatus::kRunning, p);
  EXPECT_NEAR(r.total, p.w1 * 0.8 - p.w2 * 0.3, 1e-15);
  // at the goal
  r = compute_reward(moving(goal, 0.0, 0.0), moving(goal, 0.0, 1.0), goal, 5.0, EpisodeStatus::kSuccess, p);
  EXPECT_EQ(r.v_parallel, 0.0);
}

TEST(Reward, ParamsValidate) {
  RewardParams p;
  p.d_danger = 0.6;
  EXPECT_THROW(p.validate(), ConfigError);
  p = RewardParams{};
  p.w2 = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = RewardParams{};
  p.timeout = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

// ---- termination ----

TEST(Termination, Examples) {
  const RewardParams p;
  const KinematicLimits l;
  WorldState w = open_world();
  EXPECT_EQ(check_termination(w, p, l), EpisodeStatus::kRunning);

  w.robot.pose.position = w.goal + Vec2(0.2, 0.1);
  EXPECT_EQ(check_termination(w, p, l), EpisodeStatus::kSuccess);

  WorldState hit = open_world();
  hit.boxes.push_back({{10.6, 10.0}, {0.3, 2.0}, 0.0});
  EXPECT_EQ(check_termination(hit, p, l), EpisodeStatus::kCollision);

  // collision wins over success
  hit.goal = hit.robot.pose.position;
  EXPECT_EQ(check_termination(hit, p, l), EpisodeStatus::kCollision);

  WorldState outside = open_world();
  outside.robot.pose.position = {0.1, 10.0};
  EXPECT_EQ(check_termination(outside, p, l), EpisodeStatus::kCollision);

  WorldState late = open_world();
  late.steps = 300;  // clock == timeout
  EXPECT_EQ(check_termination(late, p, l), EpisodeStatus::kRunning);
  late.steps = 301;  // timeout + dt
  EXPECT_EQ(check_termination(late, p, l), EpisodeStatus::kTimeout);
  late.robot.pose.position = late.goal;
  EXPECT_EQ(check_termination(late, p, l), EpisodeStatus::kSuccess);
}

TEST(Termination, PedestrianContactIsCollision) {
  WorldState w = world_with_walker({10.6, 10.0}, {0.0, 1.0});
  EXPECT_EQ(check_termination(w, RewardParams{}, KinematicLimits{}), EpisodeStatus::kCollision);
}

}  // namespace
}  // namespace navg
