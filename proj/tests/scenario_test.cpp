#include <set>

#include <gtest/gtest.h>

#include "navg/json_io.hpp"
#include "navg/metrics.hpp"
#include "navg/scenario.hpp"

namespace navg {
namespace {

constexpr int kSweep = 1000;

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

// Separation between two static shapes indexed circles first, then boxes; 0 on contact.
double shape_gap(const WorldState& w, std::size_t i, std::size_t j) {
  const std::size_t nc = w.circles.size();
  auto corners = [&](std::size_t k) { return w.boxes[k - nc].corners(); };
  if (i < nc && j < nc) return (w.circles[i].center - w.circles[j].center).norm() - w.circles[i].radius - w.circles[j].radius;
  if (i < nc) return polygon_circle_clearance(corners(j), w.circles[i]);
  if (j < nc) return polygon_circle_clearance(corners(i), w.circles[j]);
  const auto a = corners(i), b = corners(j);
  return polygon_polygon_clearance(a, b);
}

TEST(Scenario, CorridorSweepStaysInRanges) {
  const Catalog cat = default_catalog();
  for (const std::string name : {"a", "b", "c", "d", "e", "f"}) {
    const TemplateSpec& spec = cat.find(name);
    for (int seed = 0; seed < kSweep; ++seed) {
      const Scenario s = generate_scenario(spec, seed);
      const WorldState& w = s.world;
      const double width = s.draws.corridor_width;
      ASSERT_TRUE(within(width, 4.0, 6.0)) << name << seed;
      ASSERT_EQ(s.draws.scales.size(), spec.obstacles.size());
      for (double k : s.draws.scales) ASSERT_TRUE(within(k, 0.8, 1.2)) << name << seed;
      ASSERT_EQ(s.draws.pedestrian_speeds.size(), spec.crossings.size());
      for (double v : s.draws.pedestrian_speeds) ASSERT_TRUE(within(v, 0.3, 1.5)) << name << seed;
      for (const Pedestrian& p : w.pedestrians) ASSERT_TRUE(within(p.speed, 0.3, 1.5));
      // start and goal at opposite ends, on the centerline
      ASSERT_LT(w.robot.pose.position.x(), 2.0);
      ASSERT_GT(w.goal.x(), 18.0);
      ASSERT_DOUBLE_EQ(w.robot.pose.position.y(), 0.5 * width);
      ASSERT_DOUBLE_EQ(w.goal.y(), 0.5 * width);
      // obstacles (walls are the first two boxes) never overlap each other
      const std::size_t shapes = w.circles.size() + w.boxes.size();
      for (std::size_t i = 0; i < shapes; ++i) {
        for (std::size_t j = i + 1; j < shapes; ++j) {
          const bool both_walls = i >= w.circles.size() && j >= w.circles.size() && j - w.circles.size() < 2;
          if (both_walls) continue;
          ASSERT_GT(shape_gap(w, i, j), 0.0) << name << seed;
        }
      }
      for (const Circle& c : w.circles) ASSERT_TRUE(within(c.center.y(), c.radius - 1e-9, width - c.radius + 1e-9));
      ASSERT_GT(robot_clearance(w, KinematicLimits{}), 0.0);
      ASSERT_GT(disc_clearance(w, {w.goal, 0.3}), 0.0);
    }
  }
}

TEST(Scenario, LobbySweepStaysInRanges) {
  const Catalog cat = default_catalog();
  const TemplateSpec& spec = cat.find("g");
  std::set<int> sides;
  for (int seed = 0; seed < kSweep; ++seed) {
    const Scenario s = generate_scenario(spec, seed);
    const WorldState& w = s.world;
    for (double k : s.draws.scales) ASSERT_TRUE(within(k, 0.8, 1.2));
    ASSERT_EQ(s.draws.shifts.size(), spec.obstacles.size());
    for (double d : s.draws.shifts) ASSERT_TRUE(within(d, -1.0, 1.0));
    ASSERT_EQ(w.goal, Vec2(7.0, 5.0));
    ASSERT_TRUE(within(s.draws.start_side, 0, 3));
    sides.insert(s.draws.start_side);
    const Vec2 p = w.robot.pose.position;
    const double to_edge = std::min({p.x(), 14.0 - p.x(), p.y(), 10.0 - p.y()});
    ASSERT_LT(to_edge, 1.5) << "start not on a side, seed " << seed;
    ASSERT_GT(robot_clearance(w, KinematicLimits{}), 0.0);
    ASSERT_GT(disc_clearance(w, {w.goal, 0.3}), 0.0);
  }
  EXPECT_EQ(sides.size(), 4u);
}

TEST(Scenario, MazeSweepStaysInRanges) {
  const Catalog cat = default_catalog();
  const TemplateSpec& spec = cat.find("h");
  for (int seed = 0; seed < kSweep; ++seed) {
    const Scenario s = generate_scenario(spec, seed);
    for (double d : s.draws.shifts) ASSERT_TRUE(within(d, -0.75, 0.75));
    for (double v : s.draws.pedestrian_speeds) ASSERT_TRUE(within(v, 0.3, 1.5));
    // fixed wall sizes
    ASSERT_EQ(s.world.boxes.size(), 6u);
    ASSERT_EQ(s.world.boxes[4].half_extents, Vec2(0.15, 3.25));
    ASSERT_EQ(s.world.boxes[5].half_extents, Vec2(0.15, 3.25));
    ASSERT_EQ(s.world.goal, Vec2(14.5, 8.5));
    ASSERT_GT(robot_clearance(s.world, KinematicLimits{}), 0.0);
  }
}

TEST(Scenario, SameSeedSameWorld) {
  const Catalog cat = default_catalog();
  for (const TemplateSpec& t : cat.templates) {
    const std::string a = nlohmann::json(generate_scenario(t, 7).world).dump();
    EXPECT_EQ(a, nlohmann::json(generate_scenario(t, 7).world).dump()) << t.name;
    EXPECT_NE(a, nlohmann::json(generate_scenario(t, 8).world).dump()) << t.name;
  }
}

TEST(Scenario, WorldJsonRoundTrips) {
  const Catalog cat = default_catalog();
  for (const TemplateSpec& t : cat.templates) {
    const nlohmann::json j = generate_scenario(t, 3).world;
    EXPECT_EQ(nlohmann::json(j.get<WorldState>()).dump(), j.dump());
  }
}

TEST(Scenario, UnsatisfiablePlacementNamesTheConstraint) {
  TemplateSpec t = default_catalog().find("a");
  t.obstacles[1].size = {0.6, 2.5};  // taller than the corridor allows
  try {
    generate_scenario(t, 1);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("passable gap"), std::string::npos) << e.what();
  }
  // two tall boxes at one station always overlap in a 4 m corridor
  t = default_catalog().find("a");
  t.obstacles = {{"box", {0.5, 1.45}, {10.0, 0.0}, 0.0}, {"box", {0.5, 1.45}, {10.0, 0.0}, 0.0}};
  t.width_min = t.width_max = 4.0;
  t.scale_min = t.scale_max = 1.0;
  try {
    generate_scenario(t, 1);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("without overlap"), std::string::npos) << e.what();
  }
}

TEST(Scenario, UnknownTemplateIsAConfigError) {
  EXPECT_THROW(default_catalog().find("z"), ConfigError);
}

TEST(Catalog, ShippedConfigMatchesBuiltIn) {
  const Catalog file = load_catalog(NAVG_CONFIG_DIR "/scenarios.json");
  EXPECT_EQ(nlohmann::json(file).dump(), nlohmann::json(default_catalog()).dump());
  ASSERT_EQ(file.templates.size(), 8u);
}

TEST(Catalog, EditedCatalogDrivesGeneration) {
  nlohmann::json j = default_catalog();
  j["templates"][0]["width"] = {5.0, 5.0};
  const Catalog c = j.get<Catalog>();
  EXPECT_DOUBLE_EQ(generate_scenario(c, "a", 4).draws.corridor_width, 5.0);
  j["templates"][0]["width"] = {6.0, 5.0};
  EXPECT_THROW(j.get<Catalog>(), ConfigError);
}

// ---- metrics ----

EpisodeResult finished(EpisodeStatus status, double elapsed) {
  EpisodeResult r;
  r.status = status;
  r.elapsed = elapsed;
  return r;
}

TEST(Metrics, SuccessWeightedByTimeLength) {
  const std::vector<EpisodeResult> rs = {finished(EpisodeStatus::kSuccess, 20.0),
                                         finished(EpisodeStatus::kSuccess, 30.0),
                                         finished(EpisodeStatus::kCollision, 12.0)};
  const Metrics m = compute_metrics(rs, 60.0);
  ASSERT_TRUE(m.defined());
  EXPECT_NEAR(*m.stl, (20.0 + 30.0 + 60.0) / 3.0, 1e-9);
  EXPECT_NEAR(*m.success, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(*m.time_success, 25.0, 1e-12);
  EXPECT_FALSE(m.behind.has_value());
}

TEST(Metrics, AllSuccessful) {
  const std::vector<EpisodeResult> rs(4, finished(EpisodeStatus::kSuccess, 10.0));
  EXPECT_EQ(*compute_metrics(rs, 60.0).success, 1.0);
}

TEST(Metrics, EmptyInputIsUndefined) {
  const Metrics m = compute_metrics({}, 60.0);
  EXPECT_FALSE(m.defined());
  EXPECT_FALSE(m.success || m.time_success || m.stl || m.behind);
}

TEST(Metrics, NoSuccessLeavesTimeUndefined) {
  const std::vector<EpisodeResult> rs = {finished(EpisodeStatus::kTimeout, 60.0)};
  const Metrics m = compute_metrics(rs, 60.0);
  EXPECT_EQ(*m.success, 0.0);
  EXPECT_FALSE(m.time_success.has_value());
  EXPECT_EQ(*m.stl, 60.0);
}

// Robot driving +y along x = robot_x while a pedestrian walks +x along y = 0.
std::vector<TrajectorySample> crossing(double robot_x, Vec2 ped_velocity, double y_offset = 0.0) {
  std::vector<TrajectorySample> traj;
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.1 * i;
    TrajectorySample s;
    s.t = t;
    s.robot.pose = {{robot_x, -2.0 + t + y_offset}, std::numbers::pi / 2};
    s.pedestrians.push_back({9, ped_velocity * t, ped_velocity, 0.3});
    traj.push_back(s);
  }
  return traj;
}

TEST(PassEvents, RobotCrossingBehindWalker) {
  // the pedestrian reaches x = 2 at t = 2, the robot crosses x = 1 at y = 0
  const auto events = detect_pass_events(crossing(1.0, {1.0, 0.0}));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].pedestrian, 9);
  EXPECT_EQ(events[0].side, PassSide::kBehind);
}

TEST(PassEvents, RobotCrossingInFront) {
  const auto events = detect_pass_events(crossing(3.0, {1.0, 0.0}));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].side, PassSide::kFront);
}

TEST(PassEvents, FarOrStationaryPedestriansNeverPass) {
  // closest approach at the first sample is not a local minimum
  EXPECT_TRUE(detect_pass_events(crossing(1.0, {1.0, 0.0}, 3.0)).empty());
  auto far = crossing(6.0, {0.1, 0.0});
  EXPECT_TRUE(detect_pass_events(far).empty());
  EXPECT_TRUE(detect_pass_events(crossing(1.0, {0.0, 0.0})).empty());
}

TEST(PassEvents, BehindFractionFromEvents) {
  EpisodeResult a = finished(EpisodeStatus::kSuccess, 10.0);
  a.pass_events = detect_pass_events(crossing(1.0, {1.0, 0.0}));
  EpisodeResult b = finished(EpisodeStatus::kSuccess, 10.0);
  b.pass_events = detect_pass_events(crossing(3.0, {1.0, 0.0}));
  const std::vector<EpisodeResult> rs = {a, a, b};
  const Metrics m = compute_metrics(rs, 60.0);
  EXPECT_EQ(m.pass_events, 3u);
  EXPECT_NEAR(*m.behind, 2.0 / 3.0, 1e-15);
}

}  // namespace
}  // namespace navg
