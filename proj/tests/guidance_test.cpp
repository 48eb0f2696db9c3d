#include "navg/guidance.hpp"

#include <map>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace navg {
namespace {

void fill_disc(OccupancyGrid& g, int cx, int cy, int r) {
  for (int y = cy - r; y <= cy + r; ++y)
    for (int x = cx - r; x <= cx + r; ++x)
      if (g.in_bounds({x, y}) && (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) g.set({x, y}, true);
}

void fill_rect(OccupancyGrid& g, int x0, int y0, int x1, int y1) {
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (g.in_bounds({x, y})) g.set({x, y}, true);
}

TEST(CandidatePointsTest, SingleGroupGivesNothing) {
  OccupancyGrid g(10, 10, 1.0);
  fill_rect(g, 2, 2, 4, 4);
  const auto groups = extract_boundaries(g);
  EXPECT_TRUE(candidate_points(distance_transform(g, groups), 1.0).empty());
}

TEST(CandidatePointsTest, TwoPointsShareTheMidpoint) {
  OccupancyGrid g(11, 11, 1.0);
  g.set({2, 5}, true);
  g.set({8, 5}, true);
  const auto groups = extract_boundaries(g);
  const auto cands = candidate_points(distance_transform(g, groups), 1.0);
  ASSERT_FALSE(cands.empty());
  for (const CandidatePoint& c : cands) {
    EXPECT_LE((c.position - Vec2(5.0, 5.0)).norm(), 0.5);
    EXPECT_NE(c.group_i, c.group_j);
    EXPECT_LE(std::abs(c.source.x - 5), 1);
  }
}

// Brute force per free cell: scan every boundary point of every group.
TEST(CandidatePointsTest, MatchesBruteForceDefinition) {
  std::mt19937_64 rng(77);
  const double tie_eps = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const OccupancyGrid g = oracle::random_grid(rng, 32, 32);
    const auto groups = extract_boundaries(g);
    const auto cands = candidate_points(distance_transform(g, groups), tie_eps);
    const auto brute = oracle::brute_distance(g, groups);

    std::map<std::pair<int, int>, const CandidatePoint*> by_cell;
    for (const CandidatePoint& c : cands) by_cell[{c.source.x, c.source.y}] = &c;
    std::size_t expected = 0;
    for (int y = 0; y < g.height(); ++y) {
      for (int x = 0; x < g.width(); ++x) {
        const auto& rec = brute[g.index({x, y})];
        const bool is_candidate =
            rec.first && rec.second &&
            std::sqrt(double(rec.second->squared)) - std::sqrt(double(rec.first->squared)) <= tie_eps;
        const auto it = by_cell.find({x, y});
        ASSERT_EQ(is_candidate, it != by_cell.end()) << "trial " << trial << " cell " << x << "," << y;
        if (!is_candidate) continue;
        ++expected;
        const CandidatePoint& c = *it->second;
        ASSERT_EQ(c.group_i, rec.first->group);
        ASSERT_EQ(c.group_j, rec.second->group);
        ASSERT_EQ(oracle::squared_cells(c.anchor_i, {x, y}), rec.first->squared);
        ASSERT_EQ(oracle::squared_cells(c.anchor_j, {x, y}), rec.second->squared);
        const Vec2 mid = 0.5 * (Vec2(c.anchor_i.x, c.anchor_i.y) + Vec2(c.anchor_j.x, c.anchor_j.y));
        ASSERT_NEAR((c.position - mid).norm(), 0.0, 1e-12);
        ASSERT_NEAR(c.cost, std::sqrt(double(oracle::squared_cells(c.anchor_i, c.anchor_j))), 1e-12);
      }
    }
    ASSERT_EQ(expected, cands.size());
  }
}

TEST(SelectGuidanceTest, EmptyInput) { EXPECT_TRUE(select_guidance({}).empty()); }

TEST(SelectGuidanceTest, PicksCheapestCandidateOfPair) {
  std::vector<CandidatePoint> cands(3);
  const double costs[] = {4.2, 3.1, 5.0};
  for (int k = 0; k < 3; ++k) {
    cands[k].group_i = 2;
    cands[k].group_j = 1;
    cands[k].cost = costs[k];
    cands[k].position = Vec2(k, 0);
    cands[k].anchor_i = {k, 1};
    cands[k].anchor_j = {k, -1};
  }
  const auto sel = select_guidance(cands);
  ASSERT_EQ(sel.size(), 1u);
  EXPECT_DOUBLE_EQ(sel[0].gap_width, 3.1);
  EXPECT_EQ(sel[0].position, Vec2(1, 0));
  // normalized so group_i < group_j, anchors follow
  EXPECT_EQ(sel[0].group_i, 1);
  EXPECT_EQ(sel[0].group_j, 2);
  EXPECT_EQ(sel[0].anchor_i, (Cell{1, -1}));
}

TEST(SelectGuidanceTest, EqualCostPicksSmallestPosition) {
  std::vector<CandidatePoint> cands(2);
  for (auto& c : cands) {
    c.group_i = 0;
    c.group_j = 1;
    c.cost = 2.0;
  }
  cands[0].position = Vec2(1.0, 3.0);
  cands[0].anchor_i = {0, 3};
  cands[0].anchor_j = {2, 3};
  cands[1].position = Vec2(1.0, 2.0);
  cands[1].anchor_i = {0, 2};
  cands[1].anchor_j = {2, 2};
  EXPECT_EQ(select_guidance(cands)[0].position, Vec2(1.0, 2.0));
}

TEST(SelectGuidanceTest, CollinearWallsMeetAtClosestApproach) {
  OccupancyGrid g(20, 11, 0.5);
  fill_rect(g, 2, 5, 6, 5);
  fill_rect(g, 12, 5, 16, 5);
  const auto groups = extract_boundaries(g);
  const auto sel = select_guidance(candidate_points(distance_transform(g, groups), 1.0));
  ASSERT_EQ(sel.size(), 1u);
  EXPECT_DOUBLE_EQ(sel[0].gap_width, 3.0);
  EXPECT_NEAR((sel[0].position - Vec2(4.5, 2.5)).norm(), 0.0, 1e-12);
}

TEST(FilterPoseTest, BehindAndOccludedPointsAreRemoved) {
  OccupancyGrid g(40, 40, 0.1);
  fill_rect(g, 24, 18, 24, 20);  // 3-cell wall at x = 2.4 m
  const Pose2 pose{Vec2(1.0, 1.9), 0.0};
  GuidancePoint behind, ahead, beyond;
  behind.position = pose.to_world(Vec2(-1.0, 0.0));
  ahead.position = pose.to_world(Vec2(1.0, 0.0));
  beyond.position = pose.to_world(Vec2(2.0, 0.0));
  const std::vector<GuidancePoint> pts{behind, ahead, beyond};
  const auto kept = filter_pose(pts, pose, g);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].position, ahead.position);

  // raycast oracle: densely sample the segment and test the cells it passes
  const auto sampled_clear = [&](const Vec2& a, const Vec2& b) {
    for (int s = 0; s <= 10000; ++s) {
      const Vec2 p = a + (b - a) * (s / 10000.0);
      if (g.occupied_or_free(g.world_to_cell(p))) return false;
    }
    return true;
  };
  EXPECT_FALSE(sampled_clear(pose.position, beyond.position));
  EXPECT_TRUE(sampled_clear(pose.position, ahead.position));
}

TEST(FilterPoseTest, PointAheadInEmptyGridIsKept) {
  const OccupancyGrid g(50, 50, 0.1);
  const Pose2 pose{Vec2(1.0, 1.0), 0.7};
  GuidancePoint p;
  p.position = pose.to_world(Vec2(2.0, 0.0));
  EXPECT_EQ(filter_pose(std::vector{p}, pose, g).size(), 1u);
}

TEST(LineOfSightTest, AgreesWithDenseSampling) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 2.35);
  int blocked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const OccupancyGrid g = oracle::random_grid(rng, 24, 24, 0.1);
    for (int k = 0; k < 40; ++k) {
      const Vec2 a(u(rng), u(rng)), b(u(rng), u(rng));
      bool clear = true;
      for (int s = 0; s <= 20000 && clear; ++s) {
        const Vec2 p = a + (b - a) * (s / 20000.0);
        const Vec2 q = (p - g.origin()) / g.resolution() + Vec2(0.5, 0.5);
        const Cell c{static_cast<int>(std::floor(q.x())), static_cast<int>(std::floor(q.y()))};
        if (g.occupied_or_free(c)) clear = false;
      }
      // sampling can only miss corner clips, never invent hits
      if (!clear) {
        ++blocked;
        EXPECT_FALSE(line_of_sight(g, a, b));
      }
    }
  }
  EXPECT_GT(blocked, 100);
}

// A and C level with each other, B small and slightly raised between them.
OccupancyGrid collinear_fixture() {
  OccupancyGrid g(100, 120, 0.1);
  fill_disc(g, 25, 100, 5);
  fill_disc(g, 75, 100, 5);
  fill_disc(g, 50, 103, 3);
  return g;
}

OccupancyGrid equilateral_fixture() {
  OccupancyGrid g(100, 100, 0.1);
  fill_disc(g, 30, 30, 3);
  fill_disc(g, 70, 30, 3);
  fill_disc(g, 50, 65, 3);
  return g;
}

TEST(PruneTrianglesTest, FewerThanThreeGroupsUnchanged) {
  OccupancyGrid g(30, 30, 0.1);
  fill_disc(g, 8, 15, 3);
  fill_disc(g, 22, 15, 3);
  const StaticGuidance s = compute_static_guidance(g, {});
  ASSERT_EQ(s.selected.size(), 1u);
  const auto out = prune_triangles(s.selected, s.groups, g.resolution(), {});
  EXPECT_EQ(out.size(), 1u);
}

TEST(PruneTrianglesTest, CollinearTripleDropsLongEdgePoint) {
  const OccupancyGrid g = collinear_fixture();
  const StaticGuidance s = compute_static_guidance(g, {});
  ASSERT_EQ(s.groups.size(), 3u);
  ASSERT_EQ(s.selected.size(), 3u);
  const auto edges = triangle_edges(s.selected[0], s.selected[2], s.selected[1], s.groups, g.resolution());
  // groups in start-cell order: A (0), C (1), B (2); pair (0,1) spans A-C
  EXPECT_EQ(s.selected[0].group_i, 0);
  EXPECT_EQ(s.selected[0].group_j, 1);
  EXPECT_GT(edges[0].length(), edges[1].length());
  EXPECT_GT(edges[0].length(), edges[2].length());

  const auto out = prune_triangles(s.selected, s.groups, g.resolution(), {});
  ASSERT_EQ(out.size(), 2u);
  for (const GuidancePoint& p : out) EXPECT_FALSE(p.group_i == 0 && p.group_j == 1);
}

TEST(PruneTrianglesTest, EquilateralTripleKeepsAll) {
  const OccupancyGrid g = equilateral_fixture();
  const StaticGuidance s = compute_static_guidance(g, {});
  ASSERT_EQ(s.selected.size(), 3u);
  const auto& p = s.selected;
  const auto edges = triangle_edges(p[0], p[2], p[1], s.groups, g.resolution());
  std::array<double, 3> len{edges[0].length(), edges[1].length(), edges[2].length()};
  std::sort(len.begin(), len.end());
  // analytic: equal edges, 60 degree angles; neither trigger can fire
  EXPECT_GT(len[0] + len[1], 1.1 * len[2]);
  EXPECT_LT(largest_angle_deg(p[0].position, p[1].position, p[2].position), 150.0);
  EXPECT_NEAR(largest_angle_deg(p[0].position, p[1].position, p[2].position), 60.0, 5.0);
  EXPECT_EQ(prune_triangles(p, s.groups, g.resolution(), {}).size(), 3u);
}

TEST(PruneTrianglesTest, EdgeLengthIsRecomputableFromParts) {
  const OccupancyGrid g = collinear_fixture();
  const StaticGuidance s = compute_static_guidance(g, {});
  ASSERT_EQ(s.selected.size(), 3u);
  const auto edges = triangle_edges(s.selected[0], s.selected[2], s.selected[1], s.groups, g.resolution());
  for (const TriangleEdge& e : edges) {
    EXPECT_DOUBLE_EQ(e.length(), e.arc_i / 2 + e.gap + e.arc_j / 2);
    EXPECT_GE(e.arc_i, 0.0);
  }
  EXPECT_DOUBLE_EQ(edges[0].gap, s.selected[0].gap_width);
}

TEST(PruneTrianglesTest, OutputIsSubsetOfInput) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const OccupancyGrid g = oracle::random_grid(rng, 40, 40, 0.1);
    const StaticGuidance s = compute_static_guidance(g, {});
    const auto out = prune_triangles(s.selected, s.groups, g.resolution(), {});
    std::set<std::pair<int, int>> in;
    for (const auto& p : s.selected) in.insert({p.group_i, p.group_j});
    for (const auto& p : out) EXPECT_TRUE(in.count({p.group_i, p.group_j}));
    EXPECT_LE(out.size(), s.selected.size());
  }
}

TEST(ExtractGuidanceTest, EmptyGrid) {
  EXPECT_TRUE(extract_guidance(OccupancyGrid(20, 20, 0.1), Pose2{Vec2(1, 1), 0.0}).empty());
}

TEST(ExtractGuidanceTest, GapBetweenTwoObstaclesAhead) {
  OccupancyGrid g(80, 80, 0.1);
  fill_disc(g, 25, 50, 6);
  fill_disc(g, 55, 50, 6);
  const Pose2 pose{Vec2(4.0, 1.0), std::numbers::pi / 2};
  const auto pts = extract_guidance(g, pose);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_NEAR(pts[0].position.x(), 4.0, 1e-12);
  EXPECT_NEAR(pts[0].position.y(), 5.0, 1e-12);
  EXPECT_NEAR(pts[0].gap_width, 1.8, 1e-12);
}

TEST(ExtractGuidanceTest, CollinearPipelineRemovesSpanningPoint) {
  const OccupancyGrid g = collinear_fixture();
  const Pose2 pose{Vec2(5.0, 0.5), std::numbers::pi / 2};
  const auto pts = extract_guidance(g, pose);
  ASSERT_EQ(pts.size(), 2u);
  for (const auto& p : pts) EXPECT_EQ(p.group_j, 2);  // both touch B
}

// Corridor with five obstacles in a row; the outer two touch the walls, which
// leaves four gaps between neighbouring obstacles.
OccupancyGrid five_obstacle_corridor() {
  OccupancyGrid g(80, 120, 0.1);
  fill_rect(g, 0, 0, 1, 119);
  fill_rect(g, 78, 0, 79, 119);
  fill_rect(g, 2, 60, 12, 67);   // O1, touches left wall
  fill_rect(g, 21, 60, 28, 67);  // O2
  fill_rect(g, 36, 60, 43, 67);  // O3
  fill_rect(g, 53, 60, 58, 67);  // O4
  fill_rect(g, 66, 60, 77, 67);  // O5, touches right wall
  return g;
}

TEST(ExtractGuidanceTest, FiveObstacleCorridorHasOnePointPerGap) {
  const OccupancyGrid g = five_obstacle_corridor();
  const Pose2 pose{Vec2(4.0, 1.0), std::numbers::pi / 2};
  const auto pts = extract_guidance(g, pose);
  // gap centers by hand: (12+21)/2, (28+36)/2, (43+53)/2, (58+66)/2 cells
  const std::vector<double> gap_x{1.65, 3.2, 4.8, 6.2};
  const std::vector<double> gap_w{0.9, 0.8, 1.0, 0.8};
  ASSERT_EQ(pts.size(), gap_x.size());
  std::vector<GuidancePoint> sorted = pts;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.position.x() < b.position.x(); });
  for (std::size_t k = 0; k < gap_x.size(); ++k) {
    EXPECT_NEAR(sorted[k].position.x(), gap_x[k], 1e-9);
    EXPECT_GE(sorted[k].position.y(), 6.0 - 1e-9);
    EXPECT_LE(sorted[k].position.y(), 6.7 + 1e-9);
    EXPECT_NEAR(sorted[k].gap_width, gap_w[k], 1e-9);
    EXPECT_GE(pose.to_local(sorted[k].position).x(), 0.0);
  }
}

TEST(ExtractGuidanceTest, MidpointPropertyAndDeterminism) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const OccupancyGrid g = oracle::random_grid(rng, 48, 48, 0.1);
    const Pose2 pose{Vec2(2.4, 0.3), 1.2};
    const StaticGuidance s = compute_static_guidance(g, {});
    std::set<std::pair<int, int>> pairs;
    for (const auto& p : s.selected) {
      EXPECT_LT(p.group_i, p.group_j);
      EXPECT_TRUE(pairs.insert({p.group_i, p.group_j}).second);
      const Vec2 fi = g.cell_center(p.anchor_i), fj = g.cell_center(p.anchor_j);
      EXPECT_LE(std::abs((p.position - fi).norm() - (p.position - fj).norm()),
                std::sqrt(2.0) * g.resolution());
    }
    const auto a = extract_guidance(g, pose);
    const auto b = extract_guidance(g, pose);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].position, b[k].position);
      EXPECT_EQ(a[k].gap_width, b[k].gap_width);
    }
  }
}

TEST(ExtractGuidanceTest, TranslationEquivariance) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> shift(-50, 50);
  for (int trial = 0; trial < 20; ++trial) {
    const OccupancyGrid g = oracle::random_grid(rng, 40, 40, 0.1);
    const Vec2 offset = 0.1 * Vec2(shift(rng), shift(rng));
    const OccupancyGrid moved_grid(g.cells(), 0.1, g.origin() + offset);
    const Pose2 pose{Vec2(2.0, 0.2), 1.4};
    const Pose2 moved{pose.position + offset, pose.heading};
    const auto a = extract_guidance(g, pose);
    const auto b = extract_guidance(moved_grid, moved);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_NEAR((b[k].position - a[k].position - offset).norm(), 0.0, 1e-12);
      EXPECT_EQ(b[k].gap_width, a[k].gap_width);
      EXPECT_EQ(b[k].anchor_i, a[k].anchor_i);
    }
  }
}

}  // namespace
}  // namespace navg
