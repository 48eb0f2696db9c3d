#pragma once

#include <array>
#include <span>
#include <vector>

#include "navg/geometry.hpp"
#include "navg/grid_map.hpp"

namespace navg {

struct GuidanceParams {
  double tie_eps = 1.0;          // cells
  double theta_max_deg = 150.0;  // largest-angle trigger
  double lambda = 1.1;           // near-degeneracy ratio
};

/// Midpoint of the two nearest boundary points (from different groups) of a
/// free cell whose two distances tie within tie_eps.
struct CandidatePoint {
  Vec2 position = Vec2::Zero();
  Cell anchor_i;
  Cell anchor_j;
  int group_i = -1;
  int group_j = -1;
  double cost = 0.0;  // meters, |p - f_i| + |p - f_j|
  Cell source;        // free cell that produced the candidate
};

/// Cost-minimal candidate of one unordered group pair; group_i < group_j.
struct GuidancePoint {
  Vec2 position = Vec2::Zero();
  int group_i = -1;
  int group_j = -1;
  Cell anchor_i;
  Cell anchor_j;
  double gap_width = 0.0;  // meters
};

/// Edge of the group triangle: half arc on each side plus the gap.
struct TriangleEdge {
  int group_i = -1;
  int group_j = -1;
  double arc_i = 0.0;  // meters, full arc along B_i
  double gap = 0.0;
  double arc_j = 0.0;
  double length() const { return 0.5 * arc_i + gap + 0.5 * arc_j; }
};

std::vector<CandidatePoint> candidate_points(const DistanceField& field, double tie_eps);

std::vector<GuidancePoint> select_guidance(std::span<const CandidatePoint> candidates);

/// Drops points behind the robot (negative forward coordinate) and points whose
/// straight ray from the robot center crosses an obstacle cell.
std::vector<GuidancePoint> filter_pose(std::span<const GuidancePoint> points, const Pose2& pose,
                                       const OccupancyGrid& grid);

/// True when the segment between two world points crosses no obstacle cell.
bool line_of_sight(const OccupancyGrid& grid, const Vec2& from, const Vec2& to);

/// Edges (ij, jk, ik) of the triangle formed by three mutually paired groups.
/// `gij`, `gjk`, `gik` must have matching group pairs.
std::array<TriangleEdge, 3> triangle_edges(const GuidancePoint& gij, const GuidancePoint& gjk,
                                           const GuidancePoint& gik,
                                           std::span<const BoundaryGroup> groups,
                                           double resolution);

/// Largest interior angle, in degrees, of the triangle with the given vertices.
double largest_angle_deg(const Vec2& a, const Vec2& b, const Vec2& c);

std::vector<GuidancePoint> prune_triangles(std::span<const GuidancePoint> points,
                                           std::span<const BoundaryGroup> groups,
                                           double resolution, const GuidanceParams& params);

/// Pose-independent part of the pipeline: boundaries and one point per group pair.
struct StaticGuidance {
  std::vector<BoundaryGroup> groups;
  std::vector<GuidancePoint> selected;
};

StaticGuidance compute_static_guidance(const OccupancyGrid& grid, const GuidanceParams& params);

/// Pose filter and triangle pruning over a precomputed static set.
std::vector<GuidancePoint> finalize_guidance(const StaticGuidance& stat, const OccupancyGrid& grid,
                                             const Pose2& pose, const GuidanceParams& params);

/// erode -> boundaries -> distance field -> candidates -> select -> filter -> prune.
std::vector<GuidancePoint> extract_guidance(const OccupancyGrid& grid, const Pose2& pose,
                                            const GuidanceParams& params = {});

}  // namespace navg
