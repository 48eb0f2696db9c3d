#include "navg/guidance.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <utility>

namespace navg {

namespace {

// Compares midpoints exactly through their doubled cell coordinates.
bool position_less(const CandidatePoint& a, const CandidatePoint& b) {
  const int ax = a.anchor_i.x + a.anchor_j.x, bx = b.anchor_i.x + b.anchor_j.x;
  if (ax != bx) return ax < bx;
  const int ay = a.anchor_i.y + a.anchor_j.y, by = b.anchor_i.y + b.anchor_j.y;
  if (ay != by) return ay < by;
  if (a.position.x() != b.position.x()) return a.position.x() < b.position.x();
  return a.position.y() < b.position.y();
}

using PairKey = std::pair<int, int>;

PairKey key_of(const GuidancePoint& g) { return {g.group_i, g.group_j}; }

// Nearest chain index to a cell; anchors are chain members so this is normally exact.
std::size_t chain_index(const BoundaryGroup& g, const Cell& c) {
  if (auto i = g.index_of(c)) return *i;
  std::size_t best = 0;
  long best_d = std::numeric_limits<long>::max();
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    const long dx = g.points[i].x - c.x, dy = g.points[i].y - c.y;
    if (dx * dx + dy * dy < best_d) {
      best_d = dx * dx + dy * dy;
      best = i;
    }
  }
  return best;
}

const Cell& anchor_on(const GuidancePoint& g, int group) {
  return g.group_i == group ? g.anchor_i : g.anchor_j;
}

const BoundaryGroup& group_by_id(std::span<const BoundaryGroup> groups, int id) {
  if (id >= 0 && static_cast<std::size_t>(id) < groups.size() && groups[id].id == id) return groups[id];
  for (const BoundaryGroup& g : groups) {
    if (g.id == id) return g;
  }
  throw std::out_of_range("unknown boundary group " + std::to_string(id));
}

}  // namespace

std::vector<CandidatePoint> candidate_points(const DistanceField& field, double tie_eps) {
  std::vector<CandidatePoint> out;
  if (field.group_count < 2) return out;
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      const std::size_t i = field.index({x, y});
      const auto& a = field.nearest[i];
      const auto& b = field.second[i];
      if (!a || !b) continue;
      if (b->distance() - a->distance() > tie_eps) continue;
      CandidatePoint c;
      const Vec2 fa = field.cell_center(a->point);
      const Vec2 fb = field.cell_center(b->point);
      c.position = 0.5 * (fa + fb);
      c.anchor_i = a->point;
      c.anchor_j = b->point;
      c.group_i = a->group;
      c.group_j = b->group;
      // |p - f_i| + |p - f_j| for the midpoint, taken in cells so it is origin-free
      c.cost = field.resolution *
               std::sqrt(static_cast<double>((a->point.x - b->point.x) * (a->point.x - b->point.x) +
                                             (a->point.y - b->point.y) * (a->point.y - b->point.y)));
      c.source = {x, y};
      out.push_back(c);
    }
  }
  return out;
}

std::vector<GuidancePoint> select_guidance(std::span<const CandidatePoint> candidates) {
  std::map<PairKey, const CandidatePoint*> best;
  for (const CandidatePoint& c : candidates) {
    const PairKey key = std::minmax(c.group_i, c.group_j);
    auto [it, inserted] = best.try_emplace(key, &c);
    if (inserted) continue;
    const CandidatePoint& cur = *it->second;
    if (c.cost < cur.cost || (c.cost == cur.cost && position_less(c, cur)))
      it->second = &c;
  }
  std::vector<GuidancePoint> out;
  out.reserve(best.size());
  for (const auto& [key, c] : best) {
    GuidancePoint g;
    g.position = c->position;
    g.group_i = key.first;
    g.group_j = key.second;
    const bool swap = c->group_i != key.first;
    g.anchor_i = swap ? c->anchor_j : c->anchor_i;
    g.anchor_j = swap ? c->anchor_i : c->anchor_j;
    // midpoint, so the summed distances equal the anchor separation
    g.gap_width = c->cost;
    out.push_back(g);
  }
  return out;
}

bool line_of_sight(const OccupancyGrid& grid, const Vec2& from, const Vec2& to) {
  const Vec2 a = (from - grid.origin()) / grid.resolution() + Vec2(0.5, 0.5);
  const Vec2 b = (to - grid.origin()) / grid.resolution() + Vec2(0.5, 0.5);
  int x = static_cast<int>(std::floor(a.x()));
  int y = static_cast<int>(std::floor(a.y()));
  const int x_end = static_cast<int>(std::floor(b.x()));
  const int y_end = static_cast<int>(std::floor(b.y()));
  const Vec2 d = b - a;
  const int step_x = d.x() > 0 ? 1 : (d.x() < 0 ? -1 : 0);
  const int step_y = d.y() > 0 ? 1 : (d.y() < 0 ? -1 : 0);
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double delta_x = step_x ? std::abs(1.0 / d.x()) : inf;
  const double delta_y = step_y ? std::abs(1.0 / d.y()) : inf;
  double t_x = step_x > 0 ? (std::floor(a.x()) + 1.0 - a.x()) * delta_x
             : step_x < 0 ? (a.x() - std::floor(a.x())) * delta_x : inf;
  double t_y = step_y > 0 ? (std::floor(a.y()) + 1.0 - a.y()) * delta_y
             : step_y < 0 ? (a.y() - std::floor(a.y())) * delta_y : inf;
  const std::size_t limit = static_cast<std::size_t>(std::abs(x_end - x) + std::abs(y_end - y)) + 2;
  for (std::size_t i = 0; i < limit; ++i) {
    if (grid.occupied_or_free({x, y})) return false;
    if (x == x_end && y == y_end) break;
    if (t_x < t_y) {
      x += step_x;
      t_x += delta_x;
    } else {
      y += step_y;
      t_y += delta_y;
    }
  }
  return true;
}

std::vector<GuidancePoint> filter_pose(std::span<const GuidancePoint> points, const Pose2& pose,
                                       const OccupancyGrid& grid) {
  std::vector<GuidancePoint> out;
  for (const GuidancePoint& g : points) {
    if (pose.to_local(g.position).x() < 0.0) continue;
    if (!line_of_sight(grid, pose.position, g.position)) continue;
    out.push_back(g);
  }
  return out;
}

double largest_angle_deg(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double ab = (a - b).norm(), bc = (b - c).norm(), ca = (c - a).norm();
  if (ab == 0.0 || bc == 0.0 || ca == 0.0) return 180.0;
  const auto angle = [](double opposite, double s1, double s2) {
    const double cosv = (s1 * s1 + s2 * s2 - opposite * opposite) / (2.0 * s1 * s2);
    return std::acos(std::clamp(cosv, -1.0, 1.0));
  };
  const double largest = std::max({angle(bc, ab, ca), angle(ca, ab, bc), angle(ab, bc, ca)});
  return largest * 180.0 / std::numbers::pi;
}

std::array<TriangleEdge, 3> triangle_edges(const GuidancePoint& gij, const GuidancePoint& gjk,
                                           const GuidancePoint& gik,
                                           std::span<const BoundaryGroup> groups,
                                           double resolution) {
  const int i = gij.group_i, j = gij.group_j, k = gjk.group_j;
  const auto arc = [&](int group, const GuidancePoint& p, const GuidancePoint& q) {
    const BoundaryGroup& g = group_by_id(groups, group);
    return resolution * g.arc_length(chain_index(g, anchor_on(p, group)), chain_index(g, anchor_on(q, group)));
  };
  const double arc_i = arc(i, gij, gik);
  const double arc_j = arc(j, gij, gjk);
  const double arc_k = arc(k, gjk, gik);
  return {TriangleEdge{i, j, arc_i, gij.gap_width, arc_j},
          TriangleEdge{j, k, arc_j, gjk.gap_width, arc_k},
          TriangleEdge{i, k, arc_i, gik.gap_width, arc_k}};
}

std::vector<GuidancePoint> prune_triangles(std::span<const GuidancePoint> points,
                                           std::span<const BoundaryGroup> groups,
                                           double resolution, const GuidanceParams& params) {
  std::vector<GuidancePoint> out(points.begin(), points.end());
  std::map<PairKey, std::size_t> alive;
  std::set<int> ids;
  for (std::size_t n = 0; n < out.size(); ++n) {
    alive.emplace(key_of(out[n]), n);
    ids.insert(out[n].group_i);
    ids.insert(out[n].group_j);
  }
  if (ids.size() < 3) return out;

  std::vector<bool> removed(out.size(), false);
  const std::vector<int> sorted(ids.begin(), ids.end());
  for (std::size_t a = 0; a < sorted.size(); ++a) {
    for (std::size_t b = a + 1; b < sorted.size(); ++b) {
      const auto ij = alive.find({sorted[a], sorted[b]});
      if (ij == alive.end()) continue;
      for (std::size_t c = b + 1; c < sorted.size(); ++c) {
        const auto ik = alive.find({sorted[a], sorted[c]});
        const auto jk = alive.find({sorted[b], sorted[c]});
        if (ik == alive.end() || jk == alive.end()) continue;
        const GuidancePoint& gij = out[ij->second];
        const GuidancePoint& gjk = out[jk->second];
        const GuidancePoint& gik = out[ik->second];
        const auto edges = triangle_edges(gij, gjk, gik, groups, resolution);
        std::array<double, 3> len{edges[0].length(), edges[1].length(), edges[2].length()};
        std::array<double, 3> sorted_len = len;
        std::sort(sorted_len.begin(), sorted_len.end());
        const bool degenerate = sorted_len[0] + sorted_len[1] <= params.lambda * sorted_len[2];
        const bool obtuse =
            largest_angle_deg(gij.position, gjk.position, gik.position) > params.theta_max_deg;
        if (!degenerate && !obtuse) continue;

        // longest edge; on equal lengths prefer ij, then jk, then ik
        std::size_t longest = 0;
        for (std::size_t e = 1; e < 3; ++e) {
          if (len[e] > len[longest]) longest = e;
        }
        const auto victim = longest == 0 ? ij : (longest == 1 ? jk : ik);
        removed[victim->second] = true;
        alive.erase(victim);
        if (longest == 0) break;  // pair (i, j) is gone, no more triples with it
      }
    }
  }
  std::vector<GuidancePoint> kept;
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (!removed[n]) kept.push_back(out[n]);
  }
  return kept;
}

StaticGuidance compute_static_guidance(const OccupancyGrid& grid, const GuidanceParams& params) {
  StaticGuidance s;
  s.groups = extract_boundaries(grid);
  if (s.groups.size() < 2) return s;
  const DistanceField field = distance_transform(grid, s.groups);
  const std::vector<CandidatePoint> candidates = candidate_points(field, params.tie_eps);
  s.selected = select_guidance(candidates);
  return s;
}

std::vector<GuidancePoint> finalize_guidance(const StaticGuidance& stat, const OccupancyGrid& grid,
                                             const Pose2& pose, const GuidanceParams& params) {
  const std::vector<GuidancePoint> visible = filter_pose(stat.selected, pose, grid);
  return prune_triangles(visible, stat.groups, grid.resolution(), params);
}

std::vector<GuidancePoint> extract_guidance(const OccupancyGrid& grid, const Pose2& pose,
                                            const GuidanceParams& params) {
  return finalize_guidance(compute_static_guidance(grid, params), grid, pose, params);
}

}  // namespace navg
