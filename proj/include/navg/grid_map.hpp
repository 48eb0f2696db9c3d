#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "navg/geometry.hpp"

namespace navg {

/// Integer cell coordinate; x is the column, y the row. Ordering is row-major
/// (y first), which is the "lexicographic" order used throughout.
struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

inline int chebyshev(const Cell& a, const Cell& b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

using CellArray = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Binary occupancy map. Cell (x, y) has its center at origin + resolution * (x, y);
/// rows grow along world +y.
class OccupancyGrid {
 public:
  OccupancyGrid(int width, int height, double resolution, Vec2 origin = Vec2::Zero());
  OccupancyGrid(CellArray cells, double resolution, Vec2 origin = Vec2::Zero());

  int width() const { return static_cast<int>(cells_.cols()); }
  int height() const { return static_cast<int>(cells_.rows()); }
  double resolution() const { return resolution_; }
  const Vec2& origin() const { return origin_; }
  const CellArray& cells() const { return cells_; }

  bool in_bounds(const Cell& c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width() && c.y < height();
  }
  bool occupied(const Cell& c) const { return cells_(c.y, c.x) != 0; }
  /// Out-of-bounds cells read as free.
  bool occupied_or_free(const Cell& c) const { return in_bounds(c) && occupied(c); }
  void set(const Cell& c, bool occupied) { cells_(c.y, c.x) = occupied ? 1 : 0; }

  std::size_t index(const Cell& c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width()) +
           static_cast<std::size_t>(c.x);
  }
  Vec2 cell_center(const Cell& c) const {
    return origin_ + resolution_ * Vec2(c.x, c.y);
  }
  Cell world_to_cell(const Vec2& p) const;

 private:
  CellArray cells_;
  double resolution_;
  Vec2 origin_;
};

/// Clockwise chain of 8-connected boundary cells belonging to one obstacle.
struct BoundaryGroup {
  int id = 0;
  std::vector<Cell> points;
  bool closed = false;

  std::optional<std::size_t> index_of(const Cell& c) const;
  /// Length of the shorter chain arc between two chain indices, in cells.
  /// Open chains only have one arc.
  double arc_length(std::size_t from, std::size_t to) const;
};

/// Nearest boundary feature of a free cell.
struct Feature {
  Cell point;
  int group = -1;
  std::int64_t squared = 0;  // cells^2

  double distance() const { return std::sqrt(static_cast<double>(squared)); }
};

/// Per-cell nearest boundary point and nearest boundary point of a different group.
struct DistanceField {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  Vec2 origin = Vec2::Zero();
  int group_count = 0;
  std::vector<std::optional<Feature>> nearest;
  std::vector<std::optional<Feature>> second;

  std::size_t index(const Cell& c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(c.x);
  }
  Vec2 cell_center(const Cell& c) const { return origin + resolution * Vec2(c.x, c.y); }
};

/// One step of binary erosion with the full 3x3 element; outside the map is free.
OccupancyGrid erode(const OccupancyGrid& grid);

/// Cells that are obstacles in the map but free after erosion.
std::vector<Cell> boundary_cells(const OccupancyGrid& grid);

/// Boundary set partitioned into 8-connected groups, each ordered clockwise
/// (negative shoelace area in (x, y) cell coordinates) from its smallest cell.
/// Group ids follow the order of their start cells.
std::vector<BoundaryGroup> extract_boundaries(const OccupancyGrid& grid);

/// Exact Euclidean nearest-feature transform over the given boundary groups.
/// Within a group ties go to the smaller column; across groups to the smaller id.
DistanceField distance_transform(const OccupancyGrid& grid, std::span<const BoundaryGroup> groups);

/// Signed shoelace area of a cell polygon in cell units.
double signed_area(std::span<const Cell> ring);

}  // namespace navg
