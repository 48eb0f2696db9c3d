#include "navg/grid_map.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

namespace navg {

namespace {

// Clockwise as drawn with rows growing downward: W, NW, N, NE, E, SE, S, SW.
constexpr std::array<Cell, 8> kRing{{{-1, 0}, {-1, -1}, {0, -1}, {1, -1},
                                     {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};

Cell offset(const Cell& c, const Cell& d) { return {c.x + d.x, c.y + d.y}; }

int ring_index(const Cell& from, const Cell& to) {
  const Cell d{to.x - from.x, to.y - from.y};
  for (int i = 0; i < 8; ++i) {
    if (kRing[i] == d) return i;
  }
  return -1;
}

// Moore-neighbour contour trace of one group, starting at its smallest cell.
// May revisit cells on one-cell-thick parts.
std::vector<Cell> moore_trace(const Cell& start, std::size_t group_size,
                              const auto& member) {
  std::vector<Cell> trace{start};
  Cell c = start;
  int back = 0;  // west of the start cell is never a member
  int first_move = -1;
  const std::size_t limit = 4 * group_size + 16;
  for (std::size_t iter = 0; iter < limit; ++iter) {
    int found = -1;
    for (int k = 1; k <= 8; ++k) {
      const int d = (back + k) % 8;
      if (member(offset(c, kRing[d]))) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated cell
    if (c == start) {
      if (first_move < 0) first_move = found;
      else if (found == first_move) break;
    }
    const Cell next = offset(c, kRing[found]);
    const Cell backtrack = offset(c, kRing[(found + 7) % 8]);
    back = ring_index(next, backtrack);
    c = next;
    trace.push_back(c);
  }
  if (trace.size() > 1 && trace.back() == start) trace.pop_back();
  return trace;
}

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;  // > 0
  int inf = 0;           // -1, 0, +1
};

bool less_than(const Fraction& a, std::int64_t x) {
  if (a.inf != 0) return a.inf < 0;
  return a.num < x * a.den;
}

bool less_equal(const Fraction& a, const Fraction& b) {
  if (a.inf != 0 || b.inf != 0) {
    if (a.inf == b.inf) return true;
    return a.inf < b.inf;
  }
  return a.num * b.den <= b.num * a.den;
}

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Exact squared-distance transform to the cells flagged in `feature`, with the
// feature location written to `nearest`.
void group_edt(int width, int height, const std::vector<std::uint8_t>& feature,
               std::vector<std::int64_t>& sq, std::vector<Cell>& nearest) {
  const auto idx = [width](int x, int y) { return static_cast<std::size_t>(y) * width + x; };
  std::vector<std::int64_t> col_sq(feature.size(), kInf);
  std::vector<int> col_row(feature.size(), -1);
  std::vector<int> up(height), down(height);

  for (int x = 0; x < width; ++x) {
    int last = -1;
    for (int y = 0; y < height; ++y) {
      if (feature[idx(x, y)]) last = y;
      up[y] = last;
    }
    last = -1;
    for (int y = height - 1; y >= 0; --y) {
      if (feature[idx(x, y)]) last = y;
      down[y] = last;
    }
    for (int y = 0; y < height; ++y) {
      int row = -1;
      if (up[y] >= 0 && down[y] >= 0) row = (y - up[y] <= down[y] - y) ? up[y] : down[y];
      else if (up[y] >= 0) row = up[y];
      else if (down[y] >= 0) row = down[y];
      if (row >= 0) {
        const std::int64_t dy = y - row;
        col_sq[idx(x, y)] = dy * dy;
        col_row[idx(x, y)] = row;
      }
    }
  }

  std::vector<int> v(width);
  std::vector<Fraction> z(width + 1);
  for (int y = 0; y < height; ++y) {
    const auto f = [&](int q) { return col_sq[idx(q, y)]; };
    int k = -1;
    for (int q = 0; q < width; ++q) {
      if (f(q) >= kInf) continue;
      if (k < 0) {
        k = 0;
        v[0] = q;
        z[0] = {0, 1, -1};
        z[1] = {0, 1, +1};
        continue;
      }
      Fraction s;
      while (true) {
        const std::int64_t p = v[k];
        s = {(f(q) + std::int64_t{q} * q) - (f(p) + p * p), 2 * (q - p), 0};
        if (less_equal(s, z[k])) {
          --k;
          if (k < 0) break;
          continue;
        }
        break;
      }
      ++k;
      v[k] = q;
      z[k] = k == 0 ? Fraction{0, 1, -1} : s;
      z[k + 1] = {0, 1, +1};
    }
    if (k < 0) {
      for (int x = 0; x < width; ++x) sq[idx(x, y)] = kInf;
      continue;
    }
    int j = 0;
    for (int x = 0; x < width; ++x) {
      while (less_than(z[j + 1], x)) ++j;
      const std::int64_t dx = x - v[j];
      sq[idx(x, y)] = dx * dx + f(v[j]);
      nearest[idx(x, y)] = Cell{v[j], col_row[idx(v[j], y)]};
    }
  }
}

}  // namespace

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Vec2 origin)
    : resolution_(resolution), origin_(std::move(origin)) {
  if (width < 1 || height < 1) throw std::invalid_argument("grid dimensions must be >= 1");
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be > 0");
  cells_ = CellArray::Zero(height, width);
}

OccupancyGrid::OccupancyGrid(CellArray cells, double resolution, Vec2 origin)
    : cells_(std::move(cells)), resolution_(resolution), origin_(std::move(origin)) {
  if (cells_.rows() < 1 || cells_.cols() < 1)
    throw std::invalid_argument("grid dimensions must be >= 1");
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be > 0");
  if ((cells_ > 1).any()) throw std::invalid_argument("grid cells must be 0 or 1");
}

Cell OccupancyGrid::world_to_cell(const Vec2& p) const {
  const Vec2 g = (p - origin_) / resolution_;
  return {static_cast<int>(std::lround(g.x())), static_cast<int>(std::lround(g.y()))};
}

std::optional<std::size_t> BoundaryGroup::index_of(const Cell& c) const {
  const auto it = std::find(points.begin(), points.end(), c);
  if (it == points.end()) return std::nullopt;
  return static_cast<std::size_t>(it - points.begin());
}

double BoundaryGroup::arc_length(std::size_t from, std::size_t to) const {
  if (from == to || points.size() < 2) return 0.0;
  const auto step = [this](std::size_t i, std::size_t j) {
    const Cell& a = points[i];
    const Cell& b = points[j];
    return std::hypot(double(a.x - b.x), double(a.y - b.y));
  };
  const std::size_t lo = std::min(from, to), hi = std::max(from, to);
  double inner = 0.0;
  for (std::size_t i = lo; i < hi; ++i) inner += step(i, i + 1);
  if (!closed) return inner;
  double outer = step(points.size() - 1, 0);
  for (std::size_t i = hi; i + 1 < points.size(); ++i) outer += step(i, i + 1);
  for (std::size_t i = 0; i < lo; ++i) outer += step(i, i + 1);
  return std::min(inner, outer);
}

OccupancyGrid erode(const OccupancyGrid& grid) {
  OccupancyGrid out(grid.width(), grid.height(), grid.resolution(), grid.origin());
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      bool keep = grid.occupied({x, y});
      for (int dy = -1; keep && dy <= 1; ++dy) {
        for (int dx = -1; keep && dx <= 1; ++dx) {
          keep = grid.occupied_or_free({x + dx, y + dy});
        }
      }
      if (keep) out.set({x, y}, true);
    }
  }
  return out;
}

std::vector<Cell> boundary_cells(const OccupancyGrid& grid) {
  const OccupancyGrid eroded = erode(grid);
  std::vector<Cell> out;
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      if (grid.occupied({x, y}) && !eroded.occupied({x, y})) out.push_back({x, y});
    }
  }
  return out;
}

std::vector<BoundaryGroup> extract_boundaries(const OccupancyGrid& grid) {
  const std::vector<Cell> cells = boundary_cells(grid);
  std::vector<int> label(static_cast<std::size_t>(grid.width()) * grid.height(), -2);
  for (const Cell& c : cells) label[grid.index(c)] = -1;

  std::vector<BoundaryGroup> groups;
  for (const Cell& seed : cells) {  // row-major, so seed is the group's smallest cell
    if (label[grid.index(seed)] != -1) continue;
    const int id = static_cast<int>(groups.size());

    std::vector<Cell> members;
    std::vector<Cell> stack{seed};
    label[grid.index(seed)] = id;
    while (!stack.empty()) {
      const Cell c = stack.back();
      stack.pop_back();
      members.push_back(c);
      for (const Cell& d : kRing) {
        const Cell n = offset(c, d);
        if (grid.in_bounds(n) && label[grid.index(n)] == -1) {
          label[grid.index(n)] = id;
          stack.push_back(n);
        }
      }
    }

    const auto member = [&](const Cell& c) {
      return grid.in_bounds(c) && label[grid.index(c)] == id;
    };
    std::vector<Cell> trace = moore_trace(seed, members.size(), member);
    // the trace runs clockwise on screen (rows down); flip to world clockwise
    std::reverse(trace.begin() + 1, trace.end());

    std::vector<Cell> chain;
    std::vector<std::uint8_t> placed(label.size(), 0);
    bool repeats = false;
    for (const Cell& c : trace) {
      if (placed[grid.index(c)]) {
        repeats = true;
        continue;
      }
      placed[grid.index(c)] = 1;
      chain.push_back(c);
    }

    std::vector<Cell> leftover;
    for (const Cell& c : members) {
      if (!placed[grid.index(c)]) leftover.push_back(c);
    }
    std::sort(leftover.begin(), leftover.end());

    // Slot interior cells between two chain neighbours they touch.
    bool progress = true;
    while (!leftover.empty() && progress) {
      progress = false;
      for (auto it = leftover.begin(); it != leftover.end();) {
        const std::size_t m = chain.size();
        std::optional<std::size_t> slot;
        for (std::size_t k = 0; k + 1 < m && !slot; ++k) {
          if (chebyshev(chain[k], *it) == 1 && chebyshev(chain[k + 1], *it) == 1) slot = k + 1;
        }
        if (!slot && m >= 2 && !repeats && chebyshev(chain.back(), chain.front()) == 1 &&
            chebyshev(chain.back(), *it) == 1 && chebyshev(chain.front(), *it) == 1) {
          slot = m;
        }
        if (slot) {
          chain.insert(chain.begin() + static_cast<std::ptrdiff_t>(*slot), *it);
          it = leftover.erase(it);
          progress = true;
        } else {
          ++it;
        }
      }
    }
    const bool complete = leftover.empty();
    chain.insert(chain.end(), leftover.begin(), leftover.end());

    BoundaryGroup group;
    group.id = id;
    group.closed = !repeats && complete && chain.size() >= 3 &&
                   chebyshev(chain.back(), chain.front()) == 1;
    group.points = std::move(chain);
    groups.push_back(std::move(group));
  }
  return groups;
}

DistanceField distance_transform(const OccupancyGrid& grid, std::span<const BoundaryGroup> groups) {
  DistanceField field;
  field.width = grid.width();
  field.height = grid.height();
  field.resolution = grid.resolution();
  field.origin = grid.origin();
  field.group_count = static_cast<int>(groups.size());
  const std::size_t n = static_cast<std::size_t>(field.width) * field.height;
  field.nearest.assign(n, std::nullopt);
  field.second.assign(n, std::nullopt);
  if (groups.empty()) return field;

  std::vector<std::uint8_t> feature(n, 0);
  std::vector<std::int64_t> sq(n, kInf);
  std::vector<Cell> where(n);
  for (const BoundaryGroup& g : groups) {
    for (const Cell& c : g.points) feature[grid.index(c)] = 1;
    group_edt(field.width, field.height, feature, sq, where);
    for (const Cell& c : g.points) feature[grid.index(c)] = 0;

    for (int y = 0; y < field.height; ++y) {
      for (int x = 0; x < field.width; ++x) {
        if (grid.occupied({x, y})) continue;
        const std::size_t i = grid.index({x, y});
        if (sq[i] >= kInf) continue;
        const Feature f{where[i], g.id, sq[i]};
        auto& first = field.nearest[i];
        auto& second = field.second[i];
        if (!first || f.squared < first->squared) {
          second = first;
          first = f;
        } else if (!second || f.squared < second->squared) {
          second = f;
        }
      }
    }
  }
  return field;
}

double signed_area(std::span<const Cell> ring) {
  double a = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Cell& p = ring[i];
    const Cell& q = ring[(i + 1) % ring.size()];
    a += double(p.x) * q.y - double(q.x) * p.y;
  }
  return 0.5 * a;
}

}  // namespace navg
