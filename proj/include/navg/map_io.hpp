#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "navg/grid_map.hpp"

namespace navg {

struct GuidancePoint;

/// Raised on malformed map input; the message names the line (text maps) or
/// byte offset (PGM) where parsing stopped.
class MapParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grid text format:
//   line 1: "<width> <height> <resolution>"
//   then <height> lines, each <width> whitespace-separated 0/1 tokens.
// Line k+2 holds row y = k. Origin is (0, 0).
OccupancyGrid parse_grid_text(std::istream& in);
void write_grid_text(std::ostream& out, const OccupancyGrid& grid);

/// PGM (P2 or P5). Pixels with raw value < 128 are obstacles. Image row 0 is
/// the top, i.e. the largest world y.
OccupancyGrid parse_pgm(std::istream& in, double resolution);

/// Picks the format from the magic bytes.
OccupancyGrid load_map(const std::filesystem::path& path, double pgm_resolution = 0.1);

/// Binary PPM (P6) overlay: free white, obstacles black, boundary cells grey,
/// guidance points red, robot blue. Top row is the largest world y.
void write_overlay_ppm(std::ostream& out, const OccupancyGrid& grid,
                       std::span<const GuidancePoint> points,
                       const std::optional<Pose2>& robot, int scale = 4);

}  // namespace navg
