#include "navg/map_io.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "navg/guidance.hpp"

namespace navg {

namespace {

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw MapParseError("line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void fail_offset(std::streamoff off, const std::string& what) {
  throw MapParseError("byte offset " + std::to_string(off) + ": " + what);
}

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int pgm_int(std::istream& in, const char* what) {
  const std::streamoff off = in.tellg();
  const std::string tok = pgm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail_offset(off, std::string("expected ") + what + ", got '" + tok + "'");
  }
}

}  // namespace

OccupancyGrid parse_grid_text(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  const auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) fail_line(lineno + 1, "missing header 'width height resolution'");
  int width = 0, height = 0;
  double resolution = 0.0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> width >> height >> resolution) || (header >> extra))
      fail_line(lineno, "malformed header, expected 'width height resolution'");
    if (width < 1 || height < 1) fail_line(lineno, "width and height must be >= 1");
    if (!(resolution > 0.0)) fail_line(lineno, "resolution must be > 0");
  }

  CellArray cells = CellArray::Zero(height, width);
  for (int y = 0; y < height; ++y) {
    if (!next_line()) fail_line(lineno + 1, "expected " + std::to_string(height) + " rows, got " + std::to_string(y));
    std::istringstream row(line);
    std::string tok;
    int x = 0;
    while (row >> tok) {
      if (x >= width) fail_line(lineno, "too many cells, expected " + std::to_string(width));
      if (tok != "0" && tok != "1") fail_line(lineno, "cell " + std::to_string(x) + " is '" + tok + "', expected 0 or 1");
      cells(y, x++) = tok == "1" ? 1 : 0;
    }
    if (x != width) fail_line(lineno, "expected " + std::to_string(width) + " cells, got " + std::to_string(x));
  }
  if (next_line()) fail_line(lineno, "unexpected content after last row");
  return OccupancyGrid(std::move(cells), resolution);
}

void write_grid_text(std::ostream& out, const OccupancyGrid& grid) {
  out << grid.width() << ' ' << grid.height() << ' ' << grid.resolution() << '\n';
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      if (x) out << ' ';
      out << (grid.occupied({x, y}) ? '1' : '0');
    }
    out << '\n';
  }
}

OccupancyGrid parse_pgm(std::istream& in, double resolution) {
  const std::string magic = pgm_token(in);
  if (magic != "P2" && magic != "P5") fail_offset(0, "not a PGM file (magic '" + magic + "')");
  const int width = pgm_int(in, "width");
  const int height = pgm_int(in, "height");
  const int maxval = pgm_int(in, "maxval");
  if (width < 1 || height < 1) fail_offset(in.tellg(), "empty image");
  if (maxval < 1 || maxval > 65535) fail_offset(in.tellg(), "maxval out of range");

  CellArray cells = CellArray::Zero(height, width);
  for (int row = 0; row < height; ++row) {
    for (int x = 0; x < width; ++x) {
      int value = 0;
      if (magic == "P2") {
        value = pgm_int(in, "pixel value");
      } else {
        const std::streamoff off = in.tellg();
        const int hi = in.get();
        int lo = 0;
        if (maxval > 255) lo = in.get();
        if (hi == EOF || lo == EOF) fail_offset(off, "truncated pixel data");
        value = maxval > 255 ? (hi << 8) | lo : hi;
      }
      if (value > maxval) fail_offset(in.tellg(), "pixel value exceeds maxval");
      cells(height - 1 - row, x) = value < 128 ? 1 : 0;
    }
  }
  return OccupancyGrid(std::move(cells), resolution);
}

OccupancyGrid load_map(const std::filesystem::path& path, double pgm_resolution) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map '" + path.string() + "'");
  const int c0 = in.peek();
  if (c0 == 'P') return parse_pgm(in, pgm_resolution);
  return parse_grid_text(in);
}

void write_overlay_ppm(std::ostream& out, const OccupancyGrid& grid,
                       std::span<const GuidancePoint> points,
                       const std::optional<Pose2>& robot, int scale) {
  const int w = grid.width() * scale, h = grid.height() * scale;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3, 255);
  const auto paint = [&](int cx, int cy, std::array<std::uint8_t, 3> color) {
    if (cx < 0 || cy < 0 || cx >= grid.width() || cy >= grid.height()) return;
    const int top = (grid.height() - 1 - cy) * scale;
    for (int dy = 0; dy < scale; ++dy) {
      for (int dx = 0; dx < scale; ++dx) {
        const std::size_t i = (static_cast<std::size_t>(top + dy) * w + cx * scale + dx) * 3;
        rgb[i] = color[0];
        rgb[i + 1] = color[1];
        rgb[i + 2] = color[2];
      }
    }
  };
  for (int y = 0; y < grid.height(); ++y)
    for (int x = 0; x < grid.width(); ++x)
      if (grid.occupied({x, y})) paint(x, y, {0, 0, 0});
  for (const Cell& c : boundary_cells(grid)) paint(c.x, c.y, {128, 128, 128});
  for (const GuidancePoint& g : points) {
    const Cell c = grid.world_to_cell(g.position);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) paint(c.x + dx, c.y + dy, {220, 30, 30});
  }
  if (robot) {
    const Cell c = grid.world_to_cell(robot->position);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) paint(c.x + dx, c.y + dy, {30, 60, 220});
    const Cell tip = grid.world_to_cell(robot->position + 3.0 * grid.resolution() * robot->forward());
    paint(tip.x, tip.y, {30, 60, 220});
  }
  out << "P6\n" << w << ' ' << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

}  // namespace navg
