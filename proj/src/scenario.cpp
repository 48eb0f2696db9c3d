#include "navg/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "navg/json_io.hpp"

namespace navg {

namespace {

constexpr int kMaxAttempts = 200;

ShapeSpec circle_at(double radius, double x, double y = 0.0) { return {"circle", {radius, 0.0}, {x, y}, 0.0}; }

ShapeSpec box_at(double hx, double hy, double x, double y = 0.0, double yaw = 0.0) {
  return {"box", {hx, hy}, {x, y}, yaw};
}

TemplateSpec corridor(std::string name, std::string group, std::string description, std::vector<ShapeSpec> obstacles,
                      std::vector<double> crossings = {}) {
  TemplateSpec t;
  t.name = std::move(name);
  t.kind = "corridor";
  t.group = std::move(group);
  t.description = std::move(description);
  t.extent = {20.0, 0.0};
  t.obstacles = std::move(obstacles);
  t.crossings = std::move(crossings);
  return t;
}

std::vector<ShapeSpec> corridor_a() {
  return {circle_at(0.5, 6.0), box_at(0.6, 0.4, 10.0), circle_at(0.6, 14.0)};
}

std::vector<ShapeSpec> corridor_b() {
  return {circle_at(0.4, 5.0), box_at(0.5, 0.5, 8.5, 0.0, std::numbers::pi / 4), circle_at(0.5, 12.0),
          box_at(0.4, 0.7, 15.5)};
}

std::vector<ShapeSpec> corridor_c() {
  return {box_at(1.2, 0.25, 6.0), circle_at(0.6, 10.0), box_at(0.3, 1.0, 13.5), circle_at(0.4, 16.5)};
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return seed * 0x9E3779B97F4A7C15ULL ^ h;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Half extents of the axis-aligned bounding box of a shape.
Vec2 aabb_half(const ShapeSpec& s, double scale) {
  if (s.shape == "circle") return Vec2::Constant(s.size.x() * scale);
  const double c = std::abs(std::cos(s.yaw)), n = std::abs(std::sin(s.yaw));
  const Vec2 h = s.size * scale;
  return {c * h.x() + n * h.y(), n * h.x() + c * h.y()};
}

void add_shape(WorldState& w, const ShapeSpec& s, const Vec2& center, double scale) {
  if (s.shape == "circle") {
    w.circles.push_back({center, s.size.x() * scale});
  } else if (s.shape == "box") {
    w.boxes.push_back({center, s.size * scale, s.yaw});
  } else {
    throw ConfigError("unknown obstacle shape '" + s.shape + "'");
  }
}

// Walls enclosing [0, lx] x [0, ly]; `closed_ends` adds the two short walls.
void add_walls(WorldState& w, double lx, double ly, double t, bool closed_ends) {
  w.boxes.push_back({{0.5 * lx, -0.5 * t}, {0.5 * lx, 0.5 * t}, 0.0});
  w.boxes.push_back({{0.5 * lx, ly + 0.5 * t}, {0.5 * lx, 0.5 * t}, 0.0});
  if (closed_ends) {
    w.boxes.push_back({{-0.5 * t, 0.5 * ly}, {0.5 * t, 0.5 * ly + t}, 0.0});
    w.boxes.push_back({{lx + 0.5 * t, 0.5 * ly}, {0.5 * t, 0.5 * ly + t}, 0.0});
  }
}

bool path_clear(const WorldState& w, const Vec2& a, const Vec2& b, double radius) {
  const int samples = std::max(2, static_cast<int>(std::ceil((b - a).norm() / 0.05)) + 1);
  for (int i = 0; i < samples; ++i) {
    const Vec2 p = a + (b - a) * (static_cast<double>(i) / (samples - 1));
    if (disc_clearance(w, {p, radius}) <= 0.0) return false;
  }
  return true;
}

[[noreturn]] void fail(const TemplateSpec& spec, std::uint64_t seed, const std::string& what) {
  throw ScenarioError("template " + spec.name + " seed " + std::to_string(seed) + ": " + what);
}

// Adds a pedestrian walking a -> b with a random speed, phase and direction,
// keeping it away from the robot start.
void add_walker(WorldState& w, ScenarioDraws& draws, const TemplateSpec& spec, std::uint64_t seed,
                std::mt19937_64& rng, const Vec2& a, const Vec2& b) {
  Pedestrian p;
  p.id = static_cast<int>(w.pedestrians.size()) + 1;
  p.radius = 0.3;
  p.from = a;
  p.to = b;
  p.speed = uniform(rng, spec.speed_min, spec.speed_max);
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxAttempts) fail(spec, seed, "pedestrian " + std::to_string(p.id) + " keeps starting on the robot");
    p.progress = uniform(rng, 0.0, p.length());
    p.direction = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
    if ((p.position() - w.robot.pose.position).norm() >= 2.0 + p.radius) break;
  }
  draws.pedestrian_speeds.push_back(p.speed);
  w.pedestrians.push_back(p);
}

Scenario make_corridor(const TemplateSpec& spec, std::uint64_t seed, std::mt19937_64& rng) {
  Scenario s;
  WorldState& w = s.world;
  const double length = spec.extent.x();
  const double width = uniform(rng, spec.width_min, spec.width_max);
  s.draws.corridor_width = width;
  w.bounds_min = {0.0, -spec.wall_thickness};
  w.bounds_max = {length, width + spec.wall_thickness};
  add_walls(w, length, width, spec.wall_thickness, false);
  w.robot.pose = {{1.5, 0.5 * width}, 0.0};
  w.goal = {length - 1.5, 0.5 * width};

  std::vector<std::pair<Vec2, Vec2>> placed;  // center, aabb half extents
  for (std::size_t i = 0; i < spec.obstacles.size(); ++i) {
    const ShapeSpec& o = spec.obstacles[i];
    const double scale = uniform(rng, spec.scale_min, spec.scale_max);
    const Vec2 half = aabb_half(o, scale);
    if (2.0 * half.y() + spec.min_gap > width) {
      fail(spec, seed, "obstacle " + std::to_string(i) + " leaves no passable gap of " + std::to_string(spec.min_gap) + " m");
    }
    bool ok = false;
    double y = 0.0;
    for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
      y = uniform(rng, half.y(), width - half.y());
      const double gap = std::max(y - half.y(), width - y - half.y());
      ok = gap >= spec.min_gap;
      for (const auto& [c, h] : placed) {
        const bool overlap = std::abs(c.x() - o.at.x()) < h.x() + half.x() && std::abs(c.y() - y) < h.y() + half.y();
        ok = ok && !overlap;
      }
    }
    if (!ok) fail(spec, seed, "obstacle " + std::to_string(i) + " has no lateral placement without overlap");
    const Vec2 center(o.at.x(), y);
    placed.emplace_back(center, half);
    add_shape(w, o, center, scale);
    s.draws.scales.push_back(scale);
    s.draws.lateral.push_back(y);
  }

  for (std::size_t i = 0; i < spec.crossings.size(); ++i) {
    const double r = 0.3;
    Vec2 a, b;
    bool ok = false;
    for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
      const double x = spec.crossings[i] + uniform(rng, -spec.crossing_jitter, spec.crossing_jitter);
      a = {x, r + 0.1};
      b = {x, width - r - 0.1};
      ok = path_clear(w, a, b, r);
    }
    if (!ok) fail(spec, seed, "crossing " + std::to_string(i) + " is blocked by an obstacle");
    add_walker(w, s.draws, spec, seed, rng, a, b);
  }
  return s;
}

Scenario make_lobby(const TemplateSpec& spec, std::uint64_t seed, std::mt19937_64& rng, const KinematicLimits& body) {
  Scenario s;
  WorldState& w = s.world;
  const double lx = spec.extent.x(), ly = spec.extent.y();
  w.bounds_min = Vec2::Constant(-spec.wall_thickness);
  w.bounds_max = Vec2(lx, ly) + Vec2::Constant(spec.wall_thickness);
  add_walls(w, lx, ly, spec.wall_thickness, true);
  const Vec2 center(0.5 * lx, 0.5 * ly);
  const bool long_x = lx >= ly;
  for (const ShapeSpec& o : spec.obstacles) {
    const double scale = uniform(rng, spec.scale_min, spec.scale_max);
    const double shift = uniform(rng, -spec.shift_max, spec.shift_max);
    const Vec2 offset = long_x ? Vec2(shift, 0.0) : Vec2(0.0, shift);
    add_shape(w, o, center + o.at + offset, scale);
    s.draws.scales.push_back(scale);
    s.draws.shifts.push_back(shift);
  }
  w.goal = center;
  if (disc_clearance(w, {center, 0.5}) <= 0.0) fail(spec, seed, "goal at the center is covered by a pillar");

  const int side = std::uniform_int_distribution<int>(0, 3)(rng);
  s.draws.start_side = side;
  const double margin = 1.2;
  bool ok = false;
  for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
    Vec2 p;
    switch (side) {
      case 0:
        p = {margin, center.y() + uniform(rng, -0.25 * ly, 0.25 * ly)};
        break;
      case 1:
        p = {lx - margin, center.y() + uniform(rng, -0.25 * ly, 0.25 * ly)};
        break;
      case 2:
        p = {center.x() + uniform(rng, -0.25 * lx, 0.25 * lx), margin};
        break;
      default:
        p = {center.x() + uniform(rng, -0.25 * lx, 0.25 * lx), ly - margin};
        break;
    }
    const Vec2 d = center - p;
    w.robot.pose = {p, std::atan2(d.y(), d.x())};
    ok = robot_clearance(w, body) > 0.3;
  }
  if (!ok) fail(spec, seed, "no free start pose on side " + std::to_string(side));
  return s;
}

Scenario make_maze(const TemplateSpec& spec, std::uint64_t seed, std::mt19937_64& rng, const KinematicLimits& body) {
  Scenario s;
  WorldState& w = s.world;
  const double lx = spec.extent.x(), ly = spec.extent.y();
  w.bounds_min = Vec2::Constant(-spec.wall_thickness);
  w.bounds_max = Vec2(lx, ly) + Vec2::Constant(spec.wall_thickness);
  add_walls(w, lx, ly, spec.wall_thickness, true);
  for (const ShapeSpec& o : spec.obstacles) {
    // shift across the wall's long axis so it stays attached to the outer wall
    const double shift = uniform(rng, -spec.shift_max, spec.shift_max);
    const bool long_x = o.shape == "box" && o.size.x() >= o.size.y();
    const Vec2 across = long_x ? Vec2(-std::sin(o.yaw), std::cos(o.yaw)) : Vec2(std::cos(o.yaw), std::sin(o.yaw));
    add_shape(w, o, o.at + shift * across, 1.0);
    s.draws.shifts.push_back(shift);
  }
  w.robot.pose = spec.start;
  w.goal = spec.goal;
  if (robot_clearance(w, body) <= 0.0) fail(spec, seed, "start pose overlaps a wall");
  if (disc_clearance(w, {w.goal, 0.3}) <= 0.0) fail(spec, seed, "goal overlaps a wall");
  for (std::size_t i = 0; i < spec.walkers.size(); ++i) {
    if (!path_clear(w, spec.walkers[i].from, spec.walkers[i].to, 0.3)) {
      fail(spec, seed, "walker " + std::to_string(i) + " path crosses a wall");
    }
    add_walker(w, s.draws, spec, seed, rng, spec.walkers[i].from, spec.walkers[i].to);
  }
  return s;
}

}  // namespace

const TemplateSpec& Catalog::find(const std::string& name) const {
  for (const TemplateSpec& t : templates) {
    if (t.name == name) return t;
  }
  throw ConfigError("unknown scenario template '" + name + "'");
}

Catalog default_catalog() {
  Catalog c;
  c.templates.push_back(corridor("a", "static", "corridor, three mixed obstacles", corridor_a()));
  c.templates.push_back(corridor("b", "static", "corridor, four obstacles incl. a rotated box", corridor_b()));
  c.templates.push_back(corridor("c", "static", "corridor with elongated obstacles", corridor_c()));
  c.templates.push_back(corridor("d", "dynamic", "corridor a with crossing pedestrians", corridor_a(), {8.0, 12.0}));
  c.templates.push_back(
      corridor("e", "dynamic", "corridor b with crossing pedestrians", corridor_b(), {6.75, 10.25, 13.75}));
  c.templates.push_back(
      corridor("f", "dynamic", "corridor c with crossing pedestrians", corridor_c(), {8.0, 11.75, 15.0}));

  TemplateSpec g;
  g.name = "g";
  g.kind = "lobby";
  g.group = "static";
  g.description = "lobby with shifted pillars, goal at the center";
  g.extent = {14.0, 10.0};
  g.obstacles = {circle_at(0.5, -3.5, -2.5), circle_at(0.5, 3.5, -2.5), circle_at(0.5, -3.5, 2.5),
                 circle_at(0.5, 3.5, 2.5),   box_at(0.4, 0.4, 0.0, -3.2), box_at(0.4, 0.4, 0.0, 3.2)};
  c.templates.push_back(g);

  TemplateSpec h;
  h.name = "h";
  h.kind = "maze";
  h.group = "dynamic";
  h.description = "maze with two partition walls and walking pedestrians";
  h.extent = {16.0, 10.0};
  h.shift_max = 0.75;
  h.scale_min = h.scale_max = 1.0;
  h.obstacles = {box_at(0.15, 3.25, 5.33, 3.25), box_at(0.15, 3.25, 10.67, 6.75)};
  h.walkers = {{{8.0, 1.0}, {8.0, 9.0}}, {{12.5, 5.0}, {15.3, 5.0}}};
  h.start = {{1.5, 1.5}, std::numbers::pi / 2};
  h.goal = {14.5, 8.5};
  c.templates.push_back(h);
  return c;
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario catalog " + path.string());
  try {
    return nlohmann::json::parse(in).get<Catalog>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid scenario catalog " + path.string() + ": " + e.what());
  }
}

Scenario generate_scenario(const TemplateSpec& spec, std::uint64_t seed, double dt) {
  std::mt19937_64 rng(mix_seed(seed, spec.name));
  const KinematicLimits body;
  Scenario s;
  if (spec.kind == "corridor") {
    s = make_corridor(spec, seed, rng);
  } else if (spec.kind == "lobby") {
    s = make_lobby(spec, seed, rng, body);
  } else if (spec.kind == "maze") {
    s = make_maze(spec, seed, rng, body);
  } else {
    throw ConfigError("unknown template kind '" + spec.kind + "'");
  }
  s.world.template_name = spec.name;
  s.world.seed = seed;
  s.world.dt = dt;
  if (robot_clearance(s.world, body) <= 0.0) fail(spec, seed, "robot starts in contact");
  return s;
}

void to_json(nlohmann::json& j, const ShapeSpec& s) {
  j = nlohmann::json{{"shape", s.shape}, {"size", vec_to_json(s.size)}, {"at", vec_to_json(s.at)}, {"yaw", s.yaw}};
}

void from_json(const nlohmann::json& j, ShapeSpec& s) {
  s.shape = j.at("shape").get<std::string>();
  s.size = vec_from_json(j.at("size"));
  s.at = vec_from_json(j.at("at"));
  s.yaw = j.value("yaw", 0.0);
}

void to_json(nlohmann::json& j, const WalkerSpec& w) {
  j = nlohmann::json{{"from", vec_to_json(w.from)}, {"to", vec_to_json(w.to)}};
}

void from_json(const nlohmann::json& j, WalkerSpec& w) {
  w.from = vec_from_json(j.at("from"));
  w.to = vec_from_json(j.at("to"));
}

void to_json(nlohmann::json& j, const TemplateSpec& t) {
  j = nlohmann::json{{"name", t.name},
                     {"kind", t.kind},
                     {"group", t.group},
                     {"description", t.description},
                     {"extent", vec_to_json(t.extent)},
                     {"width", {t.width_min, t.width_max}},
                     {"wall_thickness", t.wall_thickness},
                     {"scale", {t.scale_min, t.scale_max}},
                     {"shift_max", t.shift_max},
                     {"min_gap", t.min_gap},
                     {"pedestrian_speed", {t.speed_min, t.speed_max}},
                     {"crossing_jitter", t.crossing_jitter},
                     {"obstacles", t.obstacles},
                     {"crossings", t.crossings},
                     {"walkers", t.walkers},
                     {"start", t.start},
                     {"goal", vec_to_json(t.goal)}};
}

void from_json(const nlohmann::json& j, TemplateSpec& t) {
  t.name = j.at("name").get<std::string>();
  t.kind = j.at("kind").get<std::string>();
  t.group = j.at("group").get<std::string>();
  t.description = j.value("description", "");
  t.extent = vec_from_json(j.at("extent"));
  t.width_min = j.at("width").at(0).get<double>();
  t.width_max = j.at("width").at(1).get<double>();
  t.wall_thickness = j.at("wall_thickness").get<double>();
  t.scale_min = j.at("scale").at(0).get<double>();
  t.scale_max = j.at("scale").at(1).get<double>();
  t.shift_max = j.at("shift_max").get<double>();
  t.min_gap = j.at("min_gap").get<double>();
  t.speed_min = j.at("pedestrian_speed").at(0).get<double>();
  t.speed_max = j.at("pedestrian_speed").at(1).get<double>();
  t.crossing_jitter = j.at("crossing_jitter").get<double>();
  t.obstacles = j.at("obstacles").get<std::vector<ShapeSpec>>();
  t.crossings = j.at("crossings").get<std::vector<double>>();
  t.walkers = j.at("walkers").get<std::vector<WalkerSpec>>();
  t.start = j.at("start").get<Pose2>();
  t.goal = vec_from_json(j.at("goal"));
  if (t.width_min > t.width_max || t.scale_min > t.scale_max || t.speed_min > t.speed_max) {
    throw ConfigError("template " + t.name + ": range with min > max");
  }
}

void to_json(nlohmann::json& j, const Catalog& c) {
  j = nlohmann::json{{"schema", "navg.catalog/1"}, {"templates", c.templates}};
}

void from_json(const nlohmann::json& j, Catalog& c) {
  if (j.at("schema").get<std::string>() != "navg.catalog/1") throw ConfigError("unsupported catalog schema");
  c.templates = j.at("templates").get<std::vector<TemplateSpec>>();
}

}  // namespace navg
