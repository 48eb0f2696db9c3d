#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "navg/world.hpp"

namespace navg {

/// Seed could not be turned into a valid world; the message names the constraint.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One static obstacle. Circles use size.x as radius; boxes use size as half extents.
/// For corridors `at.x` is the station along the corridor and the lateral
/// position is drawn; for lobbies `at` is relative to the center; for mazes it is absolute.
struct ShapeSpec {
  std::string shape = "circle";
  Vec2 size = Vec2::Zero();
  Vec2 at = Vec2::Zero();
  double yaw = 0.0;
};

/// Maze pedestrian script, absolute waypoints.
struct WalkerSpec {
  Vec2 from = Vec2::Zero();
  Vec2 to = Vec2::Zero();
};

struct TemplateSpec {
  std::string name;
  std::string kind;  // corridor | lobby | maze
  std::string group; // static | dynamic
  std::string description;
  Vec2 extent = Vec2::Zero();  // corridor: (length, unused); lobby and maze: (length, width)
  double width_min = 4.0;       // corridor only
  double width_max = 6.0;
  double wall_thickness = 0.3;
  double scale_min = 0.8;
  double scale_max = 1.2;
  double shift_max = 1.0;  // lobby pillars along the long axis, maze walls along their length
  double min_gap = 1.0;    // corridor: widest side gap at every obstacle
  double speed_min = 0.3;
  double speed_max = 1.5;
  double crossing_jitter = 0.5;
  std::vector<ShapeSpec> obstacles;
  std::vector<double> crossings;     // corridor pedestrians cross at these stations
  std::vector<WalkerSpec> walkers;   // maze pedestrians
  Pose2 start;                       // maze only
  Vec2 goal = Vec2::Zero();          // maze only
};

struct Catalog {
  std::vector<TemplateSpec> templates;
  const TemplateSpec& find(const std::string& name) const;  // throws ConfigError
};

/// Built-in templates a..h (static corridors a-c, dynamic corridors d-f, lobby g, maze h).
Catalog default_catalog();
Catalog load_catalog(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const ShapeSpec& s);
void from_json(const nlohmann::json& j, ShapeSpec& s);
void to_json(nlohmann::json& j, const WalkerSpec& w);
void from_json(const nlohmann::json& j, WalkerSpec& w);
void to_json(nlohmann::json& j, const TemplateSpec& t);
void from_json(const nlohmann::json& j, TemplateSpec& t);
void to_json(nlohmann::json& j, const Catalog& c);
void from_json(const nlohmann::json& j, Catalog& c);

/// The random draws behind a generated world, kept for range checks.
struct ScenarioDraws {
  double corridor_width = 0.0;
  std::vector<double> scales;
  std::vector<double> shifts;
  std::vector<double> lateral;
  std::vector<double> pedestrian_speeds;
  int start_side = -1;  // lobby: 0 -x, 1 +x, 2 -y, 3 +y
};

struct Scenario {
  WorldState world;
  ScenarioDraws draws;
};

Scenario generate_scenario(const TemplateSpec& spec, std::uint64_t seed, double dt = 0.2);
inline Scenario generate_scenario(const Catalog& catalog, const std::string& name, std::uint64_t seed,
                                  double dt = 0.2) {
  return generate_scenario(catalog.find(name), seed, dt);
}

}  // namespace navg
