#include "navg/json_io.hpp"

#include <stdexcept>
#include <string>

namespace navg {

namespace {

Json polar_to_json(const PolarVector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

PolarVector polar_from_json(const Json& j, int n, const char* field) {
  const auto values = j.get<std::vector<double>>();
  if (static_cast<int>(values.size()) != n) {
    throw std::invalid_argument(std::string(field) + " has " + std::to_string(values.size()) +
                                " bins, expected " + std::to_string(n));
  }
  PolarVector out(n);
  for (int k = 0; k < n; ++k) {
    if (!(values[k] >= 0.0 && values[k] <= 1.0)) {
      throw std::invalid_argument(std::string(field) + "[" + std::to_string(k) + "] outside [0, 1]");
    }
    out[k] = values[k];
  }
  return out;
}

}  // namespace

Json vec_to_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

Vec2 vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

void to_json(Json& j, const Pose2& p) { j = Json{{"position", vec_to_json(p.position)}, {"heading", p.heading}}; }

void from_json(const Json& j, Pose2& p) {
  p.position = vec_from_json(j.at("position"));
  p.heading = j.at("heading").get<double>();
}

void to_json(Json& j, const Action& a) { j = Json{{"speed", a.speed}, {"steer", a.steer}}; }

void from_json(const Json& j, Action& a) {
  a.speed = j.at("speed").get<double>();
  a.steer = j.at("steer").get<double>();
}

void to_json(Json& j, const HumanState& h) {
  j = Json{{"id", h.id}, {"position", vec_to_json(h.position)}, {"velocity", vec_to_json(h.velocity)},
           {"radius", h.radius}};
}

void from_json(const Json& j, HumanState& h) {
  h.id = j.at("id").get<int>();
  h.position = vec_from_json(j.at("position"));
  h.velocity = vec_from_json(j.at("velocity"));
  h.radius = j.at("radius").get<double>();
}

void to_json(Json& j, const GuidancePoint& g) {
  j = Json{{"x", g.position.x()},
           {"y", g.position.y()},
           {"group_i", g.group_i},
           {"group_j", g.group_j},
           {"gap_width", g.gap_width}};
}

void to_json(Json& j, const Circle& c) { j = Json{{"center", vec_to_json(c.center)}, {"radius", c.radius}}; }

void from_json(const Json& j, Circle& c) {
  c.center = vec_from_json(j.at("center"));
  c.radius = j.at("radius").get<double>();
}

void to_json(Json& j, const Box& b) {
  j = Json{{"center", vec_to_json(b.center)}, {"half_extents", vec_to_json(b.half_extents)}, {"yaw", b.yaw}};
}

void from_json(const Json& j, Box& b) {
  b.center = vec_from_json(j.at("center"));
  b.half_extents = vec_from_json(j.at("half_extents"));
  b.yaw = j.at("yaw").get<double>();
}

void to_json(Json& j, const RobotState& r) {
  j = Json{{"position", vec_to_json(r.pose.position)}, {"heading", r.pose.heading}, {"speed", r.speed},
           {"steer", r.steer}};
}

void from_json(const Json& j, RobotState& r) {
  r.pose.position = vec_from_json(j.at("position"));
  r.pose.heading = j.at("heading").get<double>();
  r.speed = j.at("speed").get<double>();
  r.steer = j.at("steer").get<double>();
}

void to_json(Json& j, const Pedestrian& p) {
  j = Json{{"id", p.id},
           {"radius", p.radius},
           {"from", vec_to_json(p.from)},
           {"to", vec_to_json(p.to)},
           {"speed", p.speed},
           {"progress", p.progress},
           {"direction", p.direction}};
}

void from_json(const Json& j, Pedestrian& p) {
  p.id = j.at("id").get<int>();
  p.radius = j.at("radius").get<double>();
  p.from = vec_from_json(j.at("from"));
  p.to = vec_from_json(j.at("to"));
  p.speed = j.at("speed").get<double>();
  p.progress = j.at("progress").get<double>();
  p.direction = j.at("direction").get<int>();
}

void to_json(Json& j, const WorldState& w) {
  j = Json{{"template", w.template_name},
           {"seed", w.seed},
           {"bounds", {vec_to_json(w.bounds_min), vec_to_json(w.bounds_max)}},
           {"circles", w.circles},
           {"boxes", w.boxes},
           {"pedestrians", w.pedestrians},
           {"robot", w.robot},
           {"goal", vec_to_json(w.goal)},
           {"steps", w.steps},
           {"dt", w.dt}};
}

void from_json(const Json& j, WorldState& w) {
  w.template_name = j.at("template").get<std::string>();
  w.seed = j.at("seed").get<std::uint64_t>();
  w.bounds_min = vec_from_json(j.at("bounds").at(0));
  w.bounds_max = vec_from_json(j.at("bounds").at(1));
  w.circles = j.at("circles").get<std::vector<Circle>>();
  w.boxes = j.at("boxes").get<std::vector<Box>>();
  w.pedestrians = j.at("pedestrians").get<std::vector<Pedestrian>>();
  w.robot = j.at("robot").get<RobotState>();
  w.goal = vec_from_json(j.at("goal"));
  w.steps = j.at("steps").get<long>();
  w.dt = j.at("dt").get<double>();
}

void to_json(Json& j, const ObservationFrame& f) {
  Json humans = Json::array();
  for (const PolarVector& h : f.humans) humans.push_back(polar_to_json(h));
  Json history = Json::array();
  for (const Eigen::Vector2d& a : f.action_history) history.push_back({a.x(), a.y()});
  j = Json{{"schema", kObservationSchema},
           {"n", f.n},
           {"guidance", polar_to_json(f.guidance)},
           {"laser_now", polar_to_json(f.laser_now)},
           {"laser_prev", polar_to_json(f.laser_prev)},
           {"humans", std::move(humans)},
           {"human_ids", f.human_ids},
           {"goal", {{"distance", f.goal.distance}, {"angle", f.goal.angle}}},
           {"action_history", std::move(history)}};
}

void from_json(const Json& j, ObservationFrame& f) {
  if (j.at("schema").get<std::string>() != kObservationSchema) {
    throw std::invalid_argument("unsupported observation schema " + j.at("schema").dump());
  }
  f.n = j.at("n").get<int>();
  if (f.n < 1) throw std::invalid_argument("n must be positive");
  f.guidance = polar_from_json(j.at("guidance"), f.n, "guidance");
  f.laser_now = polar_from_json(j.at("laser_now"), f.n, "laser_now");
  f.laser_prev = polar_from_json(j.at("laser_prev"), f.n, "laser_prev");
  f.humans.clear();
  for (const Json& h : j.at("humans")) f.humans.push_back(polar_from_json(h, f.n, "humans"));
  f.human_ids = j.at("human_ids").get<std::vector<int>>();
  const bool absent = f.human_ids.empty() && f.humans.size() == 1 && f.humans[0].isZero(0.0);
  if (f.human_ids.size() != f.humans.size() && !absent) {
    throw std::invalid_argument("human_ids and humans differ in length");
  }
  f.goal.distance = j.at("goal").at("distance").get<double>();
  f.goal.angle = j.at("goal").at("angle").get<double>();
  const Json& history = j.at("action_history");
  if (!history.is_array() || history.size() != 3) throw std::invalid_argument("action_history needs 3 entries");
  for (std::size_t i = 0; i < 3; ++i) f.action_history[i] = vec_from_json(history[i]);
}

}  // namespace navg
