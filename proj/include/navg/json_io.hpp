#pragma once

#include <json.hpp>

#include "navg/guidance.hpp"
#include "navg/polar_encoding.hpp"
#include "navg/types.hpp"
#include "navg/world.hpp"

namespace navg {

using Json = nlohmann::json;

inline constexpr const char* kObservationSchema = "navg.observation/1";

Json vec_to_json(const Vec2& v);
Vec2 vec_from_json(const Json& j);

void to_json(Json& j, const Pose2& p);
void from_json(const Json& j, Pose2& p);
void to_json(Json& j, const Action& a);
void from_json(const Json& j, Action& a);
void to_json(Json& j, const HumanState& h);
void from_json(const Json& j, HumanState& h);
void to_json(Json& j, const GuidancePoint& g);
void to_json(Json& j, const Circle& c);
void from_json(const Json& j, Circle& c);
void to_json(Json& j, const Box& b);
void from_json(const Json& j, Box& b);
void to_json(Json& j, const RobotState& r);
void from_json(const Json& j, RobotState& r);
void to_json(Json& j, const Pedestrian& p);
void from_json(const Json& j, Pedestrian& p);

/// Full world: geometry, pedestrian scripts, robot, goal and clock.
void to_json(Json& j, const WorldState& w);
void from_json(const Json& j, WorldState& w);

/// Keys: schema, n, guidance, laser_now, laser_prev, humans (far to near),
/// human_ids, goal {distance, angle}, action_history [[v, phi] x 3].
void to_json(Json& j, const ObservationFrame& f);
/// Validates schema, vector lengths against n and value ranges; throws std::invalid_argument.
void from_json(const Json& j, ObservationFrame& f);

}  // namespace navg
