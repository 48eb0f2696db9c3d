#include "navg/envservice.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "navg/json_io.hpp"

namespace navg {

namespace {

// Failure of a single request; becomes an error reply.
struct RequestError {
  std::string code;
  std::string message;
  std::optional<std::string> path;
};

[[noreturn]] void reject(std::string code, std::string message) {
  throw RequestError{std::move(code), std::move(message), std::nullopt};
}

Json error_reply(const Json& seq, const RequestError& e) {
  Json r{{"kind", "error"}, {"seq", seq}, {"code", e.code}, {"message", e.message}};
  if (e.path) r["path"] = *e.path;
  return r;
}

double number_field(const Json& obj, const char* key) {
  if (!obj.contains(key)) reject("bad_action", std::string("action needs a numeric '") + key + "'");
  const Json& v = obj.at(key);
  if (!v.is_number()) reject("bad_action", std::string("action field '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) reject("bad_action", std::string("action field '") + key + "' must be finite");
  return d;
}

}  // namespace

Session::Session(std::shared_ptr<const ServiceConfig> config, std::string id)
    : config_(std::move(config)), id_(std::move(id)) {}

Session::~Session() {
  try {
    close();
  } catch (...) {
    // nothing sensible to report from a destructor
  }
}

std::string Session::handle_line(const std::string& line) {
  Json request;
  try {
    request = Json::parse(line);
  } catch (const Json::parse_error& e) {
    Json r = error_reply(nullptr, {"bad_json", std::string("request is not valid JSON: ") + e.what(), std::nullopt});
    r["session"] = id_;
    return r.dump();
  }
  return handle(request).dump();
}

Json Session::handle(const Json& request) {
  Json seq = nullptr;
  try {
    if (!request.is_object()) reject("bad_request", "request must be a JSON object");
    if (request.contains("seq")) {
      seq = request["seq"];
      if (!seq.is_number_integer()) reject("bad_sequence", "seq must be an integer");
      if (seq.get<std::int64_t>() <= last_seq_) {
        reject("bad_sequence", "seq " + seq.dump() + " is not above the previous " + std::to_string(last_seq_));
      }
    } else {
      seq = last_seq_ + 1;
    }
    last_seq_ = seq.get<std::int64_t>();

    if (!request.contains("kind") || !request["kind"].is_string()) reject("bad_request", "request needs a string 'kind'");
    const std::string kind = request["kind"].get<std::string>();
    Json reply;
    if (kind == "reset") {
      reply = on_reset(request);
    } else if (kind == "step") {
      reply = on_step(request);
    } else if (kind == "render_state") {
      reply = on_render(request);
    } else if (kind == "set_recording") {
      reply = on_set_recording(request);
    } else {
      reject("unknown_kind", "unknown request kind '" + kind + "'");
    }
    reply["seq"] = seq;
    reply["session"] = id_;
    return reply;
  } catch (const RequestError& e) {
    Json r = error_reply(seq, e);
    r["session"] = id_;
    return r;
  } catch (const std::exception& e) {
    Json r = error_reply(seq, {"internal", e.what(), std::nullopt});
    r["session"] = id_;
    return r;
  }
}

Json Session::on_reset(const Json& req) {
  if (!req.contains("template") || !req["template"].is_string()) reject("bad_request", "reset needs a string 'template'");
  if (!req.contains("seed") || !req["seed"].is_number_integer() ||
      (!req["seed"].is_number_unsigned() && req["seed"].get<std::int64_t>() < 0)) {
    reject("bad_request", "reset needs a non-negative integer 'seed'");
  }
  const std::string name = req["template"].get<std::string>();
  const std::uint64_t seed = req["seed"].get<std::uint64_t>();
  Scenario scenario;
  try {
    scenario = generate_scenario(config_->catalog, name, seed, config_->sim.dt);
  } catch (const ConfigError& e) {
    reject("unknown_template", e.what());
  } catch (const ScenarioError& e) {
    reject("scenario", e.what());
  }

  std::optional<std::filesystem::path> flushed;
  try {
    flushed = flush_recording();
  } catch (const std::runtime_error& e) {
    throw RequestError{"storage", e.what(), config_->log_dir.string()};
  }
  episode_ = std::make_unique<Episode>(std::move(scenario.world), config_->sim);
  ++episodes_;
  return_ = 0.0;
  if (recording_) begin_recording();
  Json reply = observation_reply(nullptr);
  if (flushed) reply["flushed_log"] = flushed->string();
  return reply;
}

Json Session::on_step(const Json& req) {
  if (!episode_) reject("no_episode", "no active episode; send reset first");
  if (episode_->done()) reject("episode_done", "episode already ended with status " + to_string(episode_->status()));
  if (!req.contains("action") || !req["action"].is_object()) reject("bad_action", "step needs an 'action' object");
  const Action a{number_field(req["action"], "speed"), number_field(req["action"], "steer")};

  const StepOutcome out = episode_->step(a);
  return_ += out.reward.total;
  if (recorder_) recorder_->record_step(*episode_, a, out);
  Json reply = observation_reply(&out);
  if (episode_->done()) {
    Json summary{{"elapsed", episode_->elapsed()}, {"return", return_}, {"steps", episode_->world().steps}};
    try {
      const auto path = flush_recording();
      summary["log"] = path ? Json(path->string()) : Json(nullptr);
    } catch (const std::runtime_error& e) {
      summary["log"] = nullptr;
      summary["log_error"] = e.what();
    }
    reply["summary"] = summary;
    // keep recording across episodes; the next reset opens a new log
  }
  return reply;
}

Json Session::on_render(const Json&) {
  if (!episode_) reject("no_episode", "no active episode; send reset first");
  Json reply = render_state(*episode_);
  reply["kind"] = "render_state";
  reply["recording"] = recording_;
  return reply;
}

Json Session::on_set_recording(const Json& req) {
  if (!req.contains("enabled") || !req["enabled"].is_boolean()) reject("bad_request", "set_recording needs a boolean 'enabled'");
  const bool enable = req["enabled"].get<bool>();
  Json reply{{"kind", "set_recording"}};
  if (enable) {
    RecordOptions opts{req.value("source", std::string("human")), req.value("policy", std::string("keyboard")),
                       req.value("include_obs", true)};
    if (opts.source != "human" && opts.source != "policy") reject("bad_request", "source must be 'human' or 'policy'");
    // fail now rather than at the end of a long demonstration
    std::error_code ec;
    std::filesystem::create_directories(config_->log_dir, ec);
    const auto probe = config_->log_dir / (".probe_" + id_);
    {
      std::ofstream out(probe);
      if (ec || !out) throw RequestError{"storage", "log directory is not writable", config_->log_dir.string()};
    }
    std::filesystem::remove(probe, ec);
    const bool restart = !recording_ || opts.source != record_options_.source || opts.policy != record_options_.policy;
    record_options_ = std::move(opts);
    recording_ = true;
    if (restart && episode_ && !episode_->done() && !recorder_) begin_recording();
  } else {
    recording_ = false;
    try {
      const auto path = flush_recording();
      reply["log"] = path ? Json(path->string()) : Json(nullptr);
    } catch (const std::runtime_error& e) {
      throw RequestError{"storage", e.what(), config_->log_dir.string()};
    }
  }
  reply["recording"] = recording_;
  return reply;
}

Json Session::observation_reply(const StepOutcome* outcome) const {
  const Episode& ep = *episode_;
  Json reply{{"kind", ep.done() ? "done" : "obs"},
             {"obs", ep.observation()},
             {"done", ep.done()},
             {"status", to_string(ep.status())},
             {"step", ep.world().steps},
             {"t", ep.world().clock()},
             {"template", ep.world().template_name},
             {"world_seed", ep.world().seed}};
  if (outcome) {
    reply["reward"] = Json{{"total", outcome->reward.total},
                           {"v_parallel", outcome->reward.v_parallel},
                           {"progress", outcome->reward.progress},
                           {"steer_penalty", outcome->reward.steer_penalty},
                           {"case", to_string(outcome->reward.reward_case)},
                           {"case_value", outcome->reward.case_value},
                           {"clearance", outcome->reward.clearance}};
    reply["clamped"] = outcome->clamped;
  } else {
    reply["reward"] = nullptr;
    reply["clamped"] = false;
  }
  return reply;
}

void Session::begin_recording() { recorder_ = std::make_unique<EpisodeRecorder>(*episode_, record_options_); }

std::optional<std::filesystem::path> Session::flush_recording() {
  if (!recorder_) return std::nullopt;
  std::unique_ptr<EpisodeRecorder> rec = std::move(recorder_);
  rec->finish(*episode_);
  char name[160];
  std::snprintf(name, sizeof name, "%s_%03d_%s_%llu.jsonl", id_.c_str(), ++logs_written_,
                episode_->world().template_name.c_str(), static_cast<unsigned long long>(episode_->world().seed));
  const std::filesystem::path path = config_->log_dir / name;
  write_atomic(path, rec->text());
  last_log_ = path;
  return path;
}

void Session::close() {
  recording_ = false;
  flush_recording();
}

Json render_state(const Episode& episode) {
  const WorldState& w = episode.world();
  const Pose2& pose = w.robot.pose;
  Json lidar = Json::array();
  for (const LaserRay& r : episode.laser()) {
    const double a = pose.heading + r.angle;
    lidar.push_back({{"angle", r.angle},
                     {"range", r.range},
                     {"end", vec_to_json(pose.position + r.range * Vec2(std::cos(a), std::sin(a)))}});
  }
  const SimConfig& c = episode.config();
  return Json{{"template", w.template_name},
              {"world_seed", w.seed},
              {"step", w.steps},
              {"t", w.clock()},
              {"status", to_string(episode.status())},
              {"world", w},
              {"guidance", episode.guidance()},
              {"lidar", lidar},
              {"detections", episode.detections()},
              {"footprint", {{"length", c.limits.length}, {"width", c.limits.width}}},
              {"goal_radius", c.reward.goal_radius},
              {"limits",
               {{"v_min", c.limits.v_min}, {"v_max", c.limits.v_max}, {"steer_max", c.limits.steer_max}}},
              {"return", episode.total_reward()}};
}

}  // namespace navg
