#include "navg/episode_log.hpp"

#include <fstream>
#include <stdexcept>
#include <system_error>

#include "navg/json_io.hpp"

namespace navg {

namespace {

Json reward_json(const RewardBreakdown& r) {
  return Json{{"total", r.total},
              {"v_parallel", r.v_parallel},
              {"progress", r.progress},
              {"steer_penalty", r.steer_penalty},
              {"case", to_string(r.reward_case)},
              {"case_value", r.case_value},
              {"clearance", r.clearance}};
}

Json pass_events_json(const std::vector<PassEvent>& events) {
  Json out = Json::array();
  for (const PassEvent& e : events) {
    out.push_back({{"pedestrian", e.pedestrian}, {"side", e.side == PassSide::kBehind ? "behind" : "front"}, {"t", e.t}});
  }
  return out;
}

}  // namespace

EpisodeRecorder::EpisodeRecorder(const Episode& episode, RecordOptions options) : options_(std::move(options)) {
  const WorldState& w = episode.world();
  Json header{{"kind", "header"},
              {"schema", kEpisodeSchema},
              {"source", options_.source},
              {"policy", options_.policy},
              {"template", w.template_name},
              {"seed", w.seed},
              {"detection_seed", episode.detection_seed()},
              {"dt", episode.config().dt},
              {"timeout", episode.config().reward.timeout},
              {"config_hash", config_hash(episode.config())},
              {"config", episode.config()},
              {"start_step", w.steps},
              {"world", w}};
  // the observation the first recorded action responds to
  if (options_.include_obs) header["obs"] = episode.observation();
  append(header);
}

void EpisodeRecorder::append(const Json& line) {
  text_ += line.dump();
  text_ += '\n';
}

void EpisodeRecorder::record_step(const Episode& episode, const Action& commanded, const StepOutcome& outcome) {
  const WorldState& w = episode.world();
  Json line{{"kind", "step"},
            {"step", w.steps},
            {"t", w.clock()},
            {"action", commanded},
            {"clamped", outcome.clamped},
            {"robot", w.robot},
            {"reward", reward_json(outcome.reward)},
            {"detections", episode.detections()},
            {"pedestrians", w.humans()},
            {"status", to_string(outcome.status)}};
  if (options_.include_obs) line["obs"] = outcome.obs;
  append(line);
  ++steps_;
  return_ += outcome.reward.total;
}

void EpisodeRecorder::finish(const Episode& episode) {
  if (finished_) return;
  finished_ = true;
  const EpisodeResult r = episode.result();
  append(Json{{"kind", "summary"},
              {"status", to_string(r.status)},
              {"elapsed", r.elapsed},
              {"steps", steps_},
              {"return", return_},
              {"pass_events", pass_events_json(r.pass_events)}});
}

void EpisodeRecorder::fail(const std::string& reason) {
  if (finished_) return;
  finished_ = true;
  append(Json{{"kind", "error"}, {"reason", reason}});
  append(Json{{"kind", "summary"}, {"status", "error"}, {"steps", steps_}, {"return", return_}, {"reason", reason}});
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw std::runtime_error("cannot create directory for " + path.string() + ": " + ec.message());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string failed_start_log(const std::string& template_name, std::uint64_t seed, const std::string& policy,
                             double timeout, const std::string& reason) {
  std::string text;
  for (const Json& line : {Json{{"kind", "header"},
                                {"schema", kEpisodeSchema},
                                {"source", "policy"},
                                {"policy", policy},
                                {"template", template_name},
                                {"seed", seed},
                                {"timeout", timeout}},
                           Json{{"kind", "error"}, {"reason", reason}},
                           Json{{"kind", "summary"}, {"status", "error"}, {"steps", 0}, {"return", 0.0}, {"reason", reason}}}) {
    text += line.dump();
    text += '\n';
  }
  return text;
}

LoadedEpisode load_episode_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open episode log " + path.string());
  LoadedEpisode ep;
  bool have_header = false;
  EpisodeStatus last = EpisodeStatus::kRunning;
  double last_t = 0.0;
  std::string text;
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    try {
      const Json line = Json::parse(text);
      const std::string kind = line.at("kind").get<std::string>();
      if (kind == "header") {
        if (line.at("schema").get<std::string>() != kEpisodeSchema) throw std::invalid_argument("schema");
        if (line.contains("world")) {
          ep.config = line.at("config").get<SimConfig>();
          ep.initial = line.at("world").get<WorldState>();
          ep.detection_seed = line.at("detection_seed").get<std::uint64_t>();
          ep.result.trajectory.push_back({ep.initial.clock(), ep.initial.robot, ep.initial.humans()});
          last_t = ep.initial.clock();
        } else {
          // failed before the world existed
          ep.config.reward.timeout = line.at("timeout").get<double>();
          ep.initial.template_name = line.at("template").get<std::string>();
          ep.initial.seed = line.at("seed").get<std::uint64_t>();
        }
        ep.header = line;
        have_header = true;
      } else if (kind == "step" && have_header) {
        TrajectorySample s;
        s.t = line.at("t").get<double>();
        s.robot = line.at("robot").get<RobotState>();
        s.pedestrians = line.at("pedestrians").get<std::vector<HumanState>>();
        const Action a = line.at("action").get<Action>();
        last = status_from_string(line.at("status").get<std::string>());
        ep.actions.push_back(a);
        ep.robots.push_back(s.robot);
        ep.result.trajectory.push_back(std::move(s));
        last_t = ep.result.trajectory.back().t;
      } else if (kind == "error" && have_header) {
        last = EpisodeStatus::kError;
      } else if (kind != "summary") {
        ++ep.skipped_lines;
      }
    } catch (const std::exception&) {
      ++ep.skipped_lines;
    }
  }
  if (!have_header) throw std::runtime_error("episode log " + path.string() + " has no usable header line");
  ep.result.status = last;
  ep.complete = last != EpisodeStatus::kRunning;
  ep.result.elapsed = last == EpisodeStatus::kTimeout || last == EpisodeStatus::kError ? ep.config.reward.timeout : last_t;
  ep.result.pass_events = detect_pass_events(ep.result.trajectory);
  return ep;
}

}  // namespace navg
