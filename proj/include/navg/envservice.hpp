#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "navg/episode.hpp"
#include "navg/episode_log.hpp"
#include "navg/scenario.hpp"

namespace navg {

inline constexpr const char* kProtocolVersion = "navg.protocol/1";

struct ServiceConfig {
  SimConfig sim;
  Catalog catalog = default_catalog();
  std::filesystem::path log_dir = "logs";
};

/// One client's view of the environment: the active episode, its optional
/// recorder and the request sequence counter. Messages are handled strictly
/// one at a time; distinct sessions share nothing mutable.
class Session {
 public:
  Session(std::shared_ptr<const ServiceConfig> config, std::string id);
  ~Session();

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Parses one request line and returns exactly one reply line (no trailing newline).
  std::string handle_line(const std::string& line);
  nlohmann::json handle(const nlohmann::json& request);

  /// Flushes a pending recording. Safe to call more than once.
  void close();

  const std::string& id() const { return id_; }
  const Episode* episode() const { return episode_.get(); }
  bool recording() const { return recording_; }
  /// Path of the most recently written log, if any.
  const std::optional<std::filesystem::path>& last_log() const { return last_log_; }

 private:
  nlohmann::json on_reset(const nlohmann::json& req);
  nlohmann::json on_step(const nlohmann::json& req);
  nlohmann::json on_render(const nlohmann::json& req);
  nlohmann::json on_set_recording(const nlohmann::json& req);
  nlohmann::json observation_reply(const StepOutcome* outcome) const;
  void begin_recording();
  /// Writes the pending recording; returns the path, throws std::runtime_error on storage failure.
  std::optional<std::filesystem::path> flush_recording();

  std::shared_ptr<const ServiceConfig> config_;
  std::string id_;
  std::int64_t last_seq_ = 0;
  std::unique_ptr<Episode> episode_;
  std::unique_ptr<EpisodeRecorder> recorder_;
  bool recording_ = false;
  RecordOptions record_options_{"human", "keyboard", true};
  int episodes_ = 0;
  int logs_written_ = 0;
  double return_ = 0.0;
  std::optional<std::filesystem::path> last_log_;
};

/// World geometry, sensors and status for live display.
nlohmann::json render_state(const Episode& episode);

}  // namespace navg
