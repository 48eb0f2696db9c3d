#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "navg/episode.hpp"

namespace navg {

inline constexpr const char* kEpisodeSchema = "navg.episode/1";

struct RecordOptions {
  std::string source = "policy";  // policy | human
  std::string policy = "baseline";
  bool include_obs = false;  // header and step lines carry the observation frame
};

/// Builds a JSON Lines episode log in memory: one header line, one line per
/// step, one summary line. Demo and policy logs differ only in `source`.
class EpisodeRecorder {
 public:
  EpisodeRecorder(const Episode& episode, RecordOptions options);

  void record_step(const Episode& episode, const Action& commanded, const StepOutcome& outcome);
  /// Appends the summary line; status stays "running" when the episode is unfinished.
  void finish(const Episode& episode);
  /// Marks the episode as crashed; it then counts as a failure.
  void fail(const std::string& reason);

  std::size_t steps() const { return steps_; }
  bool finished() const { return finished_; }
  const std::string& text() const { return text_; }

 private:
  void append(const nlohmann::json& line);

  RecordOptions options_;
  std::string text_;
  std::size_t steps_ = 0;
  double return_ = 0.0;
  bool finished_ = false;
};

/// Writes to a temporary sibling and renames it into place. Throws
/// std::runtime_error naming the path on failure.
void write_atomic(const std::filesystem::path& path, const std::string& text);

struct LoadedEpisode {
  nlohmann::json header;
  SimConfig config;
  WorldState initial;
  std::uint64_t detection_seed = 0;
  std::vector<Action> actions;       // commanded actions, in order
  std::vector<RobotState> robots;    // logged robot state after each step
  EpisodeResult result;
  bool complete = false;             // ended in a terminal status
  std::size_t skipped_lines = 0;     // corrupt lines ignored
};

/// Log of an episode that crashed before it could start (e.g. the scenario
/// could not be generated); it counts as a failure.
std::string failed_start_log(const std::string& template_name, std::uint64_t seed, const std::string& policy,
                             double timeout, const std::string& reason);

/// Rebuilds the episode outcome from the step lines alone. Throws
/// std::runtime_error when the file cannot be read or has no usable header.
LoadedEpisode load_episode_log(const std::filesystem::path& path);

}  // namespace navg
