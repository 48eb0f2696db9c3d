#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "navg/episode.hpp"
#include "navg/scenario.hpp"

namespace navg {

struct BatchOptions {
  std::vector<std::string> templates;
  std::uint64_t first_seed = 0;
  std::uint64_t last_seed = 0;  // inclusive
  std::uint64_t batch_seed = 0;  // detector noise
  std::string policy = "baseline";
  SimConfig sim;
  Catalog catalog = default_catalog();
  int jobs = 1;
  std::optional<std::filesystem::path> log_dir;  // one <template>_<seed>.jsonl per episode
};

struct EpisodeRecord {
  std::string template_name;
  std::uint64_t seed = 0;
  EpisodeResult result;  // trajectory dropped once pass events are known
  std::size_t steps = 0;
  std::string reason;  // set for crashed episodes
  std::optional<std::filesystem::path> log;
};

/// Runs every (template, seed) pair; a crash becomes a failed record and the
/// batch continues. Records come back ordered by (template, seed) whatever
/// the job count. Throws ConfigError for an unknown policy or template.
std::vector<EpisodeRecord> run_batch(const BatchOptions& options);

struct EvalReport {
  std::vector<EpisodeRecord> records;  // ordered by (template, seed)
  std::size_t skipped_lines = 0;        // corrupt lines inside readable logs
  std::vector<std::string> unreadable;  // files without a usable header
  std::size_t incomplete = 0;           // logs that stop mid-episode (not counted)
  double t_max = 0.0;                   // largest episode timeout seen
};

/// Rebuilds the records from the *.jsonl files of a directory.
EvalReport evaluate_logs(const std::filesystem::path& dir);

/// Scenario group of a template: "Static" (a, b, c, g), "Dynamic" (d, e, f, h) or "Other".
std::string template_group(const std::string& name);

struct MetricsRow {
  std::string group;
  std::string template_name;  // "all" for the group total
  Metrics metrics;
};

/// Per-template rows followed by one total row per group, groups in the order Static, Dynamic, Other.
std::vector<MetricsRow> metrics_rows(const std::vector<EpisodeRecord>& records, double t_max);

std::string format_table(const std::vector<MetricsRow>& rows);
std::string format_metrics_csv(const std::vector<MetricsRow>& rows);
std::string format_episodes_csv(const std::vector<EpisodeRecord>& records);

}  // namespace navg
