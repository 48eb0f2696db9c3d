#include "navg/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "navg/baseline_policy.hpp"
#include "navg/episode_log.hpp"

namespace navg {

namespace {

bool record_less(const EpisodeRecord& a, const EpisodeRecord& b) {
  return std::tie(a.template_name, a.seed) < std::tie(b.template_name, b.seed);
}

std::size_t behind_count(const EpisodeResult& r) {
  return static_cast<std::size_t>(
      std::count_if(r.pass_events.begin(), r.pass_events.end(), [](const PassEvent& e) { return e.side == PassSide::kBehind; }));
}

EpisodeRecord run_one(const BatchOptions& opt, const std::string& name, std::uint64_t seed) {
  EpisodeRecord rec;
  rec.template_name = name;
  rec.seed = seed;
  const auto log_path = opt.log_dir ? std::optional(*opt.log_dir / (name + "_" + std::to_string(seed) + ".jsonl"))
                                    : std::nullopt;
  std::optional<Episode> episode;
  try {
    episode.emplace(generate_scenario(opt.catalog, name, seed, opt.sim.dt).world, opt.sim,
                    batch_detection_seed(seed, opt.batch_seed));
  } catch (const ScenarioError& e) {
    rec.reason = e.what();
    rec.result.status = EpisodeStatus::kError;
    rec.result.elapsed = opt.sim.reward.timeout;
    if (log_path) {
      write_atomic(*log_path, failed_start_log(name, seed, opt.policy, opt.sim.reward.timeout, rec.reason));
      rec.log = log_path;
    }
    return rec;
  }

  EpisodeRecorder recorder(*episode, {"policy", opt.policy, false});
  const BaselineParams params;
  try {
    run_episode(
        *episode, [&](const ObservationFrame& o) { return baseline_act(o, params, opt.sim.limits); }, &recorder);
    rec.result = episode->result();
  } catch (const std::exception& e) {
    rec.reason = e.what();
    recorder.fail(rec.reason);
    rec.result = episode->result();
    rec.result.status = EpisodeStatus::kError;
    rec.result.elapsed = opt.sim.reward.timeout;
  }
  rec.steps = recorder.steps();
  rec.result.trajectory.clear();
  if (log_path) {
    write_atomic(*log_path, recorder.text());
    rec.log = log_path;
  }
  return rec;
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

}  // namespace

std::vector<EpisodeRecord> run_batch(const BatchOptions& opt) {
  if (opt.policy != "baseline") {
    throw ConfigError("unknown policy '" + opt.policy + "'; external policies attach through `navg serve`");
  }
  if (opt.last_seed < opt.first_seed) throw ConfigError("empty seed range");
  opt.sim.validate();
  std::vector<std::string> names = opt.templates;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  for (const std::string& n : names) opt.catalog.find(n);

  std::vector<std::pair<std::string, std::uint64_t>> jobs;
  for (const std::string& n : names) {
    for (std::uint64_t s = opt.first_seed; s <= opt.last_seed; ++s) {
      jobs.emplace_back(n, s);
      if (s == UINT64_MAX) break;
    }
  }
  std::vector<EpisodeRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) out[i] = run_one(opt, jobs[i].first, jobs[i].second);
  };
  const int threads = std::clamp(opt.jobs, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

EvalReport evaluate_logs(const std::filesystem::path& dir) {
  EvalReport report;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    LoadedEpisode log;
    try {
      log = load_episode_log(path);
    } catch (const std::exception&) {
      report.unreadable.push_back(path.string());
      continue;
    }
    report.skipped_lines += log.skipped_lines;
    if (!log.complete) {
      ++report.incomplete;
      continue;
    }
    report.t_max = std::max(report.t_max, log.config.reward.timeout);
    EpisodeRecord rec;
    rec.template_name = log.initial.template_name;
    rec.seed = log.initial.seed;
    rec.result = std::move(log.result);
    rec.result.trajectory.clear();
    rec.steps = log.actions.size();
    rec.log = path;
    report.records.push_back(std::move(rec));
  }
  std::stable_sort(report.records.begin(), report.records.end(), record_less);
  return report;
}

std::string template_group(const std::string& name) {
  if (name == "a" || name == "b" || name == "c" || name == "g") return "Static";
  if (name == "d" || name == "e" || name == "f" || name == "h") return "Dynamic";
  return "Other";
}

std::vector<MetricsRow> metrics_rows(const std::vector<EpisodeRecord>& records, double t_max) {
  std::vector<EpisodeRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), record_less);
  std::vector<MetricsRow> rows;
  for (const std::string group : {"Static", "Dynamic", "Other"}) {
    std::map<std::string, std::vector<EpisodeResult>> by_template;
    std::vector<EpisodeResult> all;
    for (const EpisodeRecord& r : sorted) {
      if (template_group(r.template_name) != group) continue;
      by_template[r.template_name].push_back(r.result);
      all.push_back(r.result);
    }
    if (all.empty()) continue;
    for (const auto& [name, results] : by_template) rows.push_back({group, name, compute_metrics(results, t_max)});
    rows.push_back({group, "all", compute_metrics(all, t_max)});
  }
  return rows;
}

std::string format_table(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::string group;
  for (const MetricsRow& r : rows) {
    if (r.group != group) {
      group = r.group;
      std::string names;
      for (const MetricsRow& q : rows) {
        if (q.group == group && q.template_name != "all") names += (names.empty() ? "" : ",") + q.template_name;
      }
      out << (out.tellp() > 0 ? "\n" : "") << group << " scenarios (" << names << ")\n";
      std::snprintf(line, sizeof line, "  %-8s %8s %9s %14s %9s %8s\n", "template", "episodes", "Success", "Time_success",
                    "STL", "Behind");
      out << line;
    }
    const Metrics& m = r.metrics;
    auto pct = [](const std::optional<double>& v) {
      char b[32];
      if (!v) return std::string("-");
      std::snprintf(b, sizeof b, "%.1f%%", 100.0 * *v);
      return std::string(b);
    };
    auto sec = [](const std::optional<double>& v) {
      char b[32];
      if (!v) return std::string("-");
      std::snprintf(b, sizeof b, "%.2f", *v);
      return std::string(b);
    };
    std::snprintf(line, sizeof line, "  %-8s %8zu %9s %14s %9s %8s\n", r.template_name.c_str(), m.episodes,
                  pct(m.success).c_str(), sec(m.time_success).c_str(), sec(m.stl).c_str(), pct(m.behind).c_str());
    out << line;
  }
  return out.str();
}

std::string format_metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << "group,template,episodes,successes,success,time_success,stl,behind,pass_events\n";
  for (const MetricsRow& r : rows) {
    const Metrics& m = r.metrics;
    out << r.group << ',' << r.template_name << ',' << m.episodes << ',' << m.successes << ',' << fmt(m.success) << ','
        << fmt(m.time_success) << ',' << fmt(m.stl) << ',' << fmt(m.behind) << ',' << m.pass_events << '\n';
  }
  return out.str();
}

std::string format_episodes_csv(const std::vector<EpisodeRecord>& records) {
  std::vector<EpisodeRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), record_less);
  std::ostringstream out;
  out << "template,seed,status,elapsed,steps,pass_events,behind\n";
  for (const EpisodeRecord& r : sorted) {
    out << r.template_name << ',' << r.seed << ',' << to_string(r.result.status) << ',' << fmt(r.result.elapsed) << ','
        << r.steps << ',' << r.result.pass_events.size() << ',' << behind_count(r.result) << '\n';
  }
  return out.str();
}

}  // namespace navg
