// navg: guidance extraction, batch simulation, the episode service and log evaluation.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or parse error.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "navg/batch.hpp"
#include "navg/guidance.hpp"
#include "navg/json_io.hpp"
#include "navg/map_io.hpp"
#include "navg/server.hpp"

namespace {

using navg::Json;

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

// Usage errors found after CLI11 has parsed the flags.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

navg::Pose2 parse_pose(const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  std::vector<double> v;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("--pose expects x,y,theta, got '" + text + "'");
    }
  }
  if (v.size() != 3) throw UsageError("--pose expects x,y,theta, got '" + text + "'");
  return {navg::Vec2(v[0], v[1]), v[2]};
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const auto s = std::stoull(text);
      return {s, s};
    }
    return {std::stoull(text.substr(0, dots)), std::stoull(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw UsageError("--seeds expects a..b, got '" + text + "'");
  }
}

std::vector<std::string> parse_templates(const std::vector<std::string>& args, const navg::Catalog& catalog) {
  std::vector<std::string> out;
  for (const std::string& arg : args) {
    std::stringstream ss(arg);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name == "all") {
        for (const auto& t : catalog.templates) out.push_back(t.name);
      } else if (!name.empty()) {
        out.push_back(name);
      }
    }
  }
  if (out.empty()) throw UsageError("--template names no template");
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

Json metrics_json(const std::vector<navg::MetricsRow>& rows) {
  Json out = Json::array();
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  for (const auto& r : rows) {
    out.push_back({{"group", r.group},
                   {"template", r.template_name},
                   {"episodes", r.metrics.episodes},
                   {"successes", r.metrics.successes},
                   {"success", opt(r.metrics.success)},
                   {"time_success", opt(r.metrics.time_success)},
                   {"stl", opt(r.metrics.stl)},
                   {"behind", opt(r.metrics.behind)},
                   {"pass_events", r.metrics.pass_events}});
  }
  return out;
}

void write_reports(const std::filesystem::path& dir, const std::vector<navg::EpisodeRecord>& records,
                   const std::vector<navg::MetricsRow>& rows) {
  write_file(dir / "metrics.csv", navg::format_metrics_csv(rows));
  write_file(dir / "metrics.json", metrics_json(rows).dump(2) + "\n");
  write_file(dir / "episodes.csv", navg::format_episodes_csv(records));
}

navg::SimConfig load_sim_config(const std::string& path) {
  navg::SimConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  try {
    cfg = Json::parse(in).get<navg::SimConfig>();
  } catch (const Json::exception& e) {
    throw navg::ConfigError("invalid config " + path + ": " + e.what());
  }
  return cfg;
}

// --- extract ---------------------------------------------------------------

struct ExtractArgs {
  std::string map, pose = "0,0,0", out, render, polar;
  int n = 72;
  double dmax = 10.0;
  double resolution = 0.1;
};

int cmd_extract(const ExtractArgs& a) {
  const navg::Pose2 pose = parse_pose(a.pose);
  navg::OccupancyGrid grid = [&] {
    try {
      return navg::load_map(a.map, a.resolution);
    } catch (const navg::MapParseError& e) {
      throw UsageError(a.map + ": " + e.what());
    }
  }();
  const auto points = navg::extract_guidance(grid, pose);
  const std::string text = Json(points).dump(2) + "\n";
  if (a.out.empty() || a.out == "-") {
    std::cout << text;
  } else {
    write_file(a.out, text);
  }
  if (!a.polar.empty()) {
    const navg::PolarVector v = navg::encode_guidance(points, pose, a.n, a.dmax);
    write_file(a.polar, Json(std::vector<double>(v.begin(), v.end())).dump() + "\n");
  }
  if (!a.render.empty()) {
    std::ostringstream ppm;
    navg::write_overlay_ppm(ppm, grid, points, pose);
    write_file(a.render, ppm.str());
  }
  return kOk;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::vector<std::string> templates;
  std::string seeds, policy = "baseline", detect = "truth", out, log_dir, catalog, config;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

int cmd_simulate(const SimulateArgs& a) {
  navg::BatchOptions opt;
  opt.catalog = a.catalog.empty() ? navg::default_catalog() : navg::load_catalog(a.catalog);
  opt.templates = parse_templates(a.templates, opt.catalog);
  std::tie(opt.first_seed, opt.last_seed) = parse_seed_range(a.seeds);
  if (opt.last_seed < opt.first_seed) throw UsageError("--seeds range is empty");
  opt.batch_seed = *a.seed;
  opt.policy = a.policy;
  opt.sim = load_sim_config(a.config);
  opt.sim.detection = navg::DetectionModel::parse(a.detect);
  opt.jobs = a.jobs;
  const std::filesystem::path out = a.out;
  opt.log_dir = a.log_dir.empty() ? out / "logs" : std::filesystem::path(a.log_dir);

  const auto records = navg::run_batch(opt);
  const auto rows = navg::metrics_rows(records, opt.sim.reward.timeout);
  write_reports(out, records, rows);
  std::size_t crashed = 0;
  for (const auto& r : records) {
    if (r.result.status == navg::EpisodeStatus::kError) {
      ++crashed;
      std::cerr << "episode " << r.template_name << "/" << r.seed << " failed: " << r.reason << "\n";
    }
  }
  std::cout << navg::format_table(rows);
  std::cout << "\n" << records.size() << " episodes, " << crashed << " crashed; logs in " << opt.log_dir->string()
            << ", tables in " << out.string() << "\n";
  return kOk;
}

// --- serve -----------------------------------------------------------------

struct ServeArgs {
  std::string bind = env_or("NAVG_BIND", "127.0.0.1");
  int port = 7070;
  int ws_port = 7071;
  std::string log_dir = env_or("NAVG_LOG_DIR", "logs");
  std::string catalog = env_or("NAVG_CATALOG", "");
  std::string config;
  std::string detect = "truth";
};

int cmd_serve(const ServeArgs& a) {
  auto cfg = std::make_shared<navg::ServiceConfig>();
  cfg->sim = load_sim_config(a.config);
  cfg->sim.detection = navg::DetectionModel::parse(a.detect);
  cfg->sim.validate();
  if (!a.catalog.empty()) cfg->catalog = navg::load_catalog(a.catalog);
  cfg->log_dir = a.log_dir;

  // block before any thread starts so only sigwait sees the signals
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  navg::Server server(cfg, a.bind, static_cast<std::uint16_t>(a.port), static_cast<std::uint16_t>(a.ws_port));
  server.start();
  std::cout << "navg serve ready protocol=" << navg::kProtocolVersion << " tcp=" << a.bind << ":" << server.tcp_port()
            << " ws=" << a.bind << ":" << server.ws_port() << " log_dir=" << cfg->log_dir.string() << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  std::cout << "navg serve stopped" << std::endl;
  return kOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string logs, out;
};

int cmd_eval(const EvalArgs& a) {
  if (!std::filesystem::is_directory(a.logs)) throw std::runtime_error("not a directory: " + a.logs);
  const navg::EvalReport report = navg::evaluate_logs(a.logs);
  for (const auto& f : report.unreadable) std::cerr << "warning: unreadable log " << f << "\n";
  if (report.skipped_lines > 0) std::cerr << "warning: " << report.skipped_lines << " corrupt lines skipped\n";
  if (report.incomplete > 0) std::cerr << "warning: " << report.incomplete << " unfinished episodes ignored\n";
  if (report.records.empty()) {
    std::cerr << "error: no episodes in " << a.logs << "\n";
    return kRuntime;
  }
  const auto rows = navg::metrics_rows(report.records, report.t_max);
  if (!a.out.empty()) write_reports(a.out, report.records, rows);
  std::cout << navg::format_table(rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"navg: guidance-point navigation toolkit"};
  app.require_subcommand(1);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Guidance points of a map at a pose");
  extract->add_option("--map", ex.map, "Grid-text or PGM map")->required();
  extract->add_option("--pose", ex.pose, "Robot pose x,y,theta (world frame)");
  extract->add_option("--n", ex.n, "Bins of the polar encoding")->check(CLI::PositiveNumber);
  extract->add_option("--dmax", ex.dmax, "Range of the polar encoding, m")->check(CLI::PositiveNumber);
  extract->add_option("--resolution", ex.resolution, "Cell size for PGM maps, m")->check(CLI::PositiveNumber);
  extract->add_option("--out", ex.out, "Guidance JSON (default stdout)");
  extract->add_option("--polar", ex.polar, "Also write the encoded guidance vector");
  extract->add_option("--render", ex.render, "Overlay image (PPM)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Batch episodes and metrics tables");
  simulate->add_option("--template", sim.templates, "Templates, comma separated, or 'all'")->required();
  simulate->add_option("--seeds", sim.seeds, "Scenario seeds a..b (inclusive)")->required();
  simulate->add_option("--seed", sim.seed, "Seed of the detector noise")->required();
  simulate->add_option("--policy", sim.policy, "Policy (baseline)");
  simulate->add_option("--detect", sim.detect, "Detection model")->check(CLI::IsMember({"truth", "gaussian", "degraded"}));
  simulate->add_option("--out", sim.out, "Directory for metrics.csv, metrics.json, episodes.csv")->required();
  simulate->add_option("--log-dir", sim.log_dir, "Episode logs (default <out>/logs)");
  simulate->add_option("--jobs", sim.jobs, "Parallel episodes")->check(CLI::PositiveNumber);
  simulate->add_option("--catalog", sim.catalog, "Scenario catalog JSON");
  simulate->add_option("--config", sim.config, "Simulator config JSON");

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Episode service (line JSON over TCP, websocket mirror)");
  serve->add_option("--bind", sv.bind, "Bind address (env NAVG_BIND)");
  serve->add_option("--port", sv.port, "TCP port, 0 picks one")->check(CLI::Range(0, 65535));
  serve->add_option("--ws-port", sv.ws_port, "Websocket port, 0 picks one")->check(CLI::Range(0, 65535));
  serve->add_option("--log-dir", sv.log_dir, "Recorded episodes (env NAVG_LOG_DIR)");
  serve->add_option("--catalog", sv.catalog, "Scenario catalog JSON (env NAVG_CATALOG)");
  serve->add_option("--config", sv.config, "Simulator config JSON");
  serve->add_option("--detect", sv.detect, "Detection model")->check(CLI::IsMember({"truth", "gaussian", "degraded"}));

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Metrics recomputed from episode logs");
  eval->add_option("logs", ev.logs, "Directory of *.jsonl logs")->required();
  eval->add_option("--out", ev.out, "Also write metrics.csv, metrics.json, episodes.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*extract) return cmd_extract(ex);
    if (*simulate) return cmd_simulate(sim);
    if (*serve) return cmd_serve(sv);
    if (*eval) return cmd_eval(ev);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const navg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
