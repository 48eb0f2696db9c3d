#include "navg/episode.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "navg/episode_log.hpp"
#include "navg/json_io.hpp"

namespace navg {

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (encoder.n < 4) throw ConfigError("bin count n must be at least 4");
  if (lidar_rays < encoder.n) throw ConfigError("lidar ray count must be at least n");
  if (!(encoder.d_max > 0.0)) throw ConfigError("d_max must be positive");
  if (!(encoder.future_dt > 0.0)) throw ConfigError("future dt must be positive");
  if (!(grid_resolution > 0.0)) throw ConfigError("grid resolution must be positive");
  if (!(limits.wheelbase > 0.0)) throw ConfigError("wheelbase must be positive");
  if (!(limits.v_min <= 0.0 && limits.v_max > 0.0)) throw ConfigError("speed limits must bracket zero");
  reward.validate();
}

void to_json(nlohmann::json& j, const SimConfig& c) {
  j = nlohmann::json{
      {"dt", c.dt},
      {"lidar_rays", c.lidar_rays},
      {"grid_resolution", c.grid_resolution},
      {"encoder",
       {{"n", c.encoder.n},
        {"d_max", c.encoder.d_max},
        {"future_dt", c.encoder.future_dt},
        {"goal_norm", c.encoder.goal_norm},
        {"aggregation", c.encoder.aggregation == HumanAggregation::kMax ? "max" : "min_nonzero"},
        {"footprint", {c.encoder.footprint.length, c.encoder.footprint.width}}}},
      {"guidance",
       {{"tie_eps", c.guidance.tie_eps}, {"theta_max_deg", c.guidance.theta_max_deg}, {"lambda", c.guidance.lambda}}},
      {"reward",
       {{"w1", c.reward.w1},
        {"w2", c.reward.w2},
        {"w3", c.reward.w3},
        {"d_safe", c.reward.d_safe},
        {"d_danger", c.reward.d_danger},
        {"timeout", c.reward.timeout},
        {"goal_radius", c.reward.goal_radius}}},
      {"limits",
       {{"v_min", c.limits.v_min},
        {"v_max", c.limits.v_max},
        {"steer_max", c.limits.steer_max},
        {"accel_max", c.limits.accel_max},
        {"steer_rate_max", c.limits.steer_rate_max},
        {"wheelbase", c.limits.wheelbase},
        {"length", c.limits.length},
        {"width", c.limits.width}}},
      {"detection",
       {{"model", c.detection.name()},
        {"sigma_pos", c.detection.sigma_pos},
        {"sigma_vel", c.detection.sigma_vel},
        {"p_miss", c.detection.p_miss},
        {"p_false", c.detection.p_false},
        {"false_radius", c.detection.false_radius}}}};
}

void from_json(const nlohmann::json& j, SimConfig& c) {
  c = SimConfig{};
  c.dt = j.value("dt", c.dt);
  c.lidar_rays = j.value("lidar_rays", c.lidar_rays);
  c.grid_resolution = j.value("grid_resolution", c.grid_resolution);
  if (j.contains("encoder")) {
    const auto& e = j["encoder"];
    c.encoder.n = e.value("n", c.encoder.n);
    c.encoder.d_max = e.value("d_max", c.encoder.d_max);
    c.encoder.future_dt = e.value("future_dt", c.encoder.future_dt);
    c.encoder.goal_norm = e.value("goal_norm", c.encoder.goal_norm);
    const std::string agg = e.value("aggregation", std::string("max"));
    if (agg == "max") {
      c.encoder.aggregation = HumanAggregation::kMax;
    } else if (agg == "min_nonzero") {
      c.encoder.aggregation = HumanAggregation::kMinNonzero;
    } else {
      throw ConfigError("unknown aggregation '" + agg + "'");
    }
    if (e.contains("footprint")) {
      c.encoder.footprint = {e["footprint"].at(0).get<double>(), e["footprint"].at(1).get<double>()};
    }
  }
  if (j.contains("guidance")) {
    const auto& g = j["guidance"];
    c.guidance.tie_eps = g.value("tie_eps", c.guidance.tie_eps);
    c.guidance.theta_max_deg = g.value("theta_max_deg", c.guidance.theta_max_deg);
    c.guidance.lambda = g.value("lambda", c.guidance.lambda);
  }
  if (j.contains("reward")) {
    const auto& r = j["reward"];
    c.reward.w1 = r.value("w1", c.reward.w1);
    c.reward.w2 = r.value("w2", c.reward.w2);
    c.reward.w3 = r.value("w3", c.reward.w3);
    c.reward.d_safe = r.value("d_safe", c.reward.d_safe);
    c.reward.d_danger = r.value("d_danger", c.reward.d_danger);
    c.reward.timeout = r.value("timeout", c.reward.timeout);
    c.reward.goal_radius = r.value("goal_radius", c.reward.goal_radius);
  }
  if (j.contains("limits")) {
    const auto& l = j["limits"];
    c.limits.v_min = l.value("v_min", c.limits.v_min);
    c.limits.v_max = l.value("v_max", c.limits.v_max);
    c.limits.steer_max = l.value("steer_max", c.limits.steer_max);
    c.limits.accel_max = l.value("accel_max", c.limits.accel_max);
    c.limits.steer_rate_max = l.value("steer_rate_max", c.limits.steer_rate_max);
    c.limits.wheelbase = l.value("wheelbase", c.limits.wheelbase);
    c.limits.length = l.value("length", c.limits.length);
    c.limits.width = l.value("width", c.limits.width);
  }
  if (j.contains("detection")) {
    const auto& d = j["detection"];
    c.detection = DetectionModel::parse(d.value("model", std::string("truth")));
    c.detection.sigma_pos = d.value("sigma_pos", c.detection.sigma_pos);
    c.detection.sigma_vel = d.value("sigma_vel", c.detection.sigma_vel);
    c.detection.p_miss = d.value("p_miss", c.detection.p_miss);
    c.detection.p_false = d.value("p_false", c.detection.p_false);
    c.detection.false_radius = d.value("false_radius", c.detection.false_radius);
  }
  c.validate();
}

std::string config_hash(const SimConfig& c) {
  const std::string text = nlohmann::json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

SimConfig checked(SimConfig c) {
  c.validate();
  return c;
}

}  // namespace

Episode::Episode(WorldState world, SimConfig config, std::optional<std::uint64_t> detection_seed)
    : config_(checked(std::move(config))),
      world_(std::move(world)),
      grid_(rasterize(world_, config_.grid_resolution)),
      static_guidance_(compute_static_guidance(grid_, config_.guidance)),
      detection_seed_(detection_seed.value_or(batch_detection_seed(world_.seed, 0))),
      rng_(detection_seed_),
      laser_prev_(PolarVector::Zero(config_.encoder.n)) {
  world_.dt = config_.dt;
  status_ = check_termination(world_, config_.reward, config_.limits);
  sense();
  trajectory_.push_back({world_.clock(), world_.robot, world_.humans()});
}

void Episode::sense() {
  const Pose2& pose = world_.robot.pose;
  guidance_ = finalize_guidance(static_guidance_, grid_, pose, config_.guidance);
  laser_ = raycast_lidar(world_, pose, config_.lidar_rays, config_.encoder.d_max);
  detections_ = detect_humans(world_, pose, config_.detection, config_.encoder.d_max, rng_);
  ObservationInputs in;
  in.pose = pose;
  in.goal = world_.goal;
  in.guidance = guidance_;
  in.laser = laser_;
  in.humans = detections_;
  in.laser_prev = laser_prev_;
  in.action_history = history_;
  obs_ = assemble_observation(in, config_.encoder, config_.limits);
}

double Episode::elapsed() const {
  return status_ == EpisodeStatus::kTimeout ? config_.reward.timeout : world_.clock();
}

StepOutcome Episode::step(const Action& action) {
  if (done()) throw std::logic_error("episode already finished with status " + to_string(status_));
  if (!std::isfinite(action.speed) || !std::isfinite(action.steer)) {
    throw std::invalid_argument("action values must be finite");
  }
  StepOutcome out;
  StepInfo info;
  const RobotState prev = world_.robot;
  world_.robot = step_robot(prev, action, config_.dt, config_.limits, &info);
  step_pedestrians(world_.pedestrians, config_.dt);
  ++world_.steps;

  const double clearance = robot_clearance(world_, config_.limits);
  status_ = check_termination(world_, config_.reward, config_.limits);
  out.reward = compute_reward(prev, world_.robot, world_.goal, clearance, status_, config_.reward);
  total_reward_ += out.reward.total;

  history_ = {history_[1], history_[2], Action{world_.robot.speed, world_.robot.steer}};
  laser_prev_ = obs_.laser_now;
  sense();
  trajectory_.push_back({world_.clock(), world_.robot, world_.humans()});

  out.obs = obs_;
  out.status = status_;
  out.clamped = info.clamped;
  return out;
}

EpisodeResult Episode::result() const {
  EpisodeResult r;
  r.status = status_;
  r.elapsed = elapsed();
  r.trajectory = trajectory_;
  r.pass_events = detect_pass_events(trajectory_);
  return r;
}

std::uint64_t batch_detection_seed(std::uint64_t world_seed, std::uint64_t batch_seed) {
  return (world_seed ^ 0xD1B54A32D192ED03ULL) + batch_seed * 0x9E3779B97F4A7C15ULL;
}

EpisodeResult run_episode(Episode& episode, const PolicyFn& policy, EpisodeRecorder* recorder) {
  while (!episode.done()) {
    const Action a = policy(episode.observation());
    const StepOutcome out = episode.step(a);
    if (recorder) recorder->record_step(episode, a, out);
  }
  if (recorder) recorder->finish(episode);
  return episode.result();
}

}  // namespace navg
