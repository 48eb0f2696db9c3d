#include "navg/metrics.hpp"

#include <algorithm>
#include <map>

namespace navg {

std::vector<PassEvent> detect_pass_events(std::span<const TrajectorySample> trajectory, double radius) {
  struct Track {
    std::vector<std::size_t> samples;  // indices into trajectory
    std::vector<const HumanState*> states;
  };
  std::map<int, Track> tracks;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    for (const HumanState& h : trajectory[i].pedestrians) {
      Track& tr = tracks[h.id];
      tr.samples.push_back(i);
      tr.states.push_back(&h);
    }
  }
  std::vector<PassEvent> out;
  for (const auto& [id, tr] : tracks) {
    const auto dist = [&](std::size_t k) {
      return (trajectory[tr.samples[k]].robot.pose.position - tr.states[k]->position).norm();
    };
    for (std::size_t k = 1; k + 1 < tr.samples.size(); ++k) {
      const double d = dist(k);
      if (d > radius || !(dist(k - 1) > d) || !(d <= dist(k + 1))) continue;
      const HumanState& h = *tr.states[k];
      if (h.velocity.squaredNorm() < 1e-18) continue;
      const Vec2 rel = trajectory[tr.samples[k]].robot.pose.position - h.position;
      out.push_back({id, rel.dot(h.velocity) < 0.0 ? PassSide::kBehind : PassSide::kFront, trajectory[tr.samples[k]].t});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const PassEvent& a, const PassEvent& b) { return a.t < b.t; });
  return out;
}

Metrics compute_metrics(std::span<const EpisodeResult> results, double t_max) {
  Metrics m;
  m.episodes = results.size();
  if (results.empty()) return m;
  double success_time = 0.0, stl = 0.0;
  std::size_t behind = 0;
  for (const EpisodeResult& r : results) {
    if (r.status == EpisodeStatus::kSuccess) {
      ++m.successes;
      success_time += r.elapsed;
      stl += r.elapsed;
    } else {
      stl += t_max;
    }
    for (const PassEvent& e : r.pass_events) {
      ++m.pass_events;
      if (e.side == PassSide::kBehind) ++behind;
    }
  }
  const double n = static_cast<double>(results.size());
  m.success = static_cast<double>(m.successes) / n;
  if (m.successes > 0) m.time_success = success_time / static_cast<double>(m.successes);
  m.stl = stl / n;
  if (m.pass_events > 0) m.behind = static_cast<double>(behind) / static_cast<double>(m.pass_events);
  return m;
}

}  // namespace navg
