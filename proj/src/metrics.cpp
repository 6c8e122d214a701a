#include "loopsim/metrics.hpp"

#include <cmath>
#include <map>

namespace loopsim {
namespace metrics {

std::vector<double> preference_drift(const Trajectory& traj, EntityId viewer) {
  std::vector<Vec> xs = traj.state_series(viewer);
  bool sphere = true;
  for (const Vec& x : xs)
    if (std::abs(l2_norm(x) - 1.0) > 1e-6) {
      sphere = false;
      break;
    }
  std::vector<double> out;
  out.reserve(xs.size());
  for (const Vec& x : xs)
    out.push_back(sphere ? 1.0 - dot(xs[0], x) : l2_dist(x, xs[0]));
  return out;
}

double homogenization(const Trajectory& traj, long t) {
  std::vector<Vec> states;
  for (EntityId e : traj.entities(EntityKind::viewer)) {
    std::vector<Vec> xs = traj.state_series(e);
    if (t < 0 || t >= static_cast<long>(xs.size()))
      throw ConfigError("homogenization: tick out of range");
    states.push_back(xs[static_cast<size_t>(t)]);
  }
  if (states.size() < 2) throw ConfigError("homogenization: needs >= 2 viewers");
  double sum = 0.0;
  long pairs = 0;
  for (size_t i = 0; i < states.size(); ++i)
    for (size_t j = i + 1; j < states.size(); ++j) {
      double na = l2_norm(states[i]), nb = l2_norm(states[j]);
      if (na < 1e-300 || nb < 1e-300)
        throw NumericError("homogenization: zero-norm state at tick " + std::to_string(t));
      sum += dot(states[i], states[j]) / (na * nb);
      ++pairs;
    }
  return sum / pairs;
}

double cumulative_engagement(const Trajectory& traj, EntityId entity) {
  double total = 0.0;
  for (const Vec& y : traj.output_series(entity))
    total += y.size() == 1 ? y[0] : l1_norm(y);
  return total;
}

double welfare(const Trajectory& traj, EntityId viewer) {
  double total = 0.0;
  for (const TickRecord& r : traj.records()) {
    if (!(r.entity == viewer)) continue;
    if (r.x.vec.size() != r.u.size())
      throw ConfigError("welfare: state and input dimensions differ for " + viewer.str());
    total += dot(r.x.vec, r.u);
  }
  return total;
}

double equilibrium_dispersion(const games::Profile& profile, const games::GameSpec& game) {
  if (profile.size() < 2) return 0.0;
  if (game.space.kind() == games::ActionSpace::Kind::finite) {
    std::map<int, long> hist;
    for (int a : profile) hist[a] += 1;
    double entropy = 0.0;
    for (const auto& [a, count] : hist) {
      double p = static_cast<double>(count) / profile.size();
      entropy -= p * std::log(p);
    }
    return entropy;
  }
  double sum = 0.0;
  long pairs = 0;
  for (size_t i = 0; i < profile.size(); ++i)
    for (size_t j = i + 1; j < profile.size(); ++j) {
      sum += l2_dist(game.space.at(profile[i]), game.space.at(profile[j]));
      ++pairs;
    }
  return sum / pairs;
}

namespace {

template <typename ActiveFn>
double departure_fraction(const Trajectory& traj, ActiveFn active) {
  long viewers = 0, departed = 0;
  if (!traj.final_states().empty()) {
    for (const auto& [id, st] : traj.final_states()) {
      if (id.kind != EntityKind::viewer) continue;
      ++viewers;
      if (!active(st)) ++departed;
    }
  } else {
    for (EntityId e : traj.entities(EntityKind::viewer)) {
      ++viewers;
      EntityState st;
      st.vec = traj.state_series(e).back();
      if (!active(st)) ++departed;
    }
  }
  if (viewers == 0) return 0.0;
  return static_cast<double>(departed) / static_cast<double>(viewers);
}

}  // namespace

double departure_rate(const Trajectory& traj) {
  return departure_fraction(traj, [](const EntityState& st) {
    auto it = st.tags.find("active");
    return it == st.tags.end() || it->second != 0;
  });
}

double departure_rate(const Trajectory& traj, int active_slot) {
  return departure_fraction(traj, [active_slot](const EntityState& st) {
    size_t slot = active_slot < 0 ? st.vec.size() - 1 : static_cast<size_t>(active_slot);
    if (slot >= st.vec.size()) throw ConfigError("departure_rate: active slot out of range");
    return st.vec[slot] != 0.0;
  });
}

}  // namespace metrics
}  // namespace loopsim
