#pragma once

#include <string>
#include <vector>

#include "loopsim/games.hpp"
#include "loopsim/trajectory.hpp"

namespace loopsim {
namespace metrics {

struct MetricReport {
  std::string name;
  std::string entity;  // "all" for population metrics
  double value = 0.0;
  std::vector<std::pair<long, double>> series;  // empty for scalars
};

// Distance of the viewer's state from its start: 1 - <x0, xt> when every
// state in the series is unit norm, ||xt - x0||_2 otherwise.
std::vector<double> preference_drift(const Trajectory& traj, EntityId viewer);

// Mean pairwise cosine similarity of viewer states at tick t.
double homogenization(const Trajectory& traj, long t);

// Sum over ticks of the entity's output (L1 mass for vector outputs).
double cumulative_engagement(const Trajectory& traj, EntityId entity);

// Sum over ticks of <x_t, u_t>: realized alignment between the viewer's
// preference and what it was shown.
double welfare(const Trajectory& traj, EntityId viewer);

// Spread of an equilibrium profile: entropy of the action histogram for
// finite spaces, mean pairwise distance between actions otherwise.
double equilibrium_dispersion(const games::Profile& profile, const games::GameSpec& game);

// Fraction of viewers inactive at the end of the run, per the "active" tag
// (entities without the tag count as active). For trajectories loaded from
// JSONL (no tags), pass the vec slot holding the active flag.
double departure_rate(const Trajectory& traj);
double departure_rate(const Trajectory& traj, int active_slot);

}  // namespace metrics
}  // namespace loopsim
