#pragma once

#include <cstdint>
#include <vector>

#include "loopsim/model.hpp"
#include "loopsim/trajectory.hpp"

namespace loopsim {

// How the recommender output is carved up per user.
struct Routing {
  enum class Mode { broadcast, slices };
  Mode mode = Mode::broadcast;
  std::vector<std::pair<size_t, size_t>> slices;  // (offset, length) per user

  std::pair<size_t, size_t> slice_for(size_t user, size_t rec_dim) const {
    if (mode == Mode::broadcast) return {0, rec_dim};
    return slices.at(user);
  }
};

struct ScenarioUser {
  InteractionModel model;
  EntityKind kind = EntityKind::viewer;
};

// Declarative binding of one recommender, its users, routing, horizon, seed.
struct Scenario {
  InteractionModel recommender;
  std::vector<ScenarioUser> users;
  Routing routing;
  long horizon = 0;
  uint64_t seed = 0;
  std::vector<Vec> initial_user_outputs;  // empty => zeros per user
  bool record_ticks = true;               // false: keep only initial/final states

  std::vector<EntityId> entity_ids() const;
  EntityId user_id(size_t i) const;
  void validate() const;
};

struct StepOutcome {
  std::vector<EntityState> next_states;  // recommender first, then users
  Vec rec_output;
  std::vector<Vec> user_outputs;
};

// One coupled tick: the recommender consumes the previous user outputs and
// emits first, then every user consumes its routed slice of that output.
StepOutcome step_coupled(const Scenario& sc, const std::vector<EntityState>& states,
                         const std::vector<Vec>& prev_user_outputs, long t, const RngStream& rng);

Trajectory simulate(const Scenario& sc);

}  // namespace loopsim
