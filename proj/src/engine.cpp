#include "loopsim/engine.hpp"

#include <string>

namespace loopsim {

namespace {

void check_finite_state(const EntityState& st, const EntityId& id, long t) {
  if (!all_finite(st.vec))
    throw NumericError("non-finite state produced by " + id.str() + " at tick " + std::to_string(t));
}

void check_finite_output(const Vec& y, const EntityId& id, long t) {
  if (!all_finite(y))
    throw NumericError("non-finite output produced by " + id.str() + " at tick " + std::to_string(t));
}

}  // namespace

std::vector<EntityId> Scenario::entity_ids() const {
  std::vector<EntityId> ids;
  ids.push_back({EntityKind::recommender, 0});
  int viewer_ix = 0, creator_ix = 0;
  for (const auto& u : users) {
    if (u.kind == EntityKind::creator)
      ids.push_back({EntityKind::creator, creator_ix++});
    else
      ids.push_back({EntityKind::viewer, viewer_ix++});
  }
  return ids;
}

EntityId Scenario::user_id(size_t i) const { return entity_ids().at(i + 1); }

void Scenario::validate() const {
  if (horizon < 0) throw ConfigError("horizon must be >= 0");
  if (users.empty()) throw ConfigError("scenario needs at least one user");
  if (routing.mode == Routing::Mode::slices && routing.slices.size() != users.size())
    throw ConfigError("routing: need one slice per user, got " +
                      std::to_string(routing.slices.size()));
  if (!initial_user_outputs.empty() && initial_user_outputs.size() != users.size())
    throw ConfigError("initial_user_outputs: need one vector per user");
  size_t rec_dim = static_cast<size_t>(recommender.output_dim());
  for (size_t i = 0; i < users.size(); ++i) {
    auto [off, len] = routing.slice_for(i, rec_dim);
    if (off + len > rec_dim)
      throw ConfigError("routing slice for user " + std::to_string(i) +
                        " exceeds recommender output dim " + std::to_string(rec_dim));
    int want = users[i].model.input_dim();
    if (want >= 0 && static_cast<size_t>(want) != len)
      throw ConfigError("routing slice length " + std::to_string(len) + " != input dim " +
                        std::to_string(want) + " of user " + std::to_string(i) + " (" +
                        users[i].model.name() + ")");
    if (!initial_user_outputs.empty() &&
        initial_user_outputs[i].size() != static_cast<size_t>(users[i].model.output_dim()))
      throw ConfigError("initial_user_outputs[" + std::to_string(i) + "] has wrong dimension");
  }
}

StepOutcome step_coupled(const Scenario& sc, const std::vector<EntityState>& states,
                         const std::vector<Vec>& prev_user_outputs, long t, const RngStream& rng) {
  const auto ids = sc.entity_ids();
  StepOutcome out;
  out.next_states.resize(states.size());

  // (1) recommender input: concatenation of previous user outputs
  Vec rec_input;
  for (const Vec& y : prev_user_outputs) rec_input.insert(rec_input.end(), y.begin(), y.end());

  // (2) recommender emits first
  {
    RngCursor w = rng.at(ids[0].code(), static_cast<uint64_t>(t));
    StepResult r = sc.recommender.step(states[0], rec_input, w);
    check_finite_output(r.output, ids[0], t);
    check_finite_state(r.next, ids[0], t);
    if (!states[0].same_tag_keys(r.next))
      throw ConfigError(sc.recommender.name() + ": model changed its tag key-set");
    out.rec_output = std::move(r.output);
    out.next_states[0] = std::move(r.next);
  }

  // (3) each user consumes its routed slice of the fresh recommendation
  out.user_outputs.resize(sc.users.size());
  size_t rec_dim = out.rec_output.size();
  for (size_t i = 0; i < sc.users.size(); ++i) {
    auto [off, len] = sc.routing.slice_for(i, rec_dim);
    if (off + len > rec_dim)
      throw ConfigError("routing slice for user " + std::to_string(i) +
                        " exceeds recommender output size");
    Vec slice(out.rec_output.begin() + off, out.rec_output.begin() + off + len);
    int want = sc.users[i].model.input_dim();
    if (want >= 0 && static_cast<size_t>(want) != len)
      throw ConfigError("routing slice length " + std::to_string(len) + " != input dim " +
                        std::to_string(want) + " of user " + std::to_string(i));
    RngCursor w = rng.at(ids[i + 1].code(), static_cast<uint64_t>(t));
    StepResult r = sc.users[i].model.step(states[i + 1], slice, w);
    check_finite_output(r.output, ids[i + 1], t);
    check_finite_state(r.next, ids[i + 1], t);
    if (!states[i + 1].same_tag_keys(r.next))
      throw ConfigError(sc.users[i].model.name() + ": model changed its tag key-set");
    out.user_outputs[i] = std::move(r.output);
    out.next_states[i + 1] = std::move(r.next);
  }
  return out;
}

Trajectory simulate(const Scenario& sc) {
  sc.validate();
  const auto ids = sc.entity_ids();
  RngStream rng(sc.seed);

  std::vector<EntityState> states;
  states.push_back(sc.recommender.init());
  for (const auto& u : sc.users) states.push_back(u.model.init());

  std::vector<std::pair<EntityId, EntityState>> initial;
  for (size_t i = 0; i < ids.size(); ++i) initial.emplace_back(ids[i], states[i]);
  Trajectory traj(std::move(initial), sc.horizon);

  std::vector<Vec> prev_outputs;
  if (!sc.initial_user_outputs.empty()) {
    prev_outputs = sc.initial_user_outputs;
  } else {
    for (const auto& u : sc.users)
      prev_outputs.emplace_back(static_cast<size_t>(u.model.output_dim()), 0.0);
  }

  for (long t = 0; t < sc.horizon; ++t) {
    Vec rec_input;
    for (const Vec& y : prev_outputs) rec_input.insert(rec_input.end(), y.begin(), y.end());

    StepOutcome step = step_coupled(sc, states, prev_outputs, t, rng);

    if (sc.record_ticks) {
      traj.append({t, ids[0], states[0], rec_input, step.rec_output});
      size_t rec_dim = step.rec_output.size();
      for (size_t i = 0; i < sc.users.size(); ++i) {
        auto [off, len] = sc.routing.slice_for(i, rec_dim);
        Vec slice(step.rec_output.begin() + off, step.rec_output.begin() + off + len);
        traj.append({t, ids[i + 1], states[i + 1], std::move(slice), step.user_outputs[i]});
      }
    }
    states = std::move(step.next_states);
    prev_outputs = std::move(step.user_outputs);
  }

  std::vector<std::pair<EntityId, EntityState>> finals;
  for (size_t i = 0; i < ids.size(); ++i) finals.emplace_back(ids[i], states[i]);
  traj.set_final(std::move(finals));
  return traj;
}

}  // namespace loopsim
