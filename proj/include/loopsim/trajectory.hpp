#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "loopsim/entity.hpp"

namespace loopsim {

struct TickRecord {
  long t = 0;
  EntityId entity;
  EntityState x;  // state at the start of tick t
  Vec u;          // input consumed at tick t
  Vec y;          // output emitted at tick t
};

// Per-tick, per-entity log of (x, u, y) plus the states bracketing the run.
// Records are appended in (t, recommender, users...) order and never mutated.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<std::pair<EntityId, EntityState>> initial, long horizon)
      : initial_(std::move(initial)), horizon_(horizon) {}

  long horizon() const { return horizon_; }
  const std::vector<TickRecord>& records() const { return records_; }
  const std::vector<std::pair<EntityId, EntityState>>& initial_states() const { return initial_; }
  const std::vector<std::pair<EntityId, EntityState>>& final_states() const { return final_; }

  std::vector<EntityId> entities() const;
  std::vector<EntityId> entities(EntityKind kind) const;

  void append(TickRecord rec) { records_.push_back(std::move(rec)); }
  void set_final(std::vector<std::pair<EntityId, EntityState>> finals) { final_ = std::move(finals); }

  const EntityState& initial_state(EntityId e) const;
  // present only for trajectories produced in-process (not JSONL round trips)
  const EntityState* final_state(EntityId e) const;
  const TickRecord* record(long t, EntityId e) const;

  // x_0 .. x_{T-1} from records, plus x_T when final states are known
  std::vector<Vec> state_series(EntityId e) const;
  std::vector<Vec> input_series(EntityId e) const;
  std::vector<Vec> output_series(EntityId e) const;

  // One line per record: {"t":..,"entity":"kind:index","x":[..],"u":[..],"y":[..]}
  // in exactly that key order, LF endings.
  void write_jsonl(std::ostream& out) const;
  static Trajectory read_jsonl(std::istream& in);

 private:
  std::vector<std::pair<EntityId, EntityState>> initial_;
  std::vector<std::pair<EntityId, EntityState>> final_;
  std::vector<TickRecord> records_;
  long horizon_ = 0;
};

// Earliest tick t with max_{s in [t, t+window)} ||x_s - x_t||_inf <= tol over
// the entity's state series, or nullopt. Requires tol > 0 and
// 1 <= window <= series length.
std::optional<long> detect_fixed_point(const Trajectory& traj, EntityId entity, double tol,
                                       long window);

}  // namespace loopsim
