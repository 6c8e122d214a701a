#include "loopsim/trajectory.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <ostream>

namespace loopsim {

std::vector<EntityId> Trajectory::entities() const {
  std::vector<EntityId> out;
  for (const auto& [id, st] : initial_) out.push_back(id);
  return out;
}

std::vector<EntityId> Trajectory::entities(EntityKind kind) const {
  std::vector<EntityId> out;
  for (const auto& [id, st] : initial_)
    if (id.kind == kind) out.push_back(id);
  return out;
}

const EntityState& Trajectory::initial_state(EntityId e) const {
  for (const auto& [id, st] : initial_)
    if (id == e) return st;
  throw ConfigError("unknown entity: " + e.str());
}

const EntityState* Trajectory::final_state(EntityId e) const {
  for (const auto& [id, st] : final_)
    if (id == e) return &st;
  return nullptr;
}

const TickRecord* Trajectory::record(long t, EntityId e) const {
  // records are (t, entity-order) sorted; entities() gives the per-tick stride
  size_t stride = initial_.size();
  if (stride == 0 || t < 0 || t >= horizon_) return nullptr;
  size_t base = static_cast<size_t>(t) * stride;
  for (size_t i = base; i < std::min(base + stride, records_.size()); ++i)
    if (records_[i].entity == e) return &records_[i];
  return nullptr;
}

std::vector<Vec> Trajectory::state_series(EntityId e) const {
  std::vector<Vec> out;
  bool seen = false;
  for (const auto& r : records_)
    if (r.entity == e) {
      out.push_back(r.x.vec);
      seen = true;
    }
  if (const EntityState* fin = final_state(e)) {
    out.push_back(fin->vec);
    seen = true;
  }
  if (!seen) throw ConfigError("unknown entity: " + e.str());
  return out;
}

std::vector<Vec> Trajectory::input_series(EntityId e) const {
  std::vector<Vec> out;
  for (const auto& r : records_)
    if (r.entity == e) out.push_back(r.u);
  return out;
}

std::vector<Vec> Trajectory::output_series(EntityId e) const {
  std::vector<Vec> out;
  for (const auto& r : records_)
    if (r.entity == e) out.push_back(r.y);
  return out;
}

void Trajectory::write_jsonl(std::ostream& out) const {
  for (const auto& r : records_) {
    nlohmann::ordered_json line;
    line["t"] = r.t;
    line["entity"] = r.entity.str();
    line["x"] = r.x.vec;
    line["u"] = r.u;
    line["y"] = r.y;
    out << line.dump() << "\n";
  }
}

Trajectory Trajectory::read_jsonl(std::istream& in) {
  std::vector<TickRecord> records;
  std::string line;
  long max_t = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad trajectory line: ") + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::string k = it.key();
      if (k != "t" && k != "entity" && k != "x" && k != "u" && k != "y")
        throw ConfigError("unknown trajectory field: " + k);
    }
    TickRecord r;
    r.t = j.at("t").get<long>();
    r.entity = EntityId::parse(j.at("entity").get<std::string>());
    r.x.vec = j.at("x").get<Vec>();
    r.u = j.at("u").get<Vec>();
    r.y = j.at("y").get<Vec>();
    max_t = std::max(max_t, r.t);
    records.push_back(std::move(r));
  }
  std::vector<std::pair<EntityId, EntityState>> initial;
  for (const auto& r : records) {
    if (r.t != 0) continue;
    initial.emplace_back(r.entity, r.x);
  }
  Trajectory traj(std::move(initial), max_t + 1);
  for (auto& r : records) traj.append(std::move(r));
  return traj;
}

std::optional<long> detect_fixed_point(const Trajectory& traj, EntityId entity, double tol,
                                       long window) {
  if (tol <= 0.0) throw ConfigError("detect_fixed_point: tol must be > 0");
  std::vector<Vec> xs = traj.state_series(entity);
  long n = static_cast<long>(xs.size());
  if (window < 1 || window > n) throw ConfigError("detect_fixed_point: window out of range");
  for (long t = 0; t + window <= n; ++t) {
    bool ok = true;
    for (long s = t; s < t + window; ++s) {
      if (linf_dist(xs[s], xs[t]) > tol) {
        ok = false;
        break;
      }
    }
    if (ok) return t;
  }
  return std::nullopt;
}

}  // namespace loopsim
