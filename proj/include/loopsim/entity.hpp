#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <string>

#include "loopsim/errors.hpp"
#include "loopsim/vecmath.hpp"

namespace loopsim {

enum class EntityKind { recommender, viewer, creator };

inline const char* to_string(EntityKind k) {
  switch (k) {
    case EntityKind::recommender: return "recommender";
    case EntityKind::viewer: return "viewer";
    case EntityKind::creator: return "creator";
  }
  return "?";
}

// (kind, index) is unique within a scenario; exactly one recommender.
struct EntityId {
  EntityKind kind = EntityKind::viewer;
  int index = 0;

  auto operator<=>(const EntityId&) const = default;

  std::string str() const { return std::string(to_string(kind)) + ":" + std::to_string(index); }

  // stream id for RNG derivation; stable across user iteration order
  uint64_t code() const {
    return (static_cast<uint64_t>(kind) << 40) | static_cast<uint64_t>(static_cast<uint32_t>(index));
  }

  static EntityId parse(const std::string& s);
};

inline EntityId EntityId::parse(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("bad entity id: " + s);
  std::string kind = s.substr(0, colon);
  int index = std::stoi(s.substr(colon + 1));
  if (kind == "recommender") return {EntityKind::recommender, index};
  if (kind == "viewer") return {EntityKind::viewer, index};
  if (kind == "creator") return {EntityKind::creator, index};
  throw ConfigError("bad entity kind: " + kind);
}

struct HistoryEntry {
  long tick = 0;
  Vec summary;
};

// Tagged numeric state of one entity. `vec` is the dense state, `tags` hold
// small discrete annotations (type labels, active flags), `history` is a
// bounded FIFO kept by models that need a memory of past inputs or events.
// The tag key-set is fixed after init; values may change tick to tick.
struct EntityState {
  Vec vec;
  std::map<std::string, long> tags;
  std::deque<HistoryEntry> history;
  size_t history_cap = 64;

  void push_history(long tick, Vec summary) {
    history.push_back({tick, std::move(summary)});
    while (history.size() > history_cap) history.pop_front();
  }

  bool same_tag_keys(const EntityState& other) const {
    if (tags.size() != other.tags.size()) return false;
    auto it = other.tags.begin();
    for (const auto& [k, v] : tags) {
      if (it->first != k) return false;
      ++it;
    }
    return true;
  }
};

}  // namespace loopsim
