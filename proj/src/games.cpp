#include "loopsim/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace loopsim {
namespace games {

ActionSpace::ActionSpace(Kind kind, std::vector<Vec> actions)
    : kind_(kind), actions_(std::move(actions)) {
  if (actions_.empty()) throw ConfigError("action space must be nonempty");
  size_t d = actions_[0].size();
  for (const Vec& a : actions_) {
    if (a.size() != d) throw ConfigError("action space has mixed dimensions");
    if (!all_finite(a)) throw ConfigError("action space has non-finite actions");
  }
}

ActionSpace ActionSpace::finite(std::vector<Vec> actions) {
  return ActionSpace(Kind::finite, std::move(actions));
}

ActionSpace ActionSpace::interval_grid(int points) {
  if (points < 1) throw ConfigError("interval grid needs >= 1 point");
  std::vector<Vec> acts;
  for (int i = 0; i < points; ++i)
    acts.push_back({points == 1 ? 0.0 : static_cast<double>(i) / (points - 1)});
  return ActionSpace(Kind::interval, std::move(acts));
}

ActionSpace ActionSpace::box_grid(int dim, int points, double hi) {
  if (dim < 1 || points < 1) throw ConfigError("box grid needs dim >= 1, points >= 1");
  if (hi <= 0.0) throw ConfigError("box grid needs hi > 0");
  std::vector<Vec> acts;
  Vec cur(static_cast<size_t>(dim), 0.0);
  long total = 1;
  for (int i = 0; i < dim; ++i) total *= points;
  for (long r = 0; r < total; ++r) {
    long rem = r;
    for (int i = 0; i < dim; ++i) {
      int step = static_cast<int>(rem % points);
      rem /= points;
      cur[i] = points == 1 ? 0.0 : hi * step / (points - 1);
    }
    acts.push_back(cur);
  }
  return ActionSpace(Kind::box, std::move(acts));
}

ActionSpace ActionSpace::sphere_grid(int dim, int points) {
  if (dim < 2 || points < 1) throw ConfigError("sphere grid needs dim >= 2, points >= 1");
  std::vector<Vec> acts;
  if (dim == 2) {
    for (int i = 0; i < points; ++i) {
      double theta = 2.0 * 3.14159265358979323846 * i / points;
      acts.push_back({std::cos(theta), std::sin(theta)});
    }
  } else {
    // normalized lattice directions, deduplicated
    ActionSpace box = box_grid(dim, points, 1.0);
    for (Vec a : box.actions()) {
      for (double& v : a) v = 2.0 * v - 1.0;
      double n = l2_norm(a);
      if (n < 1e-12) continue;
      for (double& v : a) v /= n;
      bool dup = false;
      for (const Vec& b : acts)
        if (l2_dist(a, b) < 1e-9) {
          dup = true;
          break;
        }
      if (!dup) acts.push_back(std::move(a));
    }
  }
  return ActionSpace(Kind::sphere, std::move(acts));
}

void GameSpec::validate() const {
  if (creators < 1) throw ConfigError("game: creators must be >= 1");
  if (has_table()) {
    if (static_cast<int>(utility_table.size()) != creators)
      throw ConfigError("game: utility_table needs one row per creator");
    double profiles = std::pow(static_cast<double>(space.size()), creators);
    for (const Vec& row : utility_table)
      if (static_cast<double>(row.size()) != profiles)
        throw ConfigError("game: utility_table row must have |A|^p entries");
    return;
  }
  if (reward_rule == RewardRule::prize_by_rank || rec_rule == RecRule::rank_prize) {
    if (rec_rule != RecRule::rank_prize || reward_rule != RewardRule::prize_by_rank)
      throw ConfigError("game: rank_prize rec rule and prize_by_rank reward go together");
    if (prizes.empty()) throw ConfigError("game: prize vector required");
    for (size_t i = 0; i + 1 < prizes.size(); ++i)
      if (prizes[i] < prizes[i + 1]) throw ConfigError("game: prize vector must be nonincreasing");
  } else if (viewers.empty()) {
    throw ConfigError("game: viewers required");
  }
  if (cost_rule == CostRule::norm_power && cost_beta <= 0.0)
    throw ConfigError("game: cost_beta must be > 0");
  for (const auto& v : viewers) {
    if (v.tolerance <= 0.0) throw ConfigError("game: viewer tolerance must be > 0");
    if (rec_rule == RecRule::topic_top_quality && v.topic < 0)
      throw ConfigError("game: topic game viewers need a topic");
    if ((rec_rule == RecRule::hardmax || rec_rule == RecRule::softmax) &&
        v.u.size() != space.dim())
      throw ConfigError("game: viewer vector dimension must match the action space");
  }
}

double GameSpec::quality(int topic, int creator) const {
  if (topic_quality.empty()) return 1.0;
  return topic_quality.at(static_cast<size_t>(topic)).at(static_cast<size_t>(creator));
}

bool GameSpec::engages(const GameViewer& v, const Vec& action) const {
  return action[0] - action[1] / v.tolerance >= 0.0;
}

long profile_rank(const Profile& profile, size_t space_size) {
  long rank = 0, radix = 1;
  for (int a : profile) {
    rank += a * radix;
    radix *= static_cast<long>(space_size);
  }
  return rank;
}

namespace {

// winners share equally under TieRule::split; lowest index takes all otherwise
void award(Vec& shares, const std::vector<int>& winners, TieRule tie) {
  if (winners.empty()) return;
  if (tie == TieRule::lowest_index) {
    shares[winners[0]] = 1.0;
  } else {
    double s = 1.0 / winners.size();
    for (int j : winners) shares[j] = s;
  }
}

std::vector<int> argmax_set(const Vec& scores, const std::vector<int>& eligible) {
  std::vector<int> best;
  double top = -std::numeric_limits<double>::infinity();
  for (int j : eligible) top = std::max(top, scores[j]);
  double tol = 1e-9 * std::max(1.0, std::abs(top));
  for (int j : eligible)
    if (scores[j] >= top - tol) best.push_back(j);
  return best;
}

}  // namespace

Assignment assign_recommendations(const Profile& profile, const GameSpec& game) {
  Assignment out;
  if (game.rec_rule == RecRule::rank_prize) return out;  // no per-viewer routing
  int p = game.creators;
  std::vector<int> all(p);
  std::iota(all.begin(), all.end(), 0);
  for (const GameViewer& v : game.viewers) {
    Vec shares(static_cast<size_t>(p), 0.0);
    switch (game.rec_rule) {
      case RecRule::hardmax: {
        Vec scores(static_cast<size_t>(p));
        for (int j = 0; j < p; ++j) scores[j] = dot(v.u, game.space.at(profile[j]));
        award(shares, argmax_set(scores, all), game.tie_rule);
        break;
      }
      case RecRule::softmax: {
        Vec logits(static_cast<size_t>(p));
        for (int j = 0; j < p; ++j) logits[j] = game.eta * dot(v.u, game.space.at(profile[j]));
        shares = softmax(logits);
        break;
      }
      case RecRule::topic_top_quality: {
        std::vector<int> eligible;
        Vec scores(static_cast<size_t>(p), 0.0);
        for (int j = 0; j < p; ++j) {
          int topic = static_cast<int>(std::lround(game.space.at(profile[j])[0]));
          if (topic == v.topic) {
            eligible.push_back(j);
            scores[j] = game.quality(v.topic, j);
          }
        }
        award(shares, argmax_set(scores, eligible), game.tie_rule);
        break;
      }
      case RecRule::engagement_hardmax: {
        Vec scores(static_cast<size_t>(p));
        for (int j = 0; j < p; ++j) {
          const Vec& a = game.space.at(profile[j]);
          scores[j] = a[0] + a[1];  // engagement: quality + clickbait
        }
        award(shares, argmax_set(scores, all), game.tie_rule);
        break;
      }
      case RecRule::rank_prize:
        break;
    }
    out.shares.push_back(std::move(shares));
  }
  return out;
}

namespace {

double cost_of(const Vec& action, const GameSpec& game) {
  switch (game.cost_rule) {
    case CostRule::none: return 0.0;
    case CostRule::norm_power: return std::pow(l2_norm(action), game.cost_beta);
    case CostRule::quality_quadratic: return action[0] * action[0];
  }
  return 0.0;
}

double prize_of(int j, const Profile& profile, const GameSpec& game) {
  int p = game.creators;
  Vec quality(static_cast<size_t>(p));
  for (int i = 0; i < p; ++i) quality[i] = game.space.at(profile[i])[0];
  auto prize_at = [&](size_t rank) {
    return rank < game.prizes.size() ? game.prizes[rank] : 0.0;
  };
  if (game.tie_rule == TieRule::lowest_index) {
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return quality[a] > quality[b]; });
    for (int rank = 0; rank < p; ++rank)
      if (order[rank] == j) return prize_at(static_cast<size_t>(rank));
    return 0.0;
  }
  // split: every member of a tied group gets the group's average prize
  int above = 0, tied = 0;
  for (int i = 0; i < p; ++i) {
    if (quality[i] > quality[j]) ++above;
    if (quality[i] == quality[j]) ++tied;
  }
  double sum = 0.0;
  for (int r = above; r < above + tied; ++r) sum += prize_at(static_cast<size_t>(r));
  return sum / tied;
}

}  // namespace

double creator_utility(int j, int action, const Profile& profile, const GameSpec& game) {
  if (j < 0 || j >= game.creators) throw ConfigError("creator index out of range");
  Profile landscape = profile;
  landscape.at(static_cast<size_t>(j)) = action;
  if (game.has_table())
    return game.utility_table[j].at(static_cast<size_t>(profile_rank(landscape, game.space.size())));

  const Vec& act = game.space.at(static_cast<size_t>(action));
  double reward = 0.0;
  if (game.reward_rule == RewardRule::prize_by_rank) {
    reward = prize_of(j, landscape, game);
  } else {
    Assignment assign = assign_recommendations(landscape, game);
    for (size_t i = 0; i < game.viewers.size(); ++i) {
      double share = assign.shares[i][j];
      if (share == 0.0) continue;
      switch (game.reward_rule) {
        case RewardRule::exposure: reward += share; break;
        case RewardRule::weighted_exposure: reward += game.viewers[i].weight * share; break;
        case RewardRule::engaged_exposure:
          if (game.engages(game.viewers[i], act)) reward += game.viewers[i].weight * share;
          break;
        case RewardRule::prize_by_rank: break;
      }
    }
  }
  return reward - cost_of(act, game);
}

int best_response(int j, const Profile& profile, const GameSpec& game) {
  int best = 0;
  double best_u = -std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < game.space.size(); ++a) {
    double u = creator_utility(j, static_cast<int>(a), profile, game);
    if (u > best_u) {
      best_u = u;
      best = static_cast<int>(a);
    }
  }
  return best;
}

BrdResult best_response_dynamics(const GameSpec& game, Profile init, int max_rounds, double tol) {
  game.validate();
  if (max_rounds < 1) throw ConfigError("best_response_dynamics: max_rounds must be >= 1");
  if (static_cast<int>(init.size()) != game.creators)
    throw ConfigError("best_response_dynamics: profile size != creators");
  BrdResult res;
  res.profile = std::move(init);
  for (int round = 1; round <= max_rounds; ++round) {
    bool changed = false;
    for (int j = 0; j < game.creators; ++j) {
      double current = creator_utility(j, res.profile[j], res.profile, game);
      int br = best_response(j, res.profile, game);
      double improved = creator_utility(j, br, res.profile, game);
      if (improved > current + tol) {
        res.profile[j] = br;
        changed = true;
      }
    }
    res.rounds = round;
    if (!changed) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

bool verify_pure_nash(const Profile& profile, const GameSpec& game, double tol) {
  game.validate();
  for (int j = 0; j < game.creators; ++j) {
    double current = creator_utility(j, profile[j], profile, game);
    for (size_t a = 0; a < game.space.size(); ++a)
      if (creator_utility(j, static_cast<int>(a), profile, game) > current + tol) return false;
  }
  return true;
}

std::vector<Profile> enumerate_pure_nash(const GameSpec& game, long budget) {
  game.validate();
  double total = std::pow(static_cast<double>(game.space.size()), game.creators);
  if (total > static_cast<double>(budget))
    throw ConfigError("enumerate_pure_nash: " + std::to_string(static_cast<long long>(total)) +
                      " profiles exceed budget " + std::to_string(budget));
  std::vector<Profile> out;
  Profile profile(static_cast<size_t>(game.creators), 0);
  long n = static_cast<long>(total);
  for (long r = 0; r < n; ++r) {
    long rem = r;
    for (int j = 0; j < game.creators; ++j) {
      profile[j] = static_cast<int>(rem % static_cast<long>(game.space.size()));
      rem /= static_cast<long>(game.space.size());
    }
    if (verify_pure_nash(profile, game)) out.push_back(profile);
  }
  return out;
}

InteractionModel make_creator_participation(int window, double threshold) {
  if (window < 1) throw ConfigError("creator_participation: window must be >= 1");
  if (threshold < 0.0) throw ConfigError("creator_participation: threshold must be >= 0");
  EntityState init;
  init.vec = {1.0};  // active flag, also mirrored in the tag
  init.tags["active"] = 1;
  init.history_cap = static_cast<size_t>(window);
  size_t w = static_cast<size_t>(window);
  return InteractionModel(
      "creator_participation", init, 1, 1,
      [w, threshold](const EntityState& x, const Vec& u, RngCursor&) {
        StepResult r;
        r.next = x;
        if (x.vec[0] == 0.0) {  // departure is permanent
          r.output = {0.0};
          return r;
        }
        r.next.push_history(0, Vec{u[0]});
        if (r.next.history.size() >= w) {
          double sum = 0.0;
          for (const auto& h : r.next.history) sum += h.summary[0];
          if (sum < threshold) {
            r.next.vec[0] = 0.0;
            r.next.tags["active"] = 0;
          }
        }
        r.output = {r.next.vec[0]};
        return r;
      });
}

}  // namespace games
}  // namespace loopsim
