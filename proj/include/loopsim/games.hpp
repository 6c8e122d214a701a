#pragma once

#include <string>
#include <vector>

#include "loopsim/model.hpp"

namespace loopsim {
namespace games {

// Enumerable creator action space. Continuous spaces are discretized grids;
// equilibrium statements are grid-relative.
class ActionSpace {
 public:
  enum class Kind { finite, interval, box, sphere };

  static ActionSpace finite(std::vector<Vec> actions);
  static ActionSpace interval_grid(int points);                    // [0,1]
  static ActionSpace box_grid(int dim, int points, double hi);     // [0,hi]^dim
  static ActionSpace sphere_grid(int dim, int points);             // unit sphere

  Kind kind() const { return kind_; }
  size_t size() const { return actions_.size(); }
  const Vec& at(size_t i) const { return actions_.at(i); }
  const std::vector<Vec>& actions() const { return actions_; }
  size_t dim() const { return actions_.empty() ? 0 : actions_[0].size(); }

 private:
  ActionSpace(Kind kind, std::vector<Vec> actions);
  Kind kind_;
  std::vector<Vec> actions_;
};

struct GameViewer {
  Vec u;                   // preference vector (embedding games)
  double weight = 1.0;     // demand weight
  int topic = -1;          // sought topic (topic game)
  double tolerance = 1.0;  // clickbait tolerance s_i > 0
};

enum class RecRule { hardmax, softmax, topic_top_quality, rank_prize, engagement_hardmax };
enum class RewardRule { exposure, weighted_exposure, prize_by_rank, engaged_exposure };
enum class CostRule { none, norm_power, quality_quadratic };
enum class TieRule { split, lowest_index };

// One action per creator, as indices into the space's canonical enumeration.
using Profile = std::vector<int>;

struct GameSpec {
  int creators = 2;
  ActionSpace space = ActionSpace::interval_grid(2);
  std::vector<GameViewer> viewers;
  RecRule rec_rule = RecRule::hardmax;
  RewardRule reward_rule = RewardRule::exposure;
  CostRule cost_rule = CostRule::none;
  TieRule tie_rule = TieRule::split;
  double eta = 1.0;        // softmax sharpness
  double cost_beta = 2.0;  // ||a||^beta exponent
  Vec prizes;              // nonincreasing; implicitly zero-padded
  std::vector<Vec> topic_quality;   // [topic][creator]; default all 1
  std::vector<Vec> utility_table;   // optional: [creator][profile rank]; overrides the rules

  bool has_table() const { return !utility_table.empty(); }
  void validate() const;
  double quality(int topic, int creator) const;
  // clickbait: viewer engages iff quality - clickbait / tolerance >= 0
  bool engages(const GameViewer& v, const Vec& action) const;
};

// little-endian mixed-radix rank of a profile; also the utility_table index
long profile_rank(const Profile& profile, size_t space_size);

// shares[i][j]: expected fraction of viewer i routed to creator j
// (one-hot or tie-split under deterministic rules, probabilities under softmax,
// all-zero when no creator serves the viewer)
struct Assignment {
  std::vector<Vec> shares;
};

Assignment assign_recommendations(const Profile& profile, const GameSpec& game);

// Utility of creator j playing `action` against profile[-j] (profile[j] is
// replaced). Counterfactual landscape -> recommendations -> reward - cost.
double creator_utility(int j, int action, const Profile& profile, const GameSpec& game);

// Exhaustive argmax over the action space; ties to the lowest action index.
int best_response(int j, const Profile& profile, const GameSpec& game);

struct BrdResult {
  Profile profile;
  bool converged = false;
  int rounds = 0;
};

// Round-robin sequential best responses; a creator switches only on strict
// improvement (> tol), so pure Nash profiles are exact fixed points.
BrdResult best_response_dynamics(const GameSpec& game, Profile init, int max_rounds,
                                 double tol = 1e-9);

bool verify_pure_nash(const Profile& profile, const GameSpec& game, double tol = 1e-9);

// Exact pure-equilibria list via exhaustive profile enumeration. Refuses runs
// larger than `budget` profiles.
std::vector<Profile> enumerate_pure_nash(const GameSpec& game, long budget = 1000000);

// Participation threshold model: the creator departs permanently once its
// windowed exposure sum drops below the threshold. Input: exposure this tick;
// output: active flag.
InteractionModel make_creator_participation(int window, double threshold);

}  // namespace games
}  // namespace loopsim
