#pragma once

#include "loopsim/model.hpp"
#include "loopsim/viewer_models.hpp"

namespace loopsim {

// Knobs for the recommender-side models. Each policy reads what it needs.
struct PolicyParams {
  int arms = 2;
  double epsilon = 0.1;       // exploration rate
  double confidence = 1.0;    // UCB multiplier
  int window = 100;           // sliding window length per arm
  double ema_rate = 0.5;      // preference-estimate EMA rate
  int slate = 1;
  double temperature = 1.0;
  std::string emit = "vector";  // greedy_dot: "vector" (content) or "indices" (slate)
  Vec u0;                       // preference estimate init (empty => zeros)
  Vec output;                   // fixed policy constant
};

// Emits a configured constant vector every tick; state inert.
InteractionModel make_fixed_policy(const Vec& output);

// EMA preference estimate + inner-product ranking over the catalog.
InteractionModel make_greedy_dot_policy(const PolicyParams& p, const ContentCatalog& catalog);

// Full softmax distribution over the catalog (input for choice-style users).
InteractionModel make_softmax_policy(const PolicyParams& p, const ContentCatalog& catalog);

InteractionModel make_epsilon_greedy_policy(const PolicyParams& p);
InteractionModel make_ucb1_policy(const PolicyParams& p);
InteractionModel make_sliding_ucb_policy(const PolicyParams& p);

}  // namespace loopsim
