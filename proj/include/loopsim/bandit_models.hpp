#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loopsim/model.hpp"

namespace loopsim {

// Arm-level constants for the bandit-style user models. Input to every model
// is a K-dim one-hot pull; output is the realized reward (or click).
struct ArmParams {
  int arms = 2;
  Vec base;    // b_k; scalar broadcast if size 1
  Vec gamma;   // retention / recharge rate, in (0,1) where used
  Vec lambda;  // exposure influence factor, >= 0
  Vec rate;    // r_k reward scale (anchor) / slope (linear families)
  Vec rho;     // rot exponent, >= 0

  std::string family = "";    // per-model default when empty
  uint64_t family_seed = 0;   // gp family draw
  std::string noise = "none"; // none | gaussian | bernoulli
  double noise_sigma = 0.0;

  double x0 = 0.0;          // anchor state init
  double delay_scale = 1.0; // history_rate: mean gap = delay_scale / last reward
  int history_cap = 64;
};

struct DepartureParams {
  int arms = 2;
  Vec prior;                      // Q over types, sums to 1
  std::vector<Vec> click_prob;    // P[k][b] in [0,1]
  std::vector<Vec> leave_prob;    // L[k][b] in [0,1]
};

InteractionModel make_rotting(const ArmParams& p);
InteractionModel make_recharging(const ArmParams& p);
InteractionModel make_rebounding(const ArmParams& p);
InteractionModel make_departure(const DepartureParams& p);
InteractionModel make_last_switch(const ArmParams& p, const std::vector<std::string>& modes);
InteractionModel make_anchor(const ArmParams& p);
InteractionModel make_history_rate(const ArmParams& p);

// expected-reward curves, exposed for tests and oracles
double rotting_mean(const ArmParams& p, int k, long pulls);
double recharging_mean(const ArmParams& p, int k, long recency);
double last_switch_mean(const ArmParams& p, const std::vector<std::string>& modes, int k, long clock);

}  // namespace loopsim
