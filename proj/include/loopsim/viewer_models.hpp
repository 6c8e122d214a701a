#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loopsim/model.hpp"

namespace loopsim {

// Fixed content set; rows are d-dimensional item vectors.
struct ContentCatalog {
  std::vector<Vec> items;

  size_t size() const { return items.size(); }
  size_t dim() const { return items.empty() ? 0 : items[0].size(); }
  void validate(bool unit_norm = false) const;
};

// Parameter bag shared by the latent-factor viewer models. Each model reads
// the fields relevant to it; ranges are checked by the factory that uses them.
struct LatentViewerParams {
  int dim = 2;

  // attraction/aversion
  double alpha1 = 0.0, alpha2 = 1.0, alpha3 = 0.0;  // behavior probabilities, sum to 1
  Vec weights;                                      // history weights, newest first; empty => 0.5^tau, 20 taps
  Vec mu0_mean;                                     // reset distribution mean (empty => zeros)
  double mu0_sigma = 1.0;

  // mere exposure / operant conditioning
  double alpha = 0.5;  // mixing rate
  double delta = 0.5;  // memory decay

  // biased assimilation
  double eta = 1.0;

  // score-driven click
  double gamma = 0.0;
  std::string boost = "tanh_abs";  // or "zero"

  // clicked-delta
  int items = 2;
  double delta_click = 0.2;

  // discounted choice
  double choice_gamma = 1.0;
  double beta = 1.0;

  // loyalty
  int viewers = 2;
  double loy_alpha1 = 0.1, loy_alpha2 = 0.1;
  Vec loyalty0;                 // empty => zeros
  std::vector<Vec> pref0;       // empty => uniform rows

  // belief choice
  double lambda = 0.5, beta1 = 1.0, beta2 = 1.0;
  std::vector<Vec> candidates;  // empty => catalog
  Vec innate;                   // empty => x0

  // belief update
  double p_min = 1.0, p_max = 1.4;

  Vec x0;              // initial dense state where applicable (empty => zeros)
  double m0 = 0.0;     // operant memory init
  double noise_sigma = 0.0;  // additive Gaussian rating noise
};

// Example boredom model: x' = decay * x + u, y = u * x.
InteractionModel make_boredom(double decay = 0.5, double x0 = 0.0, double noise_sigma = 0.0);

InteractionModel make_attraction_aversion(const LatentViewerParams& p);
InteractionModel make_mere_exposure(const LatentViewerParams& p);
InteractionModel make_operant_conditioning(const LatentViewerParams& p);
InteractionModel make_biased_assimilation(const LatentViewerParams& p);
InteractionModel make_score_click(const LatentViewerParams& p);
InteractionModel make_clicked_delta(const LatentViewerParams& p, int slate);
InteractionModel make_discounted_choice(const LatentViewerParams& p, int slate);
InteractionModel make_loyalty_softmax(const LatentViewerParams& p);
InteractionModel make_belief_choice(const LatentViewerParams& p, const ContentCatalog& catalog);
InteractionModel make_belief_update(const LatentViewerParams& p);

}  // namespace loopsim
