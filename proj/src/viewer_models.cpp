#include "loopsim/viewer_models.hpp"

#include <cmath>

namespace loopsim {

namespace {

Vec resolve_x0(const Vec& x0, int dim, const std::string& who) {
  if (x0.empty()) return Vec(static_cast<size_t>(dim), 0.0);
  if (static_cast<int>(x0.size()) != dim) throw ConfigError(who + ": x0 has wrong dimension");
  return x0;
}

double rating_noise(double sigma, RngCursor& w) { return sigma > 0.0 ? w.normal(0.0, sigma) : 0.0; }

int slate_index(double v, int items, const std::string& who) {
  long k = std::lround(v);
  if (k < 0 || k >= items || std::abs(v - static_cast<double>(k)) > 1e-9)
    throw ConfigError(who + ": slate entry " + std::to_string(v) + " is not a valid item index");
  return static_cast<int>(k);
}

}  // namespace

void ContentCatalog::validate(bool unit_norm) const {
  if (items.empty()) throw ConfigError("catalog: needs at least one item");
  size_t d = items[0].size();
  for (size_t i = 0; i < items.size(); ++i) {
    if (items[i].size() != d) throw ConfigError("catalog: item " + std::to_string(i) + " has mixed dimension");
    if (!all_finite(items[i])) throw ConfigError("catalog: item " + std::to_string(i) + " is not finite");
    if (unit_norm && std::abs(l2_norm(items[i]) - 1.0) > 1e-9)
      throw ConfigError("catalog: item " + std::to_string(i) + " is not unit norm");
  }
}

InteractionModel make_boredom(double decay, double x0, double noise_sigma) {
  EntityState init;
  init.vec = {x0};
  return InteractionModel(
      "boredom", init, 1, 1,
      [decay, noise_sigma](const EntityState& x, const Vec& u, RngCursor& w) {
        StepResult r;
        r.output = {u[0] * x.vec[0] + rating_noise(noise_sigma, w)};
        r.next = x;
        r.next.vec[0] = decay * x.vec[0] + u[0];
        return r;
      });
}

InteractionModel make_attraction_aversion(const LatentViewerParams& p) {
  if (p.dim < 1) throw ConfigError("attraction_aversion: dim must be >= 1");
  double asum = p.alpha1 + p.alpha2 + p.alpha3;
  if (p.alpha1 < 0 || p.alpha2 < 0 || p.alpha3 < 0 || std::abs(asum - 1.0) > 1e-9)
    throw ConfigError("attraction_aversion: alpha1..alpha3 must be in [0,1] and sum to 1");
  Vec weights = p.weights;
  if (weights.empty()) {
    weights.resize(20);
    double wv = 1.0;
    for (double& x : weights) {
      x = wv;
      wv *= 0.5;
    }
  }
  Vec mu0 = p.mu0_mean.empty() ? Vec(static_cast<size_t>(p.dim), 0.0) : p.mu0_mean;
  if (static_cast<int>(mu0.size()) != p.dim)
    throw ConfigError("attraction_aversion: mu0_mean has wrong dimension");
  if (p.mu0_sigma < 0) throw ConfigError("attraction_aversion: mu0_sigma must be >= 0");

  EntityState init;
  init.vec = resolve_x0(p.x0, p.dim, "attraction_aversion");
  init.history_cap = weights.size();
  double sigma = p.noise_sigma;
  double a1 = p.alpha1, a2 = p.alpha2;
  double mu0_sigma = p.mu0_sigma;
  int dim = p.dim;
  return InteractionModel(
      "attraction_aversion", init, dim, 1,
      [weights, mu0, mu0_sigma, a1, a2, sigma, dim](const EntityState& x, const Vec& u, RngCursor& w) {
        StepResult r;
        r.output = {dot(x.vec, u) + rating_noise(sigma, w)};
        r.next = x;
        r.next.push_history(0, u);  // newest at back; weight w[0] applies to it
        double roll = w.uniform();
        if (roll < a1) {
          r.next.vec.assign(static_cast<size_t>(dim), 0.0);
          for (int i = 0; i < dim; ++i) r.next.vec[i] = mu0[i] + mu0_sigma * w.normal();
        } else {
          // weighted sum of past recommendations, possibly negated
          double sign = roll < a1 + a2 ? 1.0 : -1.0;
          Vec acc(static_cast<size_t>(dim), 0.0);
          size_t n = r.next.history.size();
          for (size_t tau = 0; tau < std::min(n, weights.size()); ++tau) {
            const Vec& rec = r.next.history[n - 1 - tau].summary;
            for (int i = 0; i < dim; ++i) acc[i] += weights[tau] * rec[i];
          }
          for (int i = 0; i < dim; ++i) r.next.vec[i] = sign * acc[i];
        }
        return r;
      });
}

InteractionModel make_mere_exposure(const LatentViewerParams& p) {
  if (p.alpha < 0.0 || p.alpha > 1.0) throw ConfigError("mere_exposure: alpha must be in [0,1]");
  EntityState init;
  init.vec = resolve_x0(p.x0, p.dim, "mere_exposure");
  double alpha = p.alpha, sigma = p.noise_sigma;
  return InteractionModel(
      "mere_exposure", init, p.dim, 1,
      [alpha, sigma](const EntityState& x, const Vec& u, RngCursor& w) {
        StepResult r;
        r.output = {dot(x.vec, u) + rating_noise(sigma, w)};
        r.next = x;
        for (size_t i = 0; i < x.vec.size(); ++i) r.next.vec[i] = (1.0 - alpha) * x.vec[i] + alpha * u[i];
        return r;
      });
}

InteractionModel make_operant_conditioning(const LatentViewerParams& p) {
  if (p.delta < 0.0 || p.delta >= 1.0) throw ConfigError("operant_conditioning: delta must be in [0,1)");
  if (p.alpha < 0.0 || p.alpha1 < 0.0) throw ConfigError("operant_conditioning: alpha, alpha1 must be >= 0");
  // state layout: [p (dim), m, t]; t starts at 1 so the normalizer
  // sum_{tau=1..t-1} delta^tau is well defined from the second step on
  EntityState init;
  init.vec = resolve_x0(p.x0, p.dim, "operant_conditioning");
  init.vec.push_back(p.m0);
  init.vec.push_back(1.0);
  double delta = p.delta, alpha = p.alpha, alpha1 = p.alpha1, sigma = p.noise_sigma;
  int dim = p.dim;
  return InteractionModel(
      "operant_conditioning", init, dim, 1,
      [delta, alpha, alpha1, sigma, dim](const EntityState& x, const Vec& u, RngCursor& w) {
        Vec pref(x.vec.begin(), x.vec.begin() + dim);
        double m = x.vec[dim];
        long t = std::lround(x.vec[dim + 1]);
        double quality = dot(pref, u);

        double norm = 0.0, d = delta;
        for (long tau = 1; tau <= t - 1; ++tau) {
          norm += d;
          d *= delta;
        }
        if (norm <= 0.0) norm = 1.0;  // empty sum at t=1 (and delta=0)
        double s = std::atan(m / norm - quality);

        StepResult r;
        r.output = {quality + rating_noise(sigma, w)};
        r.next = x;
        for (int i = 0; i < dim; ++i)
          r.next.vec[i] = (1.0 - alpha * std::abs(s)) * pref[i] + alpha1 * s * u[i];
        r.next.vec[dim] = delta * (m + quality);
        r.next.vec[dim + 1] = static_cast<double>(t + 1);
        return r;
      });
}

InteractionModel make_biased_assimilation(const LatentViewerParams& p) {
  if (p.eta < 0.0) throw ConfigError("biased_assimilation: eta must be >= 0");
  Vec x0 = resolve_x0(p.x0, p.dim, "biased_assimilation");
  if (std::abs(l2_norm(x0) - 1.0) > 1e-9)
    throw ConfigError("biased_assimilation: x0 must be unit norm");
  EntityState init;
  init.vec = x0;
  double eta = p.eta, sigma = p.noise_sigma;
  return InteractionModel(
      "biased_assimilation", init, p.dim, 1,
      [eta, sigma](const EntityState& x, const Vec& u, RngCursor& w) {
        if (std::abs(l2_norm(u) - 1.0) > 1e-6)
          throw ConfigError("biased_assimilation: recommendation must be unit norm");
        double align = dot(x.vec, u);
        StepResult r;
        r.output = {align + rating_noise(sigma, w)};
        r.next = x;
        for (size_t i = 0; i < x.vec.size(); ++i) r.next.vec[i] = x.vec[i] + eta * align * u[i];
        normalize_l2(r.next.vec, "biased_assimilation");
        return r;
      });
}

InteractionModel make_score_click(const LatentViewerParams& p) {
  if (p.gamma < 0.0) throw ConfigError("score_click: gamma must be >= 0");
  if (p.boost != "tanh_abs" && p.boost != "zero")
    throw ConfigError("score_click: unknown boost function " + p.boost);
  bool tanh_boost = p.boost == "tanh_abs";
  double gamma = p.gamma;
  EntityState init;
  init.vec = {0.0};
  init.tags["oob_warnings"] = 0;  // counts click probabilities clamped into [0,1]
  return InteractionModel(
      "score_click", init, 1, 1,
      [gamma, tanh_boost](const EntityState& x, const Vec& u, RngCursor& w) {
        double s = u[0];
        double boost = tanh_boost ? std::tanh(std::abs(s)) : 0.0;
        double sig = sigmoid(s);
        // amplified click probability, memoryless in the predicted score
        double prob = s > 0.0 ? sig + (1.0 - sig) * gamma * boost : sig * (1.0 + gamma * boost);
        StepResult r;
        r.next = x;
        if (prob < 0.0 || prob > 1.0) r.next.tags["oob_warnings"] += 1;
        prob = clamp01(prob);
        r.next.vec[0] = prob;
        r.output = {w.bernoulli(prob) ? 1.0 : 0.0};
        return r;
      });
}

InteractionModel make_clicked_delta(const LatentViewerParams& p, int slate) {
  if (p.delta_click <= 0.0 || p.delta_click >= 1.0)
    throw ConfigError("clicked_delta: delta_click must be in (0,1)");
  if (p.items < 1 || slate < 1 || slate > p.items)
    throw ConfigError("clicked_delta: need 1 <= slate <= items");
  EntityState init;
  init.vec = p.x0.empty() ? Vec(static_cast<size_t>(p.items), 0.5)
                          : resolve_x0(p.x0, p.items, "clicked_delta");
  for (double v : init.vec)
    if (v < 0.0 || v > 1.0) throw ConfigError("clicked_delta: x0 entries must be in [0,1]");
  double dc = p.delta_click;
  int items = p.items;
  return InteractionModel(
      "clicked_delta", init, slate, slate,
      [dc, items](const EntityState& x, const Vec& u, RngCursor& w) {
        StepResult r;
        r.next = x;
        r.output.resize(u.size());
        for (size_t j = 0; j < u.size(); ++j) {
          int item = slate_index(u[j], items, "clicked_delta");
          bool click = w.bernoulli(x.vec[item]);
          r.output[j] = click ? 1.0 : 0.0;
          double v = r.next.vec[item];
          r.next.vec[item] = click ? v + dc * (1.0 - v) : v * (1.0 - dc);
        }
        return r;
      });
}

InteractionModel make_discounted_choice(const LatentViewerParams& p, int slate) {
  if (p.choice_gamma <= 0.0 || p.choice_gamma > 1.0)
    throw ConfigError("discounted_choice: gamma must be in (0,1]");
  if (p.beta < 0.0) throw ConfigError("discounted_choice: beta must be >= 0");
  if (p.items < 1 || slate < 1 || slate > p.items)
    throw ConfigError("discounted_choice: need 1 <= slate <= items");
  EntityState init;
  init.vec = p.x0.empty() ? Vec(static_cast<size_t>(p.items), 0.0)
                          : resolve_x0(p.x0, p.items, "discounted_choice");
  for (double v : init.vec)
    if (v < 0.0) throw ConfigError("discounted_choice: counts must be >= 0");
  double gamma = p.choice_gamma, beta = p.beta;
  int items = p.items;
  return InteractionModel(
      "discounted_choice", init, slate, 1,
      [gamma, beta, items](const EntityState& x, const Vec& u, RngCursor& w) {
        // exposed preference: L1-normalized discounted counts (uniform at n=0)
        double total = l1_norm(x.vec);
        Vec weights(u.size());
        for (size_t j = 0; j < u.size(); ++j) {
          int item = slate_index(u[j], items, "discounted_choice");
          double pref = total > 0.0 ? x.vec[item] / total : 1.0 / items;
          weights[j] = std::exp(beta * pref);
        }
        int pick = w.categorical(weights);
        int chosen = slate_index(u[pick], items, "discounted_choice");
        StepResult r;
        r.output = {static_cast<double>(chosen)};
        r.next = x;
        for (int i = 0; i < items; ++i) r.next.vec[i] = gamma * x.vec[i];
        r.next.vec[chosen] += 1.0;
        return r;
      });
}

InteractionModel make_loyalty_softmax(const LatentViewerParams& p) {
  if (p.viewers < 1 || p.items < 1) throw ConfigError("loyalty_softmax: viewers, items must be >= 1");
  if (p.loy_alpha1 < 0.0 || p.loy_alpha2 < 0.0)
    throw ConfigError("loyalty_softmax: alpha1, alpha2 must be >= 0");
  int m = p.viewers, n = p.items;
  Vec loy = p.loyalty0.empty() ? Vec(static_cast<size_t>(m), 0.0) : p.loyalty0;
  if (static_cast<int>(loy.size()) != m) throw ConfigError("loyalty_softmax: loyalty0 has wrong size");
  std::vector<Vec> pref = p.pref0;
  if (pref.empty()) pref.assign(m, Vec(static_cast<size_t>(n), 1.0 / std::sqrt(static_cast<double>(n))));
  if (static_cast<int>(pref.size()) != m) throw ConfigError("loyalty_softmax: pref0 needs one row per viewer");
  // state layout: [loyalty (m), pref row 0 (n), ..., pref row m-1 (n)]
  EntityState init;
  init.vec = loy;
  for (const Vec& row : pref) {
    if (static_cast<int>(row.size()) != n) throw ConfigError("loyalty_softmax: pref0 row has wrong size");
    init.vec.insert(init.vec.end(), row.begin(), row.end());
  }
  double a1 = p.loy_alpha1, a2 = p.loy_alpha2;
  return InteractionModel(
      "loyalty_softmax", init, 1, 1,
      [m, n, a1, a2](const EntityState& x, const Vec& u, RngCursor& w) {
        int rec = slate_index(u[0], n, "loyalty_softmax");
        Vec loyalty(x.vec.begin(), x.vec.begin() + m);
        int active = w.categorical(softmax(loyalty));
        Vec pref(x.vec.begin() + m + active * n, x.vec.begin() + m + (active + 1) * n);
        int consumed = w.categorical(softmax(pref));  // independent of the rec itself
        StepResult r;
        r.output = {static_cast<double>(consumed)};
        r.next = x;
        r.next.vec[active] += a1 * pref[rec];
        Vec updated = pref;
        updated[rec] += a2;
        normalize_l2(updated, "loyalty_softmax");
        for (int i = 0; i < n; ++i) r.next.vec[m + active * n + i] = updated[i];
        return r;
      });
}

InteractionModel make_belief_choice(const LatentViewerParams& p, const ContentCatalog& catalog) {
  catalog.validate();
  if (p.lambda < 0.0 || p.lambda > 1.0) throw ConfigError("belief_choice: lambda must be in [0,1]");
  if (p.beta1 < 0.0 || p.beta2 < 0.0) throw ConfigError("belief_choice: beta1, beta2 must be >= 0");
  int d = static_cast<int>(catalog.dim());
  int nitems = static_cast<int>(catalog.size());
  Vec x0 = resolve_x0(p.x0, d, "belief_choice");
  std::vector<Vec> candidates = p.candidates.empty() ? catalog.items : p.candidates;
  for (const Vec& c : candidates)
    if (static_cast<int>(c.size()) != d) throw ConfigError("belief_choice: candidate has wrong dimension");
  Vec innate = p.innate.empty() ? x0 : p.innate;
  if (static_cast<int>(innate.size()) != d) throw ConfigError("belief_choice: innate has wrong dimension");
  EntityState init;
  init.vec = x0;
  double lambda = p.lambda, beta1 = p.beta1, beta2 = p.beta2;
  std::vector<Vec> items = catalog.items;
  return InteractionModel(
      "belief_choice", init, nitems, 1,
      [items, candidates, innate, lambda, beta1, beta2, d](const EntityState& x, const Vec& u,
                                                           RngCursor& w) {
        double mass = 0.0;
        for (double v : u) {
          if (v < 0.0) throw ConfigError("belief_choice: recommendation distribution has negative mass");
          mass += v;
        }
        if (mass <= 0.0) throw ConfigError("belief_choice: recommendation distribution has zero mass");

        // cube-weighted mean content: the viewer's belief about what will be available
        Vec cbar(static_cast<size_t>(d), 0.0);
        double z = 0.0;
        for (size_t c = 0; c < items.size(); ++c) {
          double wc = u[c] * u[c] * u[c];
          z += wc;
          for (int i = 0; i < d; ++i) cbar[i] += wc * items[c][i];
        }
        if (z > 0.0)
          for (int i = 0; i < d; ++i) cbar[i] /= z;

        // content choice from the offered distribution, tilted by current preference
        Vec choice_w(items.size());
        for (size_t c = 0; c < items.size(); ++c)
          choice_w[c] = u[c] * std::exp(beta1 * dot(x.vec, items[c]));
        int chosen = w.categorical(choice_w);

        // next preference sampled over the candidate set
        Vec logits(candidates.size());
        double base = (1.0 - lambda) * dot(cbar, innate);
        for (size_t c = 0; c < candidates.size(); ++c)
          logits[c] = beta2 * (lambda * dot(cbar, candidates[c]) + base);
        int next = w.categorical(softmax(logits));

        StepResult r;
        r.output = {static_cast<double>(chosen)};
        r.next = x;
        r.next.vec = candidates[next];
        return r;
      });
}

InteractionModel make_belief_update(const LatentViewerParams& p) {
  if ((p.p_min + p.p_max) / 2.0 <= 1.0)
    throw ConfigError("belief_update: mean of p_t must be > 1");
  if (p.p_min > p.p_max || p.p_min < 0.0) throw ConfigError("belief_update: need 0 <= p_min <= p_max");
  Vec x0 = p.x0.empty() ? Vec{0.5, 0.5, 0.5} : p.x0;
  if (x0.size() != 3) throw ConfigError("belief_update: x0 must have 3 entries");
  for (double v : x0)
    if (v < 0.0 || v > 1.0) throw ConfigError("belief_update: x0 entries must be in [0,1]");
  EntityState init;
  init.vec = x0;
  double p_min = p.p_min, p_max = p.p_max;
  return InteractionModel(
      "belief_update", init, 1, 1,
      [p_min, p_max](const EntityState& x, const Vec& u, RngCursor& w) {
        long rec = std::lround(u[0]);
        if (rec < 1 || rec > 3) throw ConfigError("belief_update: rec type must be in {1,2,3}");
        StepResult r;
        r.output = {w.bernoulli(x.vec[rec - 1]) ? 1.0 : 0.0};
        // (j, j') = (1,3) when x[1] dominates, else (3,1); ties go to (1,3)
        int j = x.vec[0] >= x.vec[2] ? 1 : 3;
        int jp = 4 - j;
        double pt = w.uniform(p_min, p_max);
        r.next = x;
        r.next.vec[j - 1] = rec == jp ? std::min(pt * x.vec[j - 1], 1.0) : 0.0;
        return r;
      });
}

}  // namespace loopsim
