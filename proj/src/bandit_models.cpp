#include "loopsim/bandit_models.hpp"

#include <cmath>

namespace loopsim {

namespace {

double arm_value(const Vec& v, int k, double fallback) {
  if (v.empty()) return fallback;
  if (v.size() == 1) return v[0];
  return v.at(static_cast<size_t>(k));
}

int pulled_arm(const Vec& u, int arms) {
  if (static_cast<int>(u.size()) != arms)
    throw ConfigError("bandit input has size " + std::to_string(u.size()) + ", expected " +
                      std::to_string(arms));
  return static_cast<int>(argmax(u));
}

double apply_noise(double mean, const std::string& noise, double sigma, RngCursor& w) {
  if (noise == "gaussian") return mean + w.normal(0.0, sigma);
  if (noise == "bernoulli") return w.bernoulli(clamp01(mean)) ? 1.0 : 0.0;
  return mean;
}

void check_noise(const std::string& noise, const std::string& who) {
  if (noise != "none" && noise != "gaussian" && noise != "bernoulli")
    throw ConfigError(who + ": unknown noise kind " + noise);
}

// smooth bounded function drawn once from family_seed (random Fourier sum)
double gp_curve(uint64_t seed, int k, double tau) {
  RngCursor coeffs(mix64(seed ^ mix64(static_cast<uint64_t>(k) + 17)));
  double s = 0.0;
  for (int j = 0; j < 6; ++j) {
    double amp = coeffs.uniform(0.2, 1.0) / (j + 1);
    double freq = coeffs.uniform(0.02, 0.4);
    double phase = coeffs.uniform(0.0, 6.283185307179586);
    s += amp * std::cos(freq * tau + phase);
  }
  return sigmoid(s);
}

}  // namespace

double rotting_mean(const ArmParams& p, int k, long pulls) {
  double b = arm_value(p.base, k, 1.0);
  double rho = arm_value(p.rho, k, 1.0);
  std::string family = p.family.empty() ? "power" : p.family;
  if (family == "power") return b * std::pow(static_cast<double>(pulls + 1), -rho);
  if (family == "linear") return std::max(0.0, b - rho * static_cast<double>(pulls));
  throw ConfigError("rotting: unknown family " + family);
}

InteractionModel make_rotting(const ArmParams& p) {
  if (p.arms < 1) throw ConfigError("rotting: arms must be >= 1");
  check_noise(p.noise, "rotting");
  for (double r : p.rho)
    if (r < 0.0) throw ConfigError("rotting: rho must be >= 0");
  rotting_mean(p, 0, 0);  // validates family
  EntityState init;
  init.vec.assign(static_cast<size_t>(p.arms), 0.0);
  ArmParams params = p;
  return InteractionModel(
      "rotting", init, p.arms, 1,
      [params](const EntityState& x, const Vec& u, RngCursor& w) {
        int k = pulled_arm(u, params.arms);
        StepResult r;
        r.output = {apply_noise(rotting_mean(params, k, std::lround(x.vec[k])), params.noise,
                                params.noise_sigma, w)};
        r.next = x;
        r.next.vec[k] += 1.0;
        return r;
      });
}

double recharging_mean(const ArmParams& p, int k, long recency) {
  double b = arm_value(p.base, k, 1.0);
  double g = arm_value(p.gamma, k, 0.5);
  std::string family = p.family.empty() ? "saturating" : p.family;
  double tau = static_cast<double>(recency);
  if (family == "saturating") return b * (1.0 - std::pow(g, tau));
  if (family == "linear_capped") return std::min(b, arm_value(p.rate, k, 0.25) * tau);
  if (family == "gp") return b * gp_curve(p.family_seed, k, tau);
  throw ConfigError("recharging: unknown family " + family);
}

InteractionModel make_recharging(const ArmParams& p) {
  if (p.arms < 1) throw ConfigError("recharging: arms must be >= 1");
  check_noise(p.noise, "recharging");
  for (double g : p.gamma)
    if (g < 0.0 || g >= 1.0) throw ConfigError("recharging: gamma must be in [0,1)");
  recharging_mean(p, 0, 0);
  EntityState init;
  init.vec.assign(static_cast<size_t>(p.arms), 0.0);
  ArmParams params = p;
  return InteractionModel(
      "recharging", init, p.arms, 1,
      [params](const EntityState& x, const Vec& u, RngCursor& w) {
        int k = pulled_arm(u, params.arms);
        StepResult r;
        r.output = {apply_noise(recharging_mean(params, k, std::lround(x.vec[k])), params.noise,
                                params.noise_sigma, w)};
        r.next = x;
        for (int j = 0; j < params.arms; ++j) r.next.vec[j] = j == k ? 1.0 : x.vec[j] + 1.0;
        return r;
      });
}

InteractionModel make_rebounding(const ArmParams& p) {
  if (p.arms < 1) throw ConfigError("rebounding: arms must be >= 1");
  check_noise(p.noise, "rebounding");
  for (double g : p.gamma)
    if (g <= 0.0 || g >= 1.0) throw ConfigError("rebounding: gamma must be in (0,1)");
  for (double l : p.lambda)
    if (l < 0.0) throw ConfigError("rebounding: lambda must be >= 0");
  EntityState init;
  init.vec.assign(static_cast<size_t>(p.arms), p.x0);
  ArmParams params = p;
  return InteractionModel(
      "rebounding", init, p.arms, 1,
      [params](const EntityState& x, const Vec& u, RngCursor& w) {
        int k = pulled_arm(u, params.arms);
        double b = arm_value(params.base, k, 1.0);
        double lam = arm_value(params.lambda, k, 1.0);
        StepResult r;
        // reward sees the satiation accumulated before this pull
        r.output = {apply_noise(b - lam * x.vec[k], params.noise, params.noise_sigma, w)};
        r.next = x;
        for (int j = 0; j < params.arms; ++j)
          r.next.vec[j] = arm_value(params.gamma, j, 0.5) * (x.vec[j] + (j == k ? 1.0 : 0.0));
        return r;
      });
}

InteractionModel make_departure(const DepartureParams& p) {
  if (p.arms < 1) throw ConfigError("departure: arms must be >= 1");
  int types = static_cast<int>(p.prior.size());
  if (types < 1) throw ConfigError("departure: prior must be nonempty");
  double qsum = 0.0;
  for (double q : p.prior) {
    if (q < 0.0) throw ConfigError("departure: prior entries must be >= 0");
    qsum += q;
  }
  if (std::abs(qsum - 1.0) > 1e-9) throw ConfigError("departure: prior must sum to 1");
  auto check_matrix = [&](const std::vector<Vec>& m, const std::string& name) {
    if (static_cast<int>(m.size()) != p.arms)
      throw ConfigError("departure: " + name + " needs one row per arm");
    for (const Vec& row : m) {
      if (static_cast<int>(row.size()) != types)
        throw ConfigError("departure: " + name + " row needs one entry per type");
      for (double v : row)
        if (v < 0.0 || v > 1.0) throw ConfigError("departure: " + name + " entries must be in [0,1]");
    }
  };
  check_matrix(p.click_prob, "click matrix");
  check_matrix(p.leave_prob, "leave matrix");

  // state: [type (1-based; 0 = not yet sampled), active]; the type is drawn
  // from the prior on the first step so it rides the scenario's seed
  EntityState init;
  init.vec = {0.0, 1.0};
  init.tags["active"] = 1;
  DepartureParams params = p;
  return InteractionModel(
      "departure", init, p.arms, 1,
      [params](const EntityState& x, const Vec& u, RngCursor& w) {
        StepResult r;
        r.next = x;
        if (x.vec[1] == 0.0) {  // departed users emit 0 forever
          r.output = {0.0};
          return r;
        }
        int type = static_cast<int>(std::lround(x.vec[0]));
        if (type == 0) {
          type = w.categorical(params.prior) + 1;
          r.next.vec[0] = static_cast<double>(type);
        }
        int k = pulled_arm(u, params.arms);
        bool click = w.bernoulli(params.click_prob[k][type - 1]);
        r.output = {click ? 1.0 : 0.0};
        if (!click && w.bernoulli(params.leave_prob[k][type - 1])) {
          r.next.vec = {0.0, 0.0};
          r.next.tags["active"] = 0;
        }
        return r;
      });
}

double last_switch_mean(const ArmParams& p, const std::vector<std::string>& modes, int k,
                        long clock) {
  double b = arm_value(p.base, k, 1.0);
  double g = arm_value(p.gamma, k, 0.5);
  std::string mode = modes.empty() ? "recovering" : modes[modes.size() == 1 ? 0 : k];
  double tau = static_cast<double>(clock);
  if (mode == "recovering") return b * (1.0 - std::pow(g, tau));
  if (mode == "deprecating") return b * std::pow(g, tau);
  throw ConfigError("last_switch: unknown mode " + mode);
}

InteractionModel make_last_switch(const ArmParams& p, const std::vector<std::string>& modes) {
  if (p.arms < 1) throw ConfigError("last_switch: arms must be >= 1");
  check_noise(p.noise, "last_switch");
  if (!(modes.empty() || modes.size() == 1 || static_cast<int>(modes.size()) == p.arms))
    throw ConfigError("last_switch: need one mode, or one per arm");
  for (double g : p.gamma)
    if (g <= 0.0 || g >= 1.0) throw ConfigError("last_switch: gamma must be in (0,1)");
  last_switch_mean(p, modes, 0, 0);
  // state: [clock_0..clock_{K-1}, pulled_0..pulled_{K-1}]; a clock counts
  // ticks since its arm's pulled/rested status last flipped
  EntityState init;
  init.vec.assign(static_cast<size_t>(2 * p.arms), 0.0);
  ArmParams params = p;
  std::vector<std::string> ms = modes;
  return InteractionModel(
      "last_switch", init, p.arms, 1,
      [params, ms](const EntityState& x, const Vec& u, RngCursor& w) {
        int k = pulled_arm(u, params.arms);
        StepResult r;
        r.output = {apply_noise(last_switch_mean(params, ms, k, std::lround(x.vec[k])),
                                params.noise, params.noise_sigma, w)};
        r.next = x;
        for (int j = 0; j < params.arms; ++j) {
          bool was_pulled = x.vec[params.arms + j] != 0.0;
          bool now_pulled = j == k;
          r.next.vec[j] = was_pulled == now_pulled ? x.vec[j] + 1.0 : 0.0;
          r.next.vec[params.arms + j] = now_pulled ? 1.0 : 0.0;
        }
        return r;
      });
}

InteractionModel make_anchor(const ArmParams& p) {
  if (p.arms < 1) throw ConfigError("anchor: arms must be >= 1");
  check_noise(p.noise, "anchor");
  double lam = p.lambda.empty() ? 0.5 : p.lambda[0];
  if (lam < 0.0 || lam > 1.0) throw ConfigError("anchor: lambda must be in [0,1]");
  EntityState init;
  init.vec = {p.x0};
  ArmParams params = p;
  return InteractionModel(
      "anchor", init, p.arms, 1,
      [params, lam](const EntityState& x, const Vec& u, RngCursor& w) {
        int k = pulled_arm(u, params.arms);
        double b = arm_value(params.base, k, 1.0);
        double rk = arm_value(params.rate, k, 1.0);
        StepResult r;
        r.next = x;
        r.next.vec[0] = x.vec[0] + lam * (b - x.vec[0]);
        // reward uses the post-update state (same-tick indexing)
        r.output = {apply_noise(rk * r.next.vec[0], params.noise, params.noise_sigma, w)};
        return r;
      });
}

InteractionModel make_history_rate(const ArmParams& p) {
  if (p.arms < 1) throw ConfigError("history_rate: arms must be >= 1");
  check_noise(p.noise, "history_rate");
  if (p.delay_scale <= 0.0) throw ConfigError("history_rate: delay_scale must be > 0");
  if (p.history_cap < 1) throw ConfigError("history_rate: history_cap must be >= 1");
  // state: vec = [last event time, last response]; history holds
  // (event time, [arm, response]) tuples
  EntityState init;
  init.vec = {0.0, 0.0};
  init.history_cap = static_cast<size_t>(p.history_cap);
  ArmParams params = p;
  return InteractionModel(
      "history_rate", init, p.arms, 1,
      [params](const EntityState& x, const Vec& u, RngCursor& w) {
        int k = pulled_arm(u, params.arms);
        double response = apply_noise(arm_value(params.base, k, 1.0), params.noise,
                                      params.noise_sigma, w);
        StepResult r;
        r.next = x;
        if (x.history.empty()) {
          // no prior event: no inter-arrival time yet, rate 0 sentinel
          r.output = {0.0};
          r.next.vec = {0.0, response};
          r.next.push_history(0, Vec{static_cast<double>(k), response});
          return r;
        }
        // geometric gap with mean inversely proportional to the last response
        double prev = std::max(x.vec[1], 1e-6);
        double succ = std::min(1.0, prev / params.delay_scale);
        long gap = w.geometric(std::max(succ, 1e-6));
        double event_time = x.vec[0] + static_cast<double>(gap);
        r.output = {1.0 / static_cast<double>(gap)};
        r.next.vec = {event_time, response};
        r.next.push_history(static_cast<long>(event_time), Vec{static_cast<double>(k), response});
        return r;
      });
}

}  // namespace loopsim
