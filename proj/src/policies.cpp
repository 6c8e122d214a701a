#include "loopsim/policies.hpp"

#include <cmath>
#include <limits>

namespace loopsim {

namespace {

// Feedback arriving at the policy is the concatenated user outputs from the
// previous tick; policies reduce it to one scalar by averaging.
double feedback_scalar(const Vec& u) { return mean(u); }

}  // namespace

InteractionModel make_fixed_policy(const Vec& output) {
  if (output.empty()) throw ConfigError("fixed: output vector must be nonempty");
  if (!all_finite(output)) throw ConfigError("fixed: output vector must be finite");
  EntityState init;
  Vec out = output;
  return InteractionModel("fixed", init, -1, static_cast<int>(out.size()),
                          [out](const EntityState& x, const Vec&, RngCursor&) {
                            return StepResult{out, x};
                          });
}

InteractionModel make_greedy_dot_policy(const PolicyParams& p, const ContentCatalog& catalog) {
  catalog.validate();
  if (p.ema_rate < 0.0 || p.ema_rate > 1.0) throw ConfigError("greedy_dot: ema_rate must be in [0,1]");
  if (p.slate < 1 || p.slate > static_cast<int>(catalog.size()))
    throw ConfigError("greedy_dot: need 1 <= slate <= catalog size");
  if (p.emit != "vector" && p.emit != "indices")
    throw ConfigError("greedy_dot: emit must be \"vector\" or \"indices\"");
  if (p.emit == "vector" && p.slate != 1)
    throw ConfigError("greedy_dot: emit=vector requires slate=1");
  int d = static_cast<int>(catalog.dim());
  Vec u0 = p.u0.empty() ? Vec(static_cast<size_t>(d), 0.0) : p.u0;
  if (static_cast<int>(u0.size()) != d) throw ConfigError("greedy_dot: u0 has wrong dimension");

  // state: [u_hat (d), last top recommendation index (-1 before the first)]
  EntityState init;
  init.vec = u0;
  init.vec.push_back(-1.0);
  double rho = p.ema_rate;
  int slate = p.slate;
  bool emit_vector = p.emit == "vector";
  std::vector<Vec> items = catalog.items;
  int out_dim = emit_vector ? d : slate;
  return InteractionModel(
      "greedy_dot", init, -1, out_dim,
      [items, rho, slate, emit_vector, d](const EntityState& x, const Vec& u, RngCursor&) {
        Vec est(x.vec.begin(), x.vec.begin() + d);
        int last = static_cast<int>(std::lround(x.vec[d]));
        if (last >= 0 && !u.empty()) {
          double fb = feedback_scalar(u);
          for (int i = 0; i < d; ++i)
            est[i] = (1.0 - rho) * est[i] + rho * fb * items[last][i];
        }
        Vec scores(items.size());
        for (size_t c = 0; c < items.size(); ++c) scores[c] = dot(est, items[c]);
        // top-k by score, lowest index on ties
        std::vector<int> order(items.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return scores[a] > scores[b]; });
        StepResult r;
        if (emit_vector) {
          r.output = items[order[0]];
        } else {
          r.output.resize(slate);
          for (int i = 0; i < slate; ++i) r.output[i] = static_cast<double>(order[i]);
        }
        r.next = x;
        for (int i = 0; i < d; ++i) r.next.vec[i] = est[i];
        r.next.vec[d] = static_cast<double>(order[0]);
        return r;
      });
}

InteractionModel make_softmax_policy(const PolicyParams& p, const ContentCatalog& catalog) {
  catalog.validate();
  if (p.temperature <= 0.0) throw ConfigError("softmax: temperature must be > 0");
  if (p.ema_rate < 0.0 || p.ema_rate > 1.0) throw ConfigError("softmax: ema_rate must be in [0,1]");
  int d = static_cast<int>(catalog.dim());
  int n = static_cast<int>(catalog.size());
  Vec u0 = p.u0.empty() ? Vec(static_cast<size_t>(d), 0.0) : p.u0;
  if (static_cast<int>(u0.size()) != d) throw ConfigError("softmax: u0 has wrong dimension");

  // state: [u_hat (d), last emitted distribution (n; zeros before the first)]
  EntityState init;
  init.vec = u0;
  init.vec.insert(init.vec.end(), static_cast<size_t>(n), 0.0);
  double rho = p.ema_rate, temp = p.temperature;
  std::vector<Vec> items = catalog.items;
  return InteractionModel(
      "softmax", init, -1, n,
      [items, rho, temp, d, n](const EntityState& x, const Vec& u, RngCursor&) {
        Vec est(x.vec.begin(), x.vec.begin() + d);
        Vec lastdist(x.vec.begin() + d, x.vec.end());
        if (rho > 0.0 && l1_norm(lastdist) > 0.0 && !u.empty()) {
          // EMA toward the probability-weighted mean of the last slate
          double fb = feedback_scalar(u);
          Vec mean_content(static_cast<size_t>(d), 0.0);
          for (int c = 0; c < n; ++c)
            for (int i = 0; i < d; ++i) mean_content[i] += lastdist[c] * items[c][i];
          for (int i = 0; i < d; ++i) est[i] = (1.0 - rho) * est[i] + rho * fb * mean_content[i];
        }
        Vec logits(static_cast<size_t>(n));
        for (int c = 0; c < n; ++c) logits[c] = dot(est, items[c]) / temp;
        StepResult r;
        r.output = softmax(logits);
        r.next = x;
        for (int i = 0; i < d; ++i) r.next.vec[i] = est[i];
        for (int c = 0; c < n; ++c) r.next.vec[d + c] = r.output[c];
        return r;
      });
}

namespace {

// shared estimate bookkeeping for the index policies:
// state head = [mu_hat (K), n (K), last_arm]
struct Estimates {
  Vec mu;
  Vec n;
  int last_arm;
};

Estimates unpack(const EntityState& x, int K) {
  Estimates e;
  e.mu.assign(x.vec.begin(), x.vec.begin() + K);
  e.n.assign(x.vec.begin() + K, x.vec.begin() + 2 * K);
  e.last_arm = static_cast<int>(std::lround(x.vec[2 * K]));
  return e;
}

void absorb_reward(Estimates& e, const Vec& u) {
  if (e.last_arm < 0 || u.empty()) return;
  double fb = feedback_scalar(u);
  e.n[e.last_arm] += 1.0;
  e.mu[e.last_arm] += (fb - e.mu[e.last_arm]) / e.n[e.last_arm];
}

EntityState pack(const EntityState& x, const Estimates& e, int K, int arm) {
  EntityState next = x;
  for (int k = 0; k < K; ++k) {
    next.vec[k] = e.mu[k];
    next.vec[K + k] = e.n[k];
  }
  next.vec[2 * K] = static_cast<double>(arm);
  return next;
}

EntityState index_policy_init(int K) {
  EntityState init;
  init.vec.assign(static_cast<size_t>(2 * K), 0.0);
  init.vec.push_back(-1.0);
  return init;
}

}  // namespace

InteractionModel make_epsilon_greedy_policy(const PolicyParams& p) {
  if (p.arms < 1) throw ConfigError("epsilon_greedy: arms must be >= 1");
  if (p.epsilon < 0.0 || p.epsilon > 1.0) throw ConfigError("epsilon_greedy: epsilon must be in [0,1]");
  int K = p.arms;
  double eps = p.epsilon;
  return InteractionModel(
      "epsilon_greedy", index_policy_init(K), -1, K,
      [K, eps](const EntityState& x, const Vec& u, RngCursor& w) {
        Estimates e = unpack(x, K);
        absorb_reward(e, u);
        int arm = w.bernoulli(eps) ? w.uniform_int(K) : static_cast<int>(argmax(e.mu));
        StepResult r;
        r.output = one_hot(static_cast<size_t>(K), static_cast<size_t>(arm));
        r.next = pack(x, e, K, arm);
        return r;
      });
}

InteractionModel make_ucb1_policy(const PolicyParams& p) {
  if (p.arms < 1) throw ConfigError("ucb1: arms must be >= 1");
  if (p.confidence < 0.0) throw ConfigError("ucb1: confidence must be >= 0");
  int K = p.arms;
  double c = p.confidence;
  return InteractionModel(
      "ucb1", index_policy_init(K), -1, K,
      [K, c](const EntityState& x, const Vec& u, RngCursor&) {
        Estimates e = unpack(x, K);
        absorb_reward(e, u);
        int arm = -1;
        for (int k = 0; k < K; ++k)
          if (e.n[k] == 0.0) {
            arm = k;
            break;
          }
        if (arm < 0) {
          double rounds = 0.0;
          for (int k = 0; k < K; ++k) rounds += e.n[k];
          rounds += 1.0;
          Vec index(static_cast<size_t>(K));
          for (int k = 0; k < K; ++k)
            index[k] = e.mu[k] + c * std::sqrt(2.0 * std::log(rounds) / e.n[k]);
          arm = static_cast<int>(argmax(index));
        }
        StepResult r;
        r.output = one_hot(static_cast<size_t>(K), static_cast<size_t>(arm));
        r.next = pack(x, e, K, arm);
        return r;
      });
}

InteractionModel make_sliding_ucb_policy(const PolicyParams& p) {
  if (p.arms < 1) throw ConfigError("sliding_ucb: arms must be >= 1");
  if (p.confidence < 0.0) throw ConfigError("sliding_ucb: confidence must be >= 0");
  if (p.window < 1) throw ConfigError("sliding_ucb: window must be >= 1");
  int K = p.arms, W = p.window;
  double c = p.confidence;
  // state: [last_arm, count (K), head (K), ring obs (K*W)];
  // each arm keeps its own window of the last W observed rewards
  EntityState init;
  init.vec.assign(static_cast<size_t>(1 + 2 * K + K * W), 0.0);
  init.vec[0] = -1.0;
  return InteractionModel(
      "sliding_ucb", init, -1, K,
      [K, W, c](const EntityState& x, const Vec& u, RngCursor&) {
        StepResult r;
        r.next = x;
        Vec& st = r.next.vec;
        int last = static_cast<int>(std::lround(st[0]));
        if (last >= 0 && !u.empty()) {
          double fb = feedback_scalar(u);
          int count = static_cast<int>(st[1 + last]);
          int head = static_cast<int>(st[1 + K + last]);
          st[1 + 2 * K + last * W + head] = fb;
          st[1 + K + last] = static_cast<double>((head + 1) % W);
          if (count < W) st[1 + last] = static_cast<double>(count + 1);
        }
        int arm = -1;
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
          if (st[1 + k] == 0.0 && arm < 0) arm = k;
          total += st[1 + k];
        }
        if (arm < 0) {
          Vec index(static_cast<size_t>(K));
          for (int k = 0; k < K; ++k) {
            int count = static_cast<int>(st[1 + k]);
            double sum = 0.0;
            for (int i = 0; i < count; ++i) sum += st[1 + 2 * K + k * W + i];
            index[k] = sum / count + c * std::sqrt(2.0 * std::log(total + 1.0) / count);
          }
          arm = static_cast<int>(argmax(index));
        }
        st[0] = static_cast<double>(arm);
        r.output = one_hot(static_cast<size_t>(K), static_cast<size_t>(arm));
        return r;
      });
}

}  // namespace loopsim
