#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

namespace loopsim {

// SplitMix64 finalizer (Steele, Lea, Flood 2014; constants per Vigna's
// public-domain reference). Used as the avalanche primitive of the
// counter-based stream below.
inline uint64_t mix64(uint64_t z) {
  z += UINT64_C(0x9E3779B97F4A7C15);
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  return z ^ (z >> 31);
}

// One derived stream position: every draw is a pure function of
// (master seed, stream id, tick, draw index). No state beyond the local
// draw counter, so identical keys reproduce identical draws regardless of
// which entity was stepped first or on which thread.
class RngCursor {
 public:
  RngCursor(uint64_t key) : key_(key) {}

  uint64_t next_u64() { return mix64(key_ ^ mix64(draw_++)); }

  // [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; consumes two draws
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // uniform over {0, ..., n-1}
  int uniform_int(int n) {
    assert(n > 0);
    return static_cast<int>(uniform() * n) % n;
  }

  // index sampled proportionally to nonnegative weights; all-zero -> uniform
  int categorical(const std::vector<double>& weights) {
    assert(!weights.empty());
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) return uniform_int(static_cast<int>(weights.size()));
    double r = uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (r < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // geometric on {1, 2, ...} with success probability p (inverse CDF)
  long geometric(double p) {
    assert(p > 0.0 && p <= 1.0);
    if (p >= 1.0) return 1;
    double u = uniform();
    return 1 + static_cast<long>(std::floor(std::log1p(-u) / std::log1p(-p)));
  }

 private:
  uint64_t key_;
  uint64_t draw_ = 0;
};

// Master stream for one run. Streams are derived per (stream id, tick);
// the engine uses an entity's (kind, index) as the stream id.
class RngStream {
 public:
  explicit RngStream(uint64_t master_seed) : seed_(master_seed) {}

  uint64_t master_seed() const { return seed_; }

  RngCursor at(uint64_t stream_id, uint64_t tick) const {
    uint64_t k = mix64(seed_ ^ UINT64_C(0xA5A5A5A55A5A5A5A));
    k = mix64(k ^ mix64(stream_id));
    k = mix64(k ^ mix64(tick));
    return RngCursor(k);
  }

 private:
  uint64_t seed_;
};

}  // namespace loopsim
