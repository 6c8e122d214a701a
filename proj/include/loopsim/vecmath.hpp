#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

#include "loopsim/errors.hpp"

namespace loopsim {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l1_norm(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

inline double l2_norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double linf_dist(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double l2_dist(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Normalizes in place; reports the degenerate zero-vector case to the caller.
inline void normalize_l2(Vec& a, const std::string& who) {
  double n = l2_norm(a);
  if (n < 1e-300) throw NumericError(who + ": degenerate update (zero vector before normalization)");
  for (double& v : a) v /= n;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Numerically stable softmax of `logits` (subtracts the max).
inline Vec softmax(const Vec& logits) {
  assert(!logits.empty());
  double m = *std::max_element(logits.begin(), logits.end());
  Vec out(logits.size());
  double z = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

inline bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

inline Vec one_hot(size_t n, size_t k) {
  Vec v(n, 0.0);
  v.at(k) = 1.0;
  return v;
}

// Lowest index wins on ties.
inline size_t argmax(const Vec& a) {
  assert(!a.empty());
  size_t best = 0;
  for (size_t i = 1; i < a.size(); ++i)
    if (a[i] > a[best]) best = i;
  return best;
}

inline double mean(const Vec& a) {
  if (a.empty()) return 0.0;
  double s = 0.0;
  for (double v : a) s += v;
  return s / static_cast<double>(a.size());
}

}  // namespace loopsim
