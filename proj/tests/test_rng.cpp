#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "loopsim/rng.hpp"

using namespace loopsim;

TEST_CASE("draws are a pure function of (seed, stream, tick, index)") {
  RngStream a(42), b(42);
  RngCursor c1 = a.at(7, 3);
  RngCursor c2 = b.at(7, 3);
  for (int i = 0; i < 100; ++i) CHECK(c1.next_u64() == c2.next_u64());

  // consuming one stream leaves others untouched
  RngCursor other = a.at(8, 3);
  for (int i = 0; i < 17; ++i) other.next_u64();
  RngCursor c3 = a.at(7, 3);
  RngCursor c4 = b.at(7, 3);
  for (int i = 0; i < 10; ++i) CHECK(c3.next_u64() == c4.next_u64());
}

TEST_CASE("different keys give different sequences") {
  RngStream s(1);
  std::set<uint64_t> first;
  for (uint64_t id = 0; id < 50; ++id) first.insert(s.at(id, 0).next_u64());
  for (uint64_t t = 0; t < 50; ++t) first.insert(s.at(0, t).next_u64());
  CHECK(first.size() == 99);  // (0,0) appears twice
}

TEST_CASE("uniform moments") {
  RngCursor c = RngStream(123).at(0, 0);
  double sum = 0, sumsq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sumsq / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("normal moments") {
  RngCursor c = RngStream(9).at(1, 0);
  double sum = 0, sumsq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double z = c.normal();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("categorical respects weights") {
  RngCursor c = RngStream(5).at(2, 0);
  std::vector<double> w = {1.0, 3.0, 0.0, 4.0};
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) counts[c.categorical(w)] += 1;
  CHECK(counts[2] == 0);
  CHECK(counts[0] / double(n) == doctest::Approx(1.0 / 8).epsilon(0.05));
  CHECK(counts[1] / double(n) == doctest::Approx(3.0 / 8).epsilon(0.05));
  CHECK(counts[3] / double(n) == doctest::Approx(4.0 / 8).epsilon(0.05));
}

TEST_CASE("geometric mean is 1/p") {
  RngCursor c = RngStream(6).at(3, 0);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += double(c.geometric(0.25));
  CHECK(sum / n == doctest::Approx(4.0).epsilon(0.02));
  CHECK(c.geometric(1.0) == 1);
}
