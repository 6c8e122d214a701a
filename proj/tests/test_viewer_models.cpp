#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "loopsim/viewer_models.hpp"

using namespace loopsim;

namespace {

RngCursor cursor(uint64_t seed, uint64_t tick = 0) { return RngStream(seed).at(0, tick); }

}  // namespace

TEST_CASE("attraction/aversion") {
  LatentViewerParams p;
  p.dim = 2;
  p.weights = {1.0, 0.0, 0.0};
  p.x0 = {1.0, 0.0};

  SUBCASE("pure attraction copies the latest recommendation") {
    p.alpha1 = 0.0;
    p.alpha2 = 1.0;
    p.alpha3 = 0.0;
    InteractionModel m = make_attraction_aversion(p);
    RngCursor w = cursor(3);
    StepResult r = m.step(m.init(), {0.0, 1.0}, w);
    CHECK(r.next.vec == Vec{0.0, 1.0});
  }

  SUBCASE("pure aversion negates it") {
    p.alpha1 = 0.0;
    p.alpha2 = 0.0;
    p.alpha3 = 1.0;
    InteractionModel m = make_attraction_aversion(p);
    RngCursor w = cursor(3);
    StepResult r = m.step(m.init(), {0.0, 1.0}, w);
    CHECK(r.next.vec == Vec{0.0, -1.0});
  }

  SUBCASE("rating expectation is the inner product") {
    p.alpha1 = 0.0;
    p.alpha2 = 1.0;
    p.alpha3 = 0.0;
    InteractionModel m = make_attraction_aversion(p);
    RngCursor w = cursor(3);
    StepResult r = m.step(m.init(), {1.0, 0.0}, w);  // x=(1,0), u=(1,0)
    CHECK(r.output[0] == 1.0);                       // sigma = 0: exact
  }

  SUBCASE("weights accumulate over history, newest first") {
    p.alpha1 = 0.0;
    p.alpha2 = 1.0;
    p.alpha3 = 0.0;
    p.weights = {1.0, 0.5};
    InteractionModel m = make_attraction_aversion(p);
    RngCursor w1 = cursor(3), w2 = cursor(4);
    StepResult r1 = m.step(m.init(), {0.0, 1.0}, w1);
    StepResult r2 = m.step(r1.next, {1.0, 0.0}, w2);
    // newest rec (1,0) gets weight 1, previous (0,1) gets 0.5
    CHECK(r2.next.vec == Vec{1.0, 0.5});
  }

  SUBCASE("probabilities must sum to one") {
    p.alpha1 = 0.5;
    p.alpha2 = 0.2;
    p.alpha3 = 0.2;
    CHECK_THROWS_AS(make_attraction_aversion(p), ConfigError);
  }
}

TEST_CASE("mere exposure") {
  LatentViewerParams p;
  p.dim = 2;
  p.x0 = {1.0, 0.0};

  SUBCASE("alpha=0 freezes, alpha=1 copies") {
    p.alpha = 0.0;
    InteractionModel frozen = make_mere_exposure(p);
    RngCursor w = cursor(1);
    CHECK(frozen.step(frozen.init(), {0.0, 1.0}, w).next.vec == Vec{1.0, 0.0});
    p.alpha = 1.0;
    InteractionModel copying = make_mere_exposure(p);
    CHECK(copying.step(copying.init(), {0.0, 1.0}, w).next.vec == Vec{0.0, 1.0});
  }

  SUBCASE("alpha=0.5 midpoint") {
    p.alpha = 0.5;
    InteractionModel m = make_mere_exposure(p);
    RngCursor w = cursor(1);
    CHECK(m.step(m.init(), {0.0, 1.0}, w).next.vec == Vec{0.5, 0.5});
  }

  SUBCASE("closed form under constant recommendation (1e-12)") {
    for (uint64_t seed = 0; seed < 5; ++seed) {
      RngCursor draw = cursor(seed + 100);
      double alpha = draw.uniform(0.05, 0.95);
      Vec x0 = {draw.uniform(-1, 1), draw.uniform(-1, 1)};
      Vec u = {draw.uniform(-1, 1), draw.uniform(-1, 1)};
      p.alpha = alpha;
      p.x0 = x0;
      InteractionModel m = make_mere_exposure(p);
      EntityState st = m.init();
      for (int t = 1; t <= 40; ++t) {
        RngCursor w = cursor(seed, t);
        st = m.step(st, u, w).next;
        double decay = std::pow(1.0 - alpha, t);
        for (int i = 0; i < 2; ++i)
          CHECK(std::abs(st.vec[i] - (decay * x0[i] + (1.0 - decay) * u[i])) < 1e-12);
      }
    }
  }
}

TEST_CASE("operant conditioning") {
  LatentViewerParams p;
  p.dim = 2;

  SUBCASE("delta=0 zeroes the memory") {
    p.delta = 0.0;
    p.x0 = {1.0, 0.0};
    p.m0 = 3.0;
    InteractionModel m = make_operant_conditioning(p);
    RngCursor w = cursor(1);
    StepResult r = m.step(m.init(), {1.0, 0.0}, w);
    CHECK(r.next.vec[2] == 0.0);  // m' = delta * (m + p.u) = 0
  }

  SUBCASE("s=0 leaves the preference untouched") {
    // memory average equals current quality at t=1 (normalizer 1): s = 0
    p.delta = 0.5;
    p.x0 = {1.0, 0.0};
    p.m0 = 1.0;
    InteractionModel m = make_operant_conditioning(p);
    RngCursor w = cursor(1);
    StepResult r = m.step(m.init(), {1.0, 0.0}, w);
    CHECK(r.next.vec[0] == 1.0);
    CHECK(r.next.vec[1] == 0.0);
  }

  SUBCASE("numeric example at t=2") {
    // p=(1,0), u=(1,0), m=0, delta=0.5, t=2, alpha=alpha1=0.5:
    // normalizer 0.5 => s = atan(0 - 1) = -pi/4
    // p' = (1 - 0.5*pi/4)*(1,0) + 0.5*(-pi/4)*(1,0) = (1 - pi/4, 0)
    p.delta = 0.5;
    p.alpha = 0.5;
    p.alpha1 = 0.5;
    p.x0 = {1.0, 0.0};
    p.m0 = 0.0;
    InteractionModel m = make_operant_conditioning(p);
    EntityState st = m.init();
    st.vec[3] = 2.0;  // advance the internal clock to t=2
    RngCursor w = cursor(1);
    StepResult r = m.step(st, {1.0, 0.0}, w);
    CHECK(r.next.vec[2] == doctest::Approx(0.5).epsilon(1e-12));  // m'
    CHECK(r.next.vec[0] ==
          doctest::Approx(1.0 - 3.14159265358979323846 / 4).epsilon(1e-9));
    CHECK(r.next.vec[1] == 0.0);
  }
}

TEST_CASE("biased assimilation") {
  LatentViewerParams p;
  p.dim = 2;
  p.x0 = {1.0, 0.0};
  p.eta = 1.0;
  InteractionModel m = make_biased_assimilation(p);

  SUBCASE("orthogonal recommendation is inert") {
    RngCursor w = cursor(1);
    StepResult r = m.step(m.init(), {0.0, 1.0}, w);
    CHECK(r.next.vec[0] == doctest::Approx(1.0));
    CHECK(r.next.vec[1] == doctest::Approx(0.0));
  }

  SUBCASE("aligned recommendation is a fixed direction") {
    RngCursor w = cursor(1);
    StepResult r = m.step(m.init(), {1.0, 0.0}, w);
    CHECK(r.next.vec[0] == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("numeric example") {
    double s = std::sqrt(2.0) / 2.0;
    RngCursor w = cursor(1);
    StepResult r = m.step(m.init(), {s, s}, w);
    // unnormalized (1.5, 0.5); norm sqrt(2.5)
    CHECK(r.next.vec[0] == doctest::Approx(1.5 / std::sqrt(2.5)).epsilon(1e-12));
    CHECK(r.next.vec[1] == doctest::Approx(0.5 / std::sqrt(2.5)).epsilon(1e-12));
    CHECK(r.output[0] == doctest::Approx(s).epsilon(1e-12));
  }

  SUBCASE("sphere norm preserved across 10^4 random steps") {
    EntityState st = m.init();
    RngCursor draws = cursor(7);
    for (int t = 0; t < 10000; ++t) {
      double theta = draws.uniform(0.0, 6.283185307179586);
      RngCursor w = cursor(8, t);
      st = m.step(st, {std::cos(theta), std::sin(theta)}, w).next;
      CHECK(std::abs(l2_norm(st.vec) - 1.0) <= 1e-9);
    }
  }

  SUBCASE("alignment is nondecreasing toward 1 under a fixed recommendation") {
    LatentViewerParams q = p;
    q.x0 = {std::sqrt(1.0 - 0.01), 0.1};  // alignment 0.1 with u = e2
    InteractionModel model = make_biased_assimilation(q);
    EntityState st = model.init();
    double prev = 0.1;
    for (int t = 0; t < 1000; ++t) {
      RngCursor w = cursor(9, t);
      st = model.step(st, {0.0, 1.0}, w).next;
      double align = dot(st.vec, Vec{0.0, 1.0});
      CHECK(align >= prev - 1e-12);
      prev = align;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("non-unit inputs are rejected") {
    RngCursor w = cursor(1);
    CHECK_THROWS_AS(m.step(m.init(), {2.0, 0.0}, w), ConfigError);
    LatentViewerParams bad = p;
    bad.x0 = {2.0, 0.0};
    CHECK_THROWS_AS(make_biased_assimilation(bad), ConfigError);
  }
}

TEST_CASE("score-driven click") {
  LatentViewerParams p;

  SUBCASE("gamma=0 reduces to the sigmoid") {
    p.gamma = 0.0;
    InteractionModel m = make_score_click(p);
    for (double s : {-2.0, 0.0, 2.0}) {
      RngCursor w = cursor(11);
      StepResult r = m.step(m.init(), {s}, w);
      CHECK(r.next.vec[0] == doctest::Approx(sigmoid(s)).epsilon(1e-12));
    }
  }

  SUBCASE("amplification lifts positive-score clicks above the sigmoid") {
    p.gamma = 0.5;
    InteractionModel m = make_score_click(p);
    RngCursor w = cursor(11);
    StepResult r = m.step(m.init(), {1.0}, w);
    double expect = sigmoid(1.0) + (1.0 - sigmoid(1.0)) * 0.5 * std::tanh(1.0);
    CHECK(r.next.vec[0] == doctest::Approx(expect).epsilon(1e-12));
  }

  SUBCASE("large positive scores saturate to probability 1") {
    p.gamma = 0.5;
    InteractionModel m = make_score_click(p);
    RngCursor w = cursor(12);
    StepResult r = m.step(m.init(), {40.0}, w);
    CHECK(r.next.vec[0] == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("s=0 with default boost gives probability 1/2") {
    p.gamma = 0.5;
    InteractionModel m = make_score_click(p);
    RngCursor w = cursor(13);
    StepResult r = m.step(m.init(), {0.0}, w);
    CHECK(r.next.vec[0] == 0.5);  // sigma(0)*(1 + 0.5*tanh(0)) = 0.5
  }

  SUBCASE("click frequency matches the probability") {
    p.gamma = 0.0;
    InteractionModel m = make_score_click(p);
    int clicks = 0;
    const int n = 50000;
    for (int t = 0; t < n; ++t) {
      RngCursor w = cursor(14, t);
      clicks += m.step(m.init(), {0.5}, w).output[0] == 1.0;
    }
    CHECK(clicks / double(n) == doctest::Approx(sigmoid(0.5)).epsilon(0.02));
  }

  SUBCASE("clamped out-of-range probabilities bump the warning tag") {
    p.gamma = 10.0;  // sigma(-1)*(1 + 10*tanh(1)) = 2.32 > 1
    InteractionModel m = make_score_click(p);
    RngCursor w = cursor(15);
    StepResult r = m.step(m.init(), {-1.0}, w);
    CHECK(r.next.vec[0] == 1.0);
    CHECK(r.next.tags.at("oob_warnings") == 1);
  }
}

TEST_CASE("clicked-delta slate model") {
  LatentViewerParams p;
  p.items = 3;
  p.delta_click = 0.2;

  SUBCASE("absorbing endpoints") {
    p.x0 = {1.0, 0.0, 0.5};
    InteractionModel m = make_clicked_delta(p, 2);
    RngCursor w = cursor(21);
    StepResult r = m.step(m.init(), {0.0, 1.0}, w);
    CHECK(r.output[0] == 1.0);  // x=1: always clicked
    CHECK(r.output[1] == 0.0);  // x=0: never clicked
    CHECK(r.next.vec[0] == 1.0);
    CHECK(r.next.vec[1] == 0.0);
    CHECK(r.next.vec[2] == 0.5);  // unshown entry untouched
  }

  SUBCASE("clicked moves up, unclicked moves down") {
    p.x0 = {0.5, 0.5, 0.5};
    InteractionModel m = make_clicked_delta(p, 1);
    bool saw_click = false, saw_skip = false;
    for (uint64_t s = 0; s < 64 && !(saw_click && saw_skip); ++s) {
      RngCursor w = cursor(s);
      StepResult r = m.step(m.init(), {0.0}, w);
      if (r.output[0] == 1.0) {
        CHECK(r.next.vec[0] == doctest::Approx(0.6).epsilon(1e-12));
        saw_click = true;
      } else {
        CHECK(r.next.vec[0] == doctest::Approx(0.4).epsilon(1e-12));
        saw_skip = true;
      }
    }
    CHECK(saw_click);
    CHECK(saw_skip);
  }

  SUBCASE("coordinates stay in [0,1] over 10^4 steps x 10 seeds") {
    p.x0 = {0.3, 0.7, 0.5};
    InteractionModel m = make_clicked_delta(p, 2);
    for (uint64_t seed = 0; seed < 10; ++seed) {
      EntityState st = m.init();
      RngCursor slate_draws = RngStream(seed).at(99, 0);
      for (int t = 0; t < 10000; ++t) {
        int a = slate_draws.uniform_int(3);
        int b = (a + 1 + slate_draws.uniform_int(2)) % 3;
        RngCursor w = RngStream(seed).at(0, t);
        st = m.step(st, {double(a), double(b)}, w).next;
        for (double v : st.vec) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("discounted choice") {
  LatentViewerParams p;
  p.items = 2;

  SUBCASE("pure frequency at gamma=1") {
    p.choice_gamma = 1.0;
    InteractionModel m = make_discounted_choice(p, 1);
    EntityState st = m.init();
    for (int t = 0; t < 3; ++t) {
      RngCursor w = cursor(31, t);
      st = m.step(st, {0.0}, w).next;  // slate = {item 0}: forced choice
    }
    CHECK(st.vec == Vec{3.0, 0.0});  // exposed state is e1
  }

  SUBCASE("beta=0 ignores preferences") {
    p.beta = 0.0;
    p.x0 = {100.0, 0.0};
    InteractionModel m = make_discounted_choice(p, 2);
    int first = 0;
    const int n = 20000;
    for (int t = 0; t < n; ++t) {
      RngCursor w = cursor(32, t);
      first += m.step(m.init(), {0.0, 1.0}, w).output[0] == 0.0;
    }
    CHECK(first / double(n) == doctest::Approx(0.5).epsilon(0.05));
  }

  SUBCASE("discounted count update") {
    p.choice_gamma = 0.5;
    p.x0 = {1.0, 0.0};
    InteractionModel m = make_discounted_choice(p, 1);
    RngCursor w = cursor(33);
    StepResult r = m.step(m.init(), {1.0}, w);  // slate = {item 1}: forced
    CHECK(r.next.vec == Vec{0.5, 1.0});
    CHECK(r.next.vec[0] / l1_norm(r.next.vec) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }

  SUBCASE("exposed state stays on the simplex") {
    p.choice_gamma = 0.9;
    p.items = 3;
    p.x0 = {0.2, 0.5, 0.1};
    InteractionModel m = make_discounted_choice(p, 2);
    for (uint64_t seed = 0; seed < 10; ++seed) {
      EntityState st = m.init();
      for (int t = 0; t < 10000; ++t) {
        RngCursor w = RngStream(seed).at(1, t);
        st = m.step(st, {double(t % 3), double((t + 1) % 3)}, w).next;
        double total = l1_norm(st.vec);
        REQUIRE(total > 0.0);
        double sum = 0.0;
        for (double v : st.vec) {
          CHECK(v >= 0.0);
          sum += v / total;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("loyalty softmax") {
  LatentViewerParams p;
  p.viewers = 2;
  p.items = 2;
  p.pref0 = {{0.6, 0.8}, {0.8, 0.6}};

  SUBCASE("alpha1=0 freezes loyalty") {
    p.loy_alpha1 = 0.0;
    p.loy_alpha2 = 0.5;
    InteractionModel m = make_loyalty_softmax(p);
    RngCursor w = cursor(41);
    StepResult r = m.step(m.init(), {0.0}, w);
    CHECK(r.next.vec[0] == 0.0);
    CHECK(r.next.vec[1] == 0.0);
  }

  SUBCASE("alpha2=0 freezes preference directions") {
    p.loy_alpha1 = 0.5;
    p.loy_alpha2 = 0.0;
    InteractionModel m = make_loyalty_softmax(p);
    RngCursor w = cursor(42);
    StepResult r = m.step(m.init(), {0.0}, w);
    Vec row0(r.next.vec.begin() + 2, r.next.vec.begin() + 4);
    Vec row1(r.next.vec.begin() + 4, r.next.vec.begin() + 6);
    CHECK(row0[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(row0[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(row1[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(row1[1] == doctest::Approx(0.6).epsilon(1e-12));
  }

  SUBCASE("preference update renormalizes") {
    p.viewers = 1;
    p.pref0 = {{0.6, 0.8}};
    p.loy_alpha2 = 1.0;
    InteractionModel m = make_loyalty_softmax(p);
    RngCursor w = cursor(43);
    StepResult r = m.step(m.init(), {0.0}, w);  // rec = item 0
    CHECK(r.next.vec[1] == doctest::Approx(1.6 / std::sqrt(3.2)).epsilon(1e-12));
    CHECK(r.next.vec[2] == doctest::Approx(0.8 / std::sqrt(3.2)).epsilon(1e-12));
  }
}

TEST_CASE("belief choice") {
  ContentCatalog catalog{{{1.0, 0.0}, {0.0, 1.0}}};
  LatentViewerParams p;
  p.x0 = {1.0, 0.0};

  SUBCASE("beta1=0 makes the choice follow the offered distribution") {
    p.beta1 = 0.0;
    InteractionModel m = make_belief_choice(p, catalog);
    int first = 0;
    const int n = 50000;
    for (int t = 0; t < n; ++t) {
      RngCursor w = cursor(51, t);
      first += m.step(m.init(), {0.8, 0.2}, w).output[0] == 0.0;
    }
    CHECK(first / double(n) == doctest::Approx(0.8).epsilon(0.03));
  }

  SUBCASE("symmetric catalog under uniform offer gives uniform next state") {
    ContentCatalog sym{{{1.0, 0.0}, {-1.0, 0.0}}};
    LatentViewerParams q;
    q.x0 = {1.0, 0.0};
    InteractionModel m = make_belief_choice(q, sym);
    int first = 0;
    const int n = 50000;
    for (int t = 0; t < n; ++t) {
      RngCursor w = cursor(52, t);
      StepResult r = m.step(m.init(), {0.5, 0.5}, w);
      first += r.next.vec[0] == 1.0;
    }
    // cbar = 0 so candidates are equally likely
    CHECK(first / double(n) == doctest::Approx(0.5).epsilon(0.03));
  }

  SUBCASE("cube-weighted belief mean steers the next state") {
    // y = (0.8, 0.2): cube weights 0.512 / 0.008 => cbar ~ (0.9846, 0.0154)
    p.lambda = 1.0;
    p.beta2 = 200.0;
    InteractionModel m = make_belief_choice(p, catalog);
    RngCursor w = cursor(53);
    StepResult r = m.step(m.init(), {0.8, 0.2}, w);
    CHECK(r.next.vec == Vec{1.0, 0.0});
  }

  SUBCASE("zero-mass offer is a configuration error") {
    InteractionModel m = make_belief_choice(p, catalog);
    RngCursor w = cursor(54);
    CHECK_THROWS_AS(m.step(m.init(), {0.0, 0.0}, w), ConfigError);
  }
}

TEST_CASE("belief update") {
  LatentViewerParams p;

  SUBCASE("certain belief always responds") {
    p.x0 = {1.0, 0.2, 0.2};
    p.p_min = p.p_max = 1.5;
    InteractionModel m = make_belief_update(p);
    for (int t = 0; t < 50; ++t) {
      RngCursor w = cursor(61, t);
      CHECK(m.step(m.init(), {1.0}, w).output[0] == 1.0);
    }
  }

  SUBCASE("indicator zeroes the tracked belief when rec != j'") {
    p.x0 = {0.4, 0.1, 0.2};  // j=1, j'=3
    p.p_min = p.p_max = 1.5;
    InteractionModel m = make_belief_update(p);
    RngCursor w = cursor(62);
    StepResult r = m.step(m.init(), {1.0}, w);  // rec=1 != j'=3
    CHECK(r.next.vec[0] == 0.0);
  }

  SUBCASE("amplified belief when rec == j'") {
    p.x0 = {0.4, 0.1, 0.2};
    p.p_min = p.p_max = 1.5;
    InteractionModel m = make_belief_update(p);
    RngCursor w = cursor(63);
    StepResult r = m.step(m.init(), {3.0}, w);
    CHECK(r.next.vec[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.next.vec[1] == 0.1);  // middle coordinate untouched
    CHECK(r.next.vec[2] == 0.2);
  }

  SUBCASE("beliefs stay in [0,1] over 10^4 steps x 10 seeds") {
    p.x0 = {0.4, 0.5, 0.6};
    p.p_min = 1.1;
    p.p_max = 1.5;
    InteractionModel m = make_belief_update(p);
    for (uint64_t seed = 0; seed < 10; ++seed) {
      EntityState st = m.init();
      RngCursor recs = RngStream(seed).at(5, 0);
      for (int t = 0; t < 10000; ++t) {
        RngCursor w = RngStream(seed).at(0, t);
        st = m.step(st, {double(1 + recs.uniform_int(3))}, w).next;
        for (double v : st.vec) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("measurement linearity: empirical rating mean matches <x,u> within 3 sigma") {
  LatentViewerParams p;
  p.dim = 2;
  p.x0 = {0.8, 0.3};
  p.alpha = 0.5;
  p.noise_sigma = 0.3;
  InteractionModel m = make_mere_exposure(p);
  Vec u = {0.4, 0.9};
  double expected = dot(p.x0, u);
  double sum = 0.0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    RngCursor w = cursor(71, t);
    sum += m.step(m.init(), u, w).output[0];
  }
  double three_sigma = 3.0 * p.noise_sigma / std::sqrt(double(n));
  CHECK(std::abs(sum / n - expected) < three_sigma);
}
