#include "loopsim/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "loopsim/bandit_models.hpp"
#include "loopsim/policies.hpp"
#include "loopsim/viewer_models.hpp"

namespace loopsim {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Path-tracking accessor over one JSON object. Every read is recorded into
// the normalized document, so defaults are materialized and a reparse of the
// normalized text is a fixed point.
class View {
 public:
  View(const json& j, std::string path, json* norm) : j_(j), path_(std::move(path)), norm_(norm) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& k) const { return j_.contains(k); }

  void allow(std::initializer_list<const char*> keys) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool known = false;
      for (const char* k : keys)
        if (it.key() == k) {
          known = true;
          break;
        }
      if (!known) throw ConfigError(path_ + "." + it.key() + ": unknown key");
    }
  }

  double number(const std::string& k, double def, double lo = -kInf, double hi = kInf) const {
    double v = def;
    if (j_.contains(k)) v = as_number(j_.at(k), k);
    return checked(k, v, lo, hi);
  }

  double number_req(const std::string& k, double lo = -kInf, double hi = kInf) const {
    require(k);
    return checked(k, as_number(j_.at(k), k), lo, hi);
  }

  long integer(const std::string& k, long def, long lo = std::numeric_limits<long>::min(),
               long hi = std::numeric_limits<long>::max()) const {
    long v = def;
    if (j_.contains(k)) {
      if (!j_.at(k).is_number_integer())
        throw ConfigError(path_ + "." + k + ": expected an integer");
      v = j_.at(k).get<long>();
    }
    if (v < lo || v > hi)
      throw ConfigError(path_ + "." + k + ": " + std::to_string(v) + " outside [" +
                        std::to_string(lo) + "," + std::to_string(hi) + "]");
    if (norm_) (*norm_)[k] = v;
    return v;
  }

  uint64_t seed(const std::string& k, uint64_t def) const {
    uint64_t v = def;
    if (j_.contains(k)) {
      if (!j_.at(k).is_number_integer())
        throw ConfigError(path_ + "." + k + ": expected an integer seed");
      v = j_.at(k).get<uint64_t>();
    }
    if (norm_) (*norm_)[k] = v;
    return v;
  }

  std::string str(const std::string& k, const std::string& def,
                  std::initializer_list<const char*> choices = {}) const {
    std::string v = def;
    if (j_.contains(k)) {
      if (!j_.at(k).is_string()) throw ConfigError(path_ + "." + k + ": expected a string");
      v = j_.at(k).get<std::string>();
    }
    if (choices.size() > 0) {
      bool ok = false;
      for (const char* c : choices)
        if (v == c) ok = true;
      if (!ok) {
        std::string opts;
        for (const char* c : choices) opts += std::string(opts.empty() ? "" : ", ") + c;
        throw ConfigError(path_ + "." + k + ": \"" + v + "\" is not one of {" + opts + "}");
      }
    }
    if (norm_) (*norm_)[k] = v;
    return v;
  }

  Vec vec(const std::string& k, Vec def = {}) const {
    Vec v = std::move(def);
    if (j_.contains(k)) v = as_vec(j_.at(k), k);
    if (norm_) (*norm_)[k] = v;
    return v;
  }

  Vec vec_req(const std::string& k) const {
    require(k);
    Vec v = as_vec(j_.at(k), k);
    if (norm_) (*norm_)[k] = v;
    return v;
  }

  std::vector<Vec> matrix(const std::string& k, std::vector<Vec> def = {}) const {
    std::vector<Vec> v = std::move(def);
    if (j_.contains(k)) v = as_matrix(j_.at(k), k);
    if (norm_) (*norm_)[k] = v;
    return v;
  }

  std::vector<Vec> matrix_req(const std::string& k) const {
    require(k);
    std::vector<Vec> v = as_matrix(j_.at(k), k);
    if (norm_) (*norm_)[k] = v;
    return v;
  }

  std::vector<std::string> strings(const std::string& k, std::vector<std::string> def = {}) const {
    std::vector<std::string> v = std::move(def);
    if (j_.contains(k)) {
      const json& a = j_.at(k);
      if (!a.is_array()) throw ConfigError(path_ + "." + k + ": expected an array of strings");
      v.clear();
      for (const auto& e : a) {
        if (!e.is_string()) throw ConfigError(path_ + "." + k + ": expected an array of strings");
        v.push_back(e.get<std::string>());
      }
    }
    if (norm_) (*norm_)[k] = v;
    return v;
  }

  std::vector<int> ints(const std::string& k, std::vector<int> def = {}) const {
    std::vector<int> v = std::move(def);
    if (j_.contains(k)) {
      const json& a = j_.at(k);
      if (!a.is_array()) throw ConfigError(path_ + "." + k + ": expected an array of integers");
      v.clear();
      for (const auto& e : a) {
        if (!e.is_number_integer())
          throw ConfigError(path_ + "." + k + ": expected an array of integers");
        v.push_back(e.get<int>());
      }
    }
    if (norm_) (*norm_)[k] = v;
    return v;
  }

  View child(const std::string& k) const {
    require(k);
    json* n = nullptr;
    if (norm_) n = &((*norm_)[k] = json::object());
    return View(j_.at(k), path_ + "." + k, n);
  }

  json* norm_doc() const { return norm_; }

  std::optional<View> child_opt(const std::string& k) const {
    if (!j_.contains(k)) return std::nullopt;
    return child(k);
  }

  const json& raw(const std::string& k) const {
    require(k);
    return j_.at(k);
  }

  void require(const std::string& k) const {
    if (!j_.contains(k)) throw ConfigError(path_ + "." + k + ": required key missing");
  }

 private:
  double checked(const std::string& k, double v, double lo, double hi) const {
    if (!(v >= lo && v <= hi))
      throw ConfigError(path_ + "." + k + ": " + std::to_string(v) + " outside [" +
                        std::to_string(lo) + "," + std::to_string(hi) + "]");
    if (norm_) (*norm_)[k] = v;
    return v;
  }

  double as_number(const json& e, const std::string& k) const {
    if (!e.is_number()) throw ConfigError(path_ + "." + k + ": expected a number");
    return e.get<double>();
  }

  Vec as_vec(const json& e, const std::string& k) const {
    if (!e.is_array()) throw ConfigError(path_ + "." + k + ": expected an array of numbers");
    Vec v;
    for (const auto& x : e) {
      if (!x.is_number()) throw ConfigError(path_ + "." + k + ": expected an array of numbers");
      v.push_back(x.get<double>());
    }
    return v;
  }

  std::vector<Vec> as_matrix(const json& e, const std::string& k) const {
    if (!e.is_array()) throw ConfigError(path_ + "." + k + ": expected an array of arrays");
    std::vector<Vec> m;
    for (const auto& row : e) m.push_back(as_vec(row, k));
    return m;
  }

  const json& j_;
  std::string path_;
  json* norm_;
};

// ---- user model registry ---------------------------------------------------

LatentViewerParams common_viewer_params(const View& v) {
  LatentViewerParams p;
  p.dim = static_cast<int>(v.integer("dim", 2, 1, 1 << 20));
  p.x0 = v.vec("x0");
  p.noise_sigma = v.number("noise_sigma", 0.0, 0.0);
  return p;
}

InteractionModel build_user_model(const std::string& id, const std::string& model_path,
                                  const View& params, EntityKind& kind) {
  kind = EntityKind::viewer;
  if (id == "boredom") {
    params.allow({"decay", "x0", "noise_sigma"});
    return make_boredom(params.number("decay", 0.5, 0.0, 1.0 - 1e-12),
                        params.number("x0", 0.0), params.number("noise_sigma", 0.0, 0.0));
  }
  if (id == "attraction_aversion") {
    params.allow({"dim", "x0", "noise_sigma", "alpha1", "alpha2", "alpha3", "weights", "mu0_mean",
                  "mu0_sigma"});
    LatentViewerParams p = common_viewer_params(params);
    p.alpha1 = params.number("alpha1", 0.0, 0.0, 1.0);
    p.alpha2 = params.number("alpha2", 1.0, 0.0, 1.0);
    p.alpha3 = params.number("alpha3", 0.0, 0.0, 1.0);
    p.weights = params.vec("weights");
    p.mu0_mean = params.vec("mu0_mean");
    p.mu0_sigma = params.number("mu0_sigma", 1.0, 0.0);
    return make_attraction_aversion(p);
  }
  if (id == "mere_exposure") {
    params.allow({"dim", "x0", "noise_sigma", "alpha"});
    LatentViewerParams p = common_viewer_params(params);
    p.alpha = params.number("alpha", 0.5, 0.0, 1.0);
    return make_mere_exposure(p);
  }
  if (id == "operant_conditioning") {
    params.allow({"dim", "x0", "noise_sigma", "delta", "alpha", "alpha1", "m0"});
    LatentViewerParams p = common_viewer_params(params);
    p.delta = params.number("delta", 0.5, 0.0, 1.0 - 1e-12);
    p.alpha = params.number("alpha", 0.5, 0.0);
    p.alpha1 = params.number("alpha1", 0.5, 0.0);
    p.m0 = params.number("m0", 0.0);
    return make_operant_conditioning(p);
  }
  if (id == "biased_assimilation") {
    params.allow({"dim", "x0", "noise_sigma", "eta"});
    LatentViewerParams p = common_viewer_params(params);
    p.eta = params.number("eta", 1.0, 0.0);
    return make_biased_assimilation(p);
  }
  if (id == "score_click") {
    params.allow({"gamma", "boost"});
    LatentViewerParams p;
    p.gamma = params.number("gamma", 0.0, 0.0);
    p.boost = params.str("boost", "tanh_abs", {"tanh_abs", "zero"});
    return make_score_click(p);
  }
  if (id == "clicked_delta") {
    params.allow({"items", "delta_click", "slate", "x0"});
    LatentViewerParams p;
    p.items = static_cast<int>(params.integer("items", 2, 1, 1 << 20));
    p.delta_click = params.number("delta_click", 0.2, 1e-12, 1.0 - 1e-12);
    p.x0 = params.vec("x0");
    int slate = static_cast<int>(params.integer("slate", 1, 1, 1 << 20));
    return make_clicked_delta(p, slate);
  }
  if (id == "discounted_choice") {
    params.allow({"items", "gamma", "beta", "slate", "x0"});
    LatentViewerParams p;
    p.items = static_cast<int>(params.integer("items", 2, 1, 1 << 20));
    p.choice_gamma = params.number("gamma", 1.0, 1e-12, 1.0);
    p.beta = params.number("beta", 1.0, 0.0);
    p.x0 = params.vec("x0");
    int slate = static_cast<int>(params.integer("slate", 1, 1, 1 << 20));
    return make_discounted_choice(p, slate);
  }
  if (id == "loyalty_softmax") {
    params.allow({"viewers", "items", "alpha1", "alpha2", "loyalty0", "pref0"});
    LatentViewerParams p;
    p.viewers = static_cast<int>(params.integer("viewers", 2, 1, 1 << 20));
    p.items = static_cast<int>(params.integer("items", 2, 1, 1 << 20));
    p.loy_alpha1 = params.number("alpha1", 0.1, 0.0);
    p.loy_alpha2 = params.number("alpha2", 0.1, 0.0);
    p.loyalty0 = params.vec("loyalty0");
    p.pref0 = params.matrix("pref0");
    return make_loyalty_softmax(p);
  }
  if (id == "belief_choice") {
    params.allow({"catalog", "beta1", "beta2", "lambda", "candidates", "innate", "x0"});
    LatentViewerParams p;
    ContentCatalog catalog{params.matrix_req("catalog")};
    p.dim = static_cast<int>(catalog.dim());
    p.beta1 = params.number("beta1", 1.0, 0.0);
    p.beta2 = params.number("beta2", 1.0, 0.0);
    p.lambda = params.number("lambda", 0.5, 0.0, 1.0);
    p.candidates = params.matrix("candidates");
    p.innate = params.vec("innate");
    p.x0 = params.vec("x0");
    return make_belief_choice(p, catalog);
  }
  if (id == "belief_update") {
    params.allow({"x0", "p_min", "p_max"});
    LatentViewerParams p;
    p.x0 = params.vec("x0");
    p.p_min = params.number("p_min", 1.0, 0.0);
    p.p_max = params.number("p_max", 1.4, 0.0);
    return make_belief_update(p);
  }

  // bandit-style users share the arm/noise quartet
  auto arm_params = [&] {
    ArmParams p;
    p.arms = static_cast<int>(params.integer("arms", 2, 1, 1 << 20));
    p.base = params.vec("base", {1.0});
    p.noise = params.str("noise", "none", {"none", "gaussian", "bernoulli"});
    p.noise_sigma = params.number("noise_sigma", 0.0, 0.0);
    return p;
  };
  if (id == "rotting") {
    params.allow({"arms", "base", "noise", "noise_sigma", "rho", "family"});
    ArmParams p = arm_params();
    p.rho = params.vec("rho", {1.0});
    p.family = params.str("family", "power", {"power", "linear"});
    return make_rotting(p);
  }
  if (id == "recharging") {
    params.allow({"arms", "base", "noise", "noise_sigma", "gamma", "family", "rate", "family_seed"});
    ArmParams p = arm_params();
    p.gamma = params.vec("gamma", {0.5});
    p.family = params.str("family", "saturating", {"saturating", "linear_capped", "gp"});
    p.rate = params.vec("rate", {0.25});
    p.family_seed = static_cast<uint64_t>(params.integer("family_seed", 0, 0));
    return make_recharging(p);
  }
  if (id == "rebounding") {
    params.allow({"arms", "base", "noise", "noise_sigma", "gamma", "lambda", "x0"});
    ArmParams p = arm_params();
    p.gamma = params.vec("gamma", {0.5});
    p.lambda = params.vec("lambda", {1.0});
    p.x0 = params.number("x0", 0.0, 0.0);
    return make_rebounding(p);
  }
  if (id == "departure") {
    params.allow({"arms", "prior", "click_matrix", "leave_matrix"});
    DepartureParams p;
    p.arms = static_cast<int>(params.integer("arms", 2, 1, 1 << 20));
    p.prior = params.vec_req("prior");
    p.click_prob = params.matrix_req("click_matrix");
    p.leave_prob = params.matrix_req("leave_matrix");
    return make_departure(p);
  }
  if (id == "last_switch") {
    params.allow({"arms", "base", "noise", "noise_sigma", "gamma", "modes"});
    ArmParams p = arm_params();
    p.gamma = params.vec("gamma", {0.5});
    auto modes = params.strings("modes", {"recovering"});
    return make_last_switch(p, modes);
  }
  if (id == "anchor") {
    params.allow({"arms", "base", "noise", "noise_sigma", "lambda", "rate", "x0"});
    ArmParams p = arm_params();
    p.lambda = {params.number("lambda", 0.5, 0.0, 1.0)};
    p.rate = params.vec("rate", {1.0});
    p.x0 = params.number("x0", 0.0);
    return make_anchor(p);
  }
  if (id == "history_rate") {
    params.allow({"arms", "base", "noise", "noise_sigma", "delay_scale", "history_cap"});
    ArmParams p = arm_params();
    p.delay_scale = params.number("delay_scale", 1.0, 1e-12);
    p.history_cap = static_cast<int>(params.integer("history_cap", 64, 1, 1 << 20));
    return make_history_rate(p);
  }
  if (id == "creator_participation") {
    params.allow({"window", "threshold"});
    kind = EntityKind::creator;
    return games::make_creator_participation(
        static_cast<int>(params.integer("window", 5, 1, 1 << 20)),
        params.number("threshold", 0.0, 0.0));
  }
  throw ConfigError(model_path + ": unknown model id \"" + id + "\"");
}

InteractionModel build_policy(const std::string& id, const std::string& policy_path,
                              const View& params) {
  if (id == "fixed") {
    params.allow({"output"});
    return make_fixed_policy(params.vec_req("output"));
  }
  if (id == "greedy_dot") {
    params.allow({"catalog", "ema_rate", "slate", "emit", "u0"});
    PolicyParams p;
    ContentCatalog catalog{params.matrix_req("catalog")};
    p.ema_rate = params.number("ema_rate", 0.5, 0.0, 1.0);
    p.slate = static_cast<int>(params.integer("slate", 1, 1, 1 << 20));
    p.emit = params.str("emit", "vector", {"vector", "indices"});
    p.u0 = params.vec("u0");
    return make_greedy_dot_policy(p, catalog);
  }
  if (id == "softmax") {
    params.allow({"catalog", "temperature", "ema_rate", "u0"});
    PolicyParams p;
    ContentCatalog catalog{params.matrix_req("catalog")};
    p.temperature = params.number("temperature", 1.0, 1e-12);
    p.ema_rate = params.number("ema_rate", 0.0, 0.0, 1.0);
    p.u0 = params.vec("u0");
    return make_softmax_policy(p, catalog);
  }
  if (id == "epsilon_greedy") {
    params.allow({"arms", "epsilon"});
    PolicyParams p;
    p.arms = static_cast<int>(params.integer("arms", 2, 1, 1 << 20));
    p.epsilon = params.number("epsilon", 0.1, 0.0, 1.0);
    return make_epsilon_greedy_policy(p);
  }
  if (id == "ucb1") {
    params.allow({"arms", "confidence"});
    PolicyParams p;
    p.arms = static_cast<int>(params.integer("arms", 2, 1, 1 << 20));
    p.confidence = params.number("confidence", 1.0, 0.0);
    return make_ucb1_policy(p);
  }
  if (id == "sliding_ucb") {
    params.allow({"arms", "confidence", "window"});
    PolicyParams p;
    p.arms = static_cast<int>(params.integer("arms", 2, 1, 1 << 20));
    p.confidence = params.number("confidence", 1.0, 0.0);
    p.window = static_cast<int>(params.integer("window", 100, 1, 1 << 20));
    return make_sliding_ucb_policy(p);
  }
  throw ConfigError(policy_path + ": unknown policy id \"" + id + "\"");
}

// ---- game section ----------------------------------------------------------

games::ActionSpace build_space(const View& v) {
  std::string kind = v.str("kind", "interval", {"interval", "box", "sphere", "finite"});
  if (kind == "interval") {
    v.allow({"kind", "points"});
    return games::ActionSpace::interval_grid(static_cast<int>(v.integer("points", 11, 1, 1 << 20)));
  }
  if (kind == "box") {
    v.allow({"kind", "dim", "points", "hi"});
    return games::ActionSpace::box_grid(static_cast<int>(v.integer("dim", 2, 1, 16)),
                                        static_cast<int>(v.integer("points", 5, 1, 1 << 10)),
                                        v.number("hi", 1.0, 1e-12));
  }
  if (kind == "sphere") {
    v.allow({"kind", "dim", "points"});
    return games::ActionSpace::sphere_grid(static_cast<int>(v.integer("dim", 2, 2, 16)),
                                           static_cast<int>(v.integer("points", 16, 1, 1 << 12)));
  }
  v.allow({"kind", "actions"});
  return games::ActionSpace::finite(v.matrix_req("actions"));
}

games::GameSpec build_game(const View& v, games::Profile& init, int& max_rounds) {
  v.allow({"creators", "space", "viewers", "rec_rule", "reward_rule", "cost_rule", "tie_rule",
           "eta", "cost_beta", "prizes", "topic_quality", "utility_table", "init_profile",
           "max_rounds"});
  games::GameSpec g;
  g.creators = static_cast<int>(v.integer("creators", 2, 1, 16));
  g.space = build_space(v.child("space"));

  if (v.has("viewers")) {
    const json& arr = v.raw("viewers");
    if (!arr.is_array()) throw ConfigError(v.path() + ".viewers: expected an array");
    json norm_viewers = json::array();
    for (size_t i = 0; i < arr.size(); ++i) {
      json norm_v = json::object();
      View vv(arr[i], v.path() + ".viewers[" + std::to_string(i) + "]", &norm_v);
      vv.allow({"u", "weight", "topic", "tolerance"});
      games::GameViewer gv;
      gv.u = vv.vec("u");
      gv.weight = vv.number("weight", 1.0, 0.0);
      gv.topic = static_cast<int>(vv.integer("topic", -1, -1, 1 << 20));
      gv.tolerance = vv.number("tolerance", 1.0, 1e-12);
      g.viewers.push_back(std::move(gv));
      norm_viewers.push_back(std::move(norm_v));
    }
    if (json* n = v.norm_doc()) (*n)["viewers"] = std::move(norm_viewers);
  }

  g.rec_rule = [&] {
    std::string s = v.str("rec_rule", "hardmax",
                          {"hardmax", "softmax", "topic_top_quality", "rank_prize",
                           "engagement_hardmax"});
    if (s == "softmax") return games::RecRule::softmax;
    if (s == "topic_top_quality") return games::RecRule::topic_top_quality;
    if (s == "rank_prize") return games::RecRule::rank_prize;
    if (s == "engagement_hardmax") return games::RecRule::engagement_hardmax;
    return games::RecRule::hardmax;
  }();
  g.reward_rule = [&] {
    std::string s = v.str("reward_rule", "exposure",
                          {"exposure", "weighted_exposure", "prize_by_rank", "engaged_exposure"});
    if (s == "weighted_exposure") return games::RewardRule::weighted_exposure;
    if (s == "prize_by_rank") return games::RewardRule::prize_by_rank;
    if (s == "engaged_exposure") return games::RewardRule::engaged_exposure;
    return games::RewardRule::exposure;
  }();
  g.cost_rule = [&] {
    std::string s = v.str("cost_rule", "none", {"none", "norm_power", "quality_quadratic"});
    if (s == "norm_power") return games::CostRule::norm_power;
    if (s == "quality_quadratic") return games::CostRule::quality_quadratic;
    return games::CostRule::none;
  }();
  g.tie_rule = v.str("tie_rule", "split", {"split", "lowest_index"}) == "split"
                   ? games::TieRule::split
                   : games::TieRule::lowest_index;
  g.eta = v.number("eta", 1.0);
  g.cost_beta = v.number("cost_beta", 2.0, 1e-12);
  g.prizes = v.vec("prizes");
  g.topic_quality = v.matrix("topic_quality");
  g.utility_table = v.matrix("utility_table");

  auto init_ints = v.ints("init_profile");
  init.assign(static_cast<size_t>(g.creators), 0);
  if (!init_ints.empty()) {
    if (static_cast<int>(init_ints.size()) != g.creators)
      throw ConfigError(v.path() + ".init_profile: needs one action per creator");
    for (int i = 0; i < g.creators; ++i) {
      if (init_ints[i] < 0 || init_ints[i] >= static_cast<int>(g.space.size()))
        throw ConfigError(v.path() + ".init_profile: action index out of range");
      init[static_cast<size_t>(i)] = init_ints[i];
    }
  }
  max_rounds = static_cast<int>(v.integer("max_rounds", 100, 1, 1 << 20));
  g.validate();
  return g;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }

  ScenarioConfig out;
  json norm = json::object();
  View root(doc, "config", &norm);
  root.allow({"recommender", "users", "game", "horizon", "seed", "routing", "outputs"});

  // recommender
  {
    View rec = root.child("recommender");
    rec.allow({"policy", "params"});
    rec.require("policy");
    std::string policy = rec.str("policy", "");
    json norm_params = json::object();
    json empty = json::object();
    const json& raw_params = rec.has("params") ? rec.raw("params") : empty;
    View params(raw_params, "config.recommender.params", &norm_params);
    try {
      out.scenario.recommender = build_policy(policy, "config.recommender.policy", params);
    } catch (const ConfigError& e) {
      std::string what = e.what();
      if (what.find("config.") == std::string::npos)
        throw ConfigError("config.recommender: " + what);
      throw;
    }
    norm["recommender"]["params"] = norm_params;
  }

  // users
  {
    root.require("users");
    const json& arr = root.raw("users");
    if (!arr.is_array() || arr.empty())
      throw ConfigError("config.users: expected a nonempty array");
    json norm_users = json::array();
    for (size_t i = 0; i < arr.size(); ++i) {
      std::string upath = "config.users[" + std::to_string(i) + "]";
      json norm_u = json::object();
      View uv(arr[i], upath, &norm_u);
      uv.allow({"model", "count", "params", "kind"});
      uv.require("model");
      std::string id = uv.str("model", "");
      long count = uv.integer("count", 1, 1, 1 << 24);
      std::string kind_str = uv.str("kind", "", {"", "viewer", "creator"});
      json norm_params = json::object();
      json empty = json::object();
      const json& raw_params = uv.has("params") ? uv.raw("params") : empty;
      View params(raw_params, upath + ".params", &norm_params);
      EntityKind default_kind;
      InteractionModel model;
      try {
        model = build_user_model(id, upath + ".model", params, default_kind);
      } catch (const ConfigError& e) {
        std::string what = e.what();
        if (what.find("config.") == std::string::npos) throw ConfigError(upath + ": " + what);
        throw;
      }
      EntityKind kind = default_kind;
      if (kind_str == "viewer") kind = EntityKind::viewer;
      if (kind_str == "creator") kind = EntityKind::creator;
      norm_u["params"] = norm_params;
      norm_u["kind"] = kind == EntityKind::creator ? "creator" : "viewer";
      for (long c = 0; c < count; ++c) out.scenario.users.push_back({model, kind});
      norm_users.push_back(std::move(norm_u));
    }
    norm["users"] = std::move(norm_users);
  }

  root.require("horizon");
  out.scenario.horizon = root.integer("horizon", 0, 0, std::numeric_limits<long>::max());
  out.scenario.seed = root.seed("seed", 0);

  // routing
  {
    json norm_routing = json::object();
    json def = json::object({{"mode", "broadcast"}});
    const json& raw = root.has("routing") ? root.raw("routing") : def;
    View rv(raw, "config.routing", &norm_routing);
    rv.allow({"mode", "slices"});
    std::string mode = rv.str("mode", "broadcast", {"broadcast", "slices"});
    if (mode == "slices") {
      out.scenario.routing.mode = Routing::Mode::slices;
      auto rows = rv.matrix_req("slices");
      for (const Vec& row : rows) {
        if (row.size() != 2 || row[0] < 0 || row[1] < 1 ||
            row[0] != std::floor(row[0]) || row[1] != std::floor(row[1]))
          throw ConfigError("config.routing.slices: each slice is [offset, length] of integers");
        out.scenario.routing.slices.emplace_back(static_cast<size_t>(row[0]),
                                                 static_cast<size_t>(row[1]));
      }
    }
    norm["routing"] = norm_routing;
  }

  // outputs
  {
    json norm_out = json::object();
    json def = json::object();
    const json& raw = root.has("outputs") ? root.raw("outputs") : def;
    View ov(raw, "config.outputs", &norm_out);
    ov.allow({"trajectory", "summary", "metrics", "equilibrium", "run_id"});
    out.outputs.trajectory = ov.str("trajectory", out.outputs.trajectory);
    out.outputs.summary = ov.str("summary", out.outputs.summary);
    out.outputs.metrics = ov.str("metrics", out.outputs.metrics);
    out.outputs.equilibrium = ov.str("equilibrium", out.outputs.equilibrium);
    out.outputs.run_id = ov.str("run_id", out.outputs.run_id);
    norm["outputs"] = norm_out;
  }

  // optional game section
  if (root.has("game")) {
    json norm_game = json::object();
    View gv(root.raw("game"), "config.game", &norm_game);
    out.game = build_game(gv, out.game_init, out.game_max_rounds);
    norm["game"] = norm_game;
  }

  out.scenario.validate();
  out.canonical = std::move(norm);
  return out;
}

std::string serialize_scenario(const ScenarioConfig& config) { return config.canonical.dump(2) + "\n"; }

void set_config_path(json& config, const std::string& path, const json& value) {
  json* cur = &config;
  size_t i = 0;
  while (i < path.size()) {
    size_t dot = path.find_first_of(".[", i);
    std::string key = path.substr(i, dot == std::string::npos ? dot : dot - i);
    if (!key.empty()) {
      if (!cur->is_object() || !cur->contains(key))
        throw ConfigError("sweep path: no key \"" + key + "\" in " + path);
      cur = &(*cur)[key];
    }
    if (dot == std::string::npos) {
      i = path.size();
      break;
    }
    if (path[dot] == '.') {
      i = dot + 1;
      continue;
    }
    // bracketed index
    size_t close = path.find(']', dot);
    if (close == std::string::npos) throw ConfigError("sweep path: unbalanced [ in " + path);
    long ix = std::stol(path.substr(dot + 1, close - dot - 1));
    if (!cur->is_array() || ix < 0 || static_cast<size_t>(ix) >= cur->size())
      throw ConfigError("sweep path: index out of range in " + path);
    cur = &(*cur)[static_cast<size_t>(ix)];
    i = close + 1;
    if (i < path.size() && path[i] == '.') ++i;
  }
  *cur = value;
}

SweepSpec parse_sweep(const std::string& text, const std::string& dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("sweep: expected an object");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "base" && it.key() != "params" && it.key() != "seeds")
      throw ConfigError("sweep." + it.key() + ": unknown key");

  SweepSpec spec;
  if (!doc.contains("base")) throw ConfigError("sweep.base: required key missing");
  if (doc["base"].is_string()) {
    std::filesystem::path p = doc["base"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(dir) / p;
    std::ifstream in(p);
    if (!in) throw ConfigError("sweep.base: cannot read " + p.string());
    spec.base = json::parse(in, nullptr, true);
  } else if (doc["base"].is_object()) {
    spec.base = doc["base"];
  } else {
    throw ConfigError("sweep.base: expected an object or a file path");
  }

  if (doc.contains("params")) {
    if (!doc["params"].is_array()) throw ConfigError("sweep.params: expected an array");
    for (size_t i = 0; i < doc["params"].size(); ++i) {
      const json& e = doc["params"][i];
      std::string epath = "sweep.params[" + std::to_string(i) + "]";
      if (!e.is_object() || !e.contains("path") || !e.contains("values"))
        throw ConfigError(epath + ": expected {path, values}");
      for (auto it = e.begin(); it != e.end(); ++it)
        if (it.key() != "path" && it.key() != "values")
          throw ConfigError(epath + "." + it.key() + ": unknown key");
      if (!e["path"].is_string() || !e["values"].is_array() || e["values"].empty())
        throw ConfigError(epath + ": path must be a string and values a nonempty array");
      spec.paths.push_back(e["path"].get<std::string>());
      spec.values.emplace_back(e["values"].begin(), e["values"].end());
    }
  }

  if (doc.contains("seeds")) {
    if (!doc["seeds"].is_array() || doc["seeds"].empty())
      throw ConfigError("sweep.seeds: expected a nonempty array of integers");
    for (const json& s : doc["seeds"]) {
      if (!s.is_number_integer()) throw ConfigError("sweep.seeds: expected integers");
      spec.seeds.push_back(s.get<uint64_t>());
    }
  } else {
    spec.seeds.push_back(spec.base.contains("seed") && spec.base["seed"].is_number_integer()
                             ? spec.base["seed"].get<uint64_t>()
                             : 0);
  }
  return spec;
}

std::vector<SweepCell> expand_sweep(const SweepSpec& spec, long budget) {
  double total = static_cast<double>(spec.seeds.size());
  for (const auto& vals : spec.values) total *= static_cast<double>(vals.size());
  if (total > static_cast<double>(budget))
    throw ConfigError("sweep: " + std::to_string(static_cast<long long>(total)) +
                      " cells exceed budget " + std::to_string(budget));

  std::vector<SweepCell> cells;
  std::vector<size_t> ix(spec.paths.size(), 0);
  while (true) {
    json cfg = spec.base;
    std::string cell = "cell";
    for (size_t k = 0; k < spec.paths.size(); ++k) {
      set_config_path(cfg, spec.paths[k], spec.values[k][ix[k]]);
      cell += "_" + std::to_string(ix[k]);
    }
    for (uint64_t seed : spec.seeds) {
      json cell_cfg = cfg;
      cell_cfg["seed"] = seed;
      ScenarioConfig parsed = parse_scenario(cell_cfg.dump());  // validate early
      std::string dir_name = cell + "_seed" + std::to_string(seed);
      parsed.canonical["outputs"]["run_id"] = dir_name;
      cells.push_back({dir_name, parsed.canonical.dump(2) + "\n"});
    }
    // odometer over parameter value lists
    size_t k = 0;
    for (; k < ix.size(); ++k) {
      if (++ix[k] < spec.values[k].size()) break;
      ix[k] = 0;
    }
    if (k == ix.size()) break;
    if (ix.empty()) break;
  }
  return cells;
}

}  // namespace loopsim
