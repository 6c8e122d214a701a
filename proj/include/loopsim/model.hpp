#pragma once

#include <functional>
#include <string>
#include <utility>

#include "loopsim/entity.hpp"
#include "loopsim/rng.hpp"

namespace loopsim {

struct StepResult {
  Vec output;
  EntityState next;
};

// One entity's behavior as a single pure step: (state, input, noise) ->
// (output, next state). State update and measurement are fused so both see
// the same noise realization; models whose state update depends on the
// realized output (clicks, departures) need that.
class InteractionModel {
 public:
  using StepFn = std::function<StepResult(const EntityState&, const Vec&, RngCursor&)>;

  InteractionModel() = default;
  InteractionModel(std::string name, EntityState init, int input_dim, int output_dim, StepFn step)
      : name_(std::move(name)),
        init_(std::move(init)),
        input_dim_(input_dim),
        output_dim_(output_dim),
        step_(std::move(step)) {}

  const std::string& name() const { return name_; }
  const EntityState& init() const { return init_; }
  int input_dim() const { return input_dim_; }  // -1: accepts any length
  int output_dim() const { return output_dim_; }

  StepResult step(const EntityState& x, const Vec& u, RngCursor& w) const {
    StepResult r = step_(x, u, w);
    if (static_cast<int>(r.output.size()) != output_dim_)
      throw NumericError(name_ + ": output has size " + std::to_string(r.output.size()) +
                         ", declared " + std::to_string(output_dim_));
    return r;
  }

 private:
  std::string name_;
  EntityState init_;
  int input_dim_ = -1;
  int output_dim_ = 0;
  StepFn step_;
};

}  // namespace loopsim
