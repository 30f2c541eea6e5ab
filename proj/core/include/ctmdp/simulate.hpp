#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <vector>

#include "ctmdp/model.hpp"
#include "ctmdp/random.hpp"

namespace ctmdp {

/// Outcome of one sampled jump.
struct Sample {
  StateId next = 0;
  double dwell = 0.0;
};

/// Draws the dwell time by inverse CDF, -ln(1-u)/λ(s,a), then the successor
/// from P(s,a,.). `choice` indexes m.choices[s].
Sample sample_transition(const Ctmdp& m, StateId s, std::size_t choice, RngHandle& rng);

/// Same as above addressed by action id. Throws ValidationError if not enabled.
Sample sample_action(const Ctmdp& m, StateId s, ActionId action, RngHandle& rng);

/// Anything episodes can run on: a materialized model or an on-the-fly product.
template <class E>
concept Environment = requires(E& env, const E& cenv, StateId s, std::size_t a, RngHandle& rng) {
  { cenv.initial() } -> std::convertible_to<StateId>;
  { env.num_actions(s) } -> std::convertible_to<std::size_t>;
  { env.accepting(s) } -> std::convertible_to<bool>;
  { env.sample(s, a, rng) } -> std::same_as<Sample>;
};

/// A materialized model with an accepting-state mask.
class ModelEnv {
 public:
  ModelEnv(const Ctmdp& m, std::vector<bool> accepting);

  StateId initial() const noexcept { return model_->initial; }
  std::size_t num_actions(StateId s) const { return model_->choices[s].size(); }
  bool accepting(StateId s) const { return !accepting_.empty() && accepting_[s]; }
  Sample sample(StateId s, std::size_t a, RngHandle& rng) const {
    return sample_transition(*model_, s, a, rng);
  }
  const Ctmdp& model() const noexcept { return *model_; }

 private:
  const Ctmdp* model_;
  std::vector<bool> accepting_;
};

/// One step (X_n, Y_n, D_n, T_n) of a trajectory, with its successor and reward.
struct TrajectoryStep {
  std::size_t index = 0;
  StateId state = 0;
  std::size_t action = 0;
  StateId next = 0;
  double dwell = 0.0;
  double timestamp = 0.0;  // time at which the step ends: T_n = Σ_{i<=n} D_i
  double reward = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  bool truncated = false;  // stopped by the length guard rather than `stop`
};

using PolicyFn = std::function<std::size_t(StateId)>;
using RewardFn = std::function<double(const TrajectoryStep&)>;
using StopFn = std::function<bool(const TrajectoryStep&)>;
using ObserverFn = std::function<void(const TrajectoryStep&)>;

/// Runs one episode from env.initial(). Each step is passed to `observe` (when
/// set) before the next action is chosen; the episode ends when `stop` fires or
/// after `max_steps` steps (then `truncated` is set). `record` keeps the steps.
template <Environment E>
Trajectory run_episode(E& env, const PolicyFn& policy, const RewardFn& reward, const StopFn& stop,
                       RngHandle& rng, std::size_t max_steps, const ObserverFn& observe = {},
                       bool record = true) {
  Trajectory out;
  StateId s = env.initial();
  double clock = 0.0;
  for (std::size_t n = 0; n < max_steps; ++n) {
    TrajectoryStep step;
    step.index = n;
    step.state = s;
    step.action = policy(s);
    const Sample x = env.sample(s, step.action, rng);
    step.next = x.next;
    step.dwell = x.dwell;
    clock += x.dwell;
    step.timestamp = clock;
    step.reward = reward ? reward(step) : 0.0;
    if (observe) observe(step);
    if (record) out.steps.push_back(step);
    if (stop && stop(step)) return out;
    s = x.next;
  }
  out.truncated = true;
  return out;
}

}  // namespace ctmdp
