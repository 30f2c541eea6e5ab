#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "ctmdp/automaton.hpp"
#include "ctmdp/errors.hpp"
#include "ctmdp/model.hpp"
#include "ctmdp/product.hpp"
#include "ctmdp/random.hpp"
#include "ctmdp/rewards.hpp"
#include "ctmdp/simulate.hpp"

namespace ctmdp {

enum class LearningRate {
  Constant,    // β_k = β
  VisitDecay,  // β_k = max(β, 1/n(s,a))
};

/// Default γ per objective when Hyperparams::gamma is left at 0. Satisfaction rewards are
/// sparse and need a long horizon; expectation rewards accrue every accepting step, and a
/// long horizon makes their values too large for β = 0.01 to settle.
inline constexpr double kSatGamma = 0.99999;
inline constexpr double kExpGamma = 0.99;

struct Hyperparams {
  double gamma = 0.0;  // target discount of the uniformized model, α = C(1-γ)/γ; 0 = default
  double alpha = 0.0;      // continuous discount rate; used as-is when positive
  double beta = 0.01;
  double epsilon = 0.1;
  double zeta = 0.99;
  std::size_t ep_len = 300;
  std::size_t ep_n = 20000;
  double tol = 0.01;
  LearningRate rate = LearningRate::Constant;

  /// Throws ValidationError for out-of-range values.
  void validate() const;
  /// The α used by the update rule for a model whose largest exit rate is `cap`.
  /// `fallback` stands in for an unset gamma.
  double discount_rate(double cap, double fallback = kSatGamma) const;
};

/// Action values keyed by discovered state, all zero until updated.
class QTable {
 public:
  /// Registers `s` with `num_actions` zero-valued entries (no-op if already known).
  void ensure(StateId s, std::size_t num_actions);

  bool known(StateId s) const noexcept { return s < values_.size() && !values_[s].empty(); }
  std::size_t num_states() const noexcept { return values_.size(); }
  std::size_t num_actions(StateId s) const { return known(s) ? values_[s].size() : 0; }

  double value(StateId s, std::size_t a) const { return values_.at(s).at(a); }
  double& at(StateId s, std::size_t a) { return values_.at(s).at(a); }
  std::size_t visits(StateId s, std::size_t a) const { return visits_.at(s).at(a); }
  void count_visit(StateId s, std::size_t a) { ++visits_.at(s).at(a); }

  /// max_a Q(s,a); 0 for unknown states.
  double max_value(StateId s) const;
  /// Lowest action index among the maximizers; 0 for unknown states.
  std::size_t argmax(StateId s) const;

  bool operator==(const QTable&) const = default;

 private:
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<std::size_t>> visits_;
};

/// Q(s,a) := (1-β)Q(s,a) + β(r + e^{-ατ} target), returning the new Q(s,a).
double q_update_towards(QTable& q, StateId s, std::size_t a, double reward, double tau,
                        double target, double alpha, double beta);

/// The CTMDP Q-learning update with target max_a' Q(s',a'). `next` must be
/// registered in `q`. A terminal step uses target 0.
double q_update(QTable& q, StateId s, std::size_t a, double reward, double tau, StateId next,
                double alpha, double beta, bool terminal = false);

/// ε-greedy: with probability ε a uniform action, else the lowest-index argmax.
/// Draws exactly one uniform, plus one index draw when exploring.
/// Throws ValidationError when `num_actions` is zero.
std::size_t select_action(const QTable& q, StateId s, std::size_t num_actions, double epsilon,
                          RngHandle& rng);

/// Greedy pure schedule over the states of `q` (lowest-index ties; unknown states get 0).
Schedule extract_schedule(const QTable& q);

struct StepReward {
  double reward = 0.0;
  bool terminal = false;
};

/// Shaping of a single observed transition into a learning signal.
using StepRewardFn = std::function<StepReward(const TrajectoryStep&, bool from_accepting)>;

struct LearnStats {
  std::size_t episodes = 0;
  std::size_t steps = 0;
  std::size_t truncated = 0;  // episodes stopped by the length guard
};

/// Episodic tabular Q-learning on any environment. Exploration and trajectory
/// sampling use separate streams derived from `seed`.
template <Environment E>
QTable q_learning(E& env, const Hyperparams& hp, double alpha, const StepRewardFn& reward,
                  std::uint64_t seed, LearnStats* stats = nullptr) {
  QTable q;
  RngHandle traj(seed, Stream::Trajectory);
  RngHandle explore(seed, Stream::Exploration);
  LearnStats local;
  const StateId start = env.initial();
  q.ensure(start, env.num_actions(start));

  for (std::size_t episode = 0; episode < hp.ep_n; ++episode) {
    StepReward last{};
    const auto policy = [&](StateId s) {
      return select_action(q, s, env.num_actions(s), hp.epsilon, explore);
    };
    const auto signal = [&](const TrajectoryStep& step) {
      last = reward(step, env.accepting(step.state));
      return last.reward;
    };
    const auto learn = [&](const TrajectoryStep& step) {
      ++local.steps;
      q.ensure(step.next, env.num_actions(step.next));
      q.count_visit(step.state, step.action);
      double beta = hp.beta;
      if (hp.rate == LearningRate::VisitDecay) {
        beta = std::max(beta, 1.0 / static_cast<double>(q.visits(step.state, step.action)));
      }
      q_update(q, step.state, step.action, step.reward, step.dwell, step.next, alpha, beta,
               last.terminal);
    };
    const auto stop = [&](const TrajectoryStep&) { return last.terminal; };
    const Trajectory t =
        run_episode(env, policy, signal, stop, traj, hp.ep_len, learn, /*record=*/false);
    ++local.episodes;
    if (t.truncated) ++local.truncated;
  }
  if (stats != nullptr) *stats = local;
  return q;
}

/// Outcome of learning on the lazily explored product. `env` refers to the
/// model and automaton passed in, which must outlive it.
struct LearnResult {
  OnlineProduct env;
  QTable q;
  Schedule schedule;  // greedy, indexed by env state id
  LearnStats stats;
  double alpha = 0.0;
};

/// Satisfaction semantics: on each transition leaving an accepting product
/// state a coin pays 1 with probability 1-ζ and ends the episode.
LearnResult learn_sat(const Ctmdp& m, const BuchiAutomaton& a, const Hyperparams& hp,
                      std::uint64_t seed);

/// Expectation semantics: fixed-length episodes paying the dwell time of every
/// accepting state left.
LearnResult learn_exp(const Ctmdp& m, const BuchiAutomaton& a, const Hyperparams& hp,
                      std::uint64_t seed);

/// Transfers a learned schedule onto the materialized product by matching
/// (model state, automaton state) origins and product actions. States the
/// learner never reached get their lowest-index choice.
Schedule to_product_schedule(const LearnResult& result, const ProductCtmdp& p);

}  // namespace ctmdp
