#pragma once

#include <cstddef>
#include <vector>

#include "ctmdp/model.hpp"
#include "ctmdp/product.hpp"

namespace ctmdp {

/// Rewards of a rewardful CTMDP: a reward rate per state (earned per unit of
/// time spent there) and a lump sum per state-action pair (earned on each jump).
struct RewardSpec {
  std::vector<double> state_rate;                 // empty means all zero
  std::vector<std::vector<double>> action_reward; // [state][choice]; empty means all zero

  double rate(StateId s) const { return state_rate.empty() ? 0.0 : state_rate[s]; }
  double lump(StateId s, std::size_t choice) const {
    return action_reward.empty() ? 0.0 : action_reward[s][choice];
  }

  /// rew(s) = 1 on `states`, 0 elsewhere; no action rewards.
  static RewardSpec indicator(const std::vector<bool>& states);
};

/// Values per state with the schedule that attains them.
struct CheckResult {
  std::vector<double> values;
  Schedule schedule;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct SolverOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 1'000'000;
};

/// α for which the uniformized discount C/(C+α) equals γ: α = C(1-γ)/γ.
double discount_rate_for(double gamma, double cap);

/// One-step expected discounted reward ρ(s,a) = rew(s,a) + rew(s)/(α+λ(s,a)).
double one_step_reward(const Ctmdp& m, const RewardSpec& r, StateId s, std::size_t choice,
                       double alpha);

/// DR^{M[σ]}(α) by a direct sparse solve of
/// v = ρ(s,σ) + γ_α(s,σ) Σ P(s,σ,s') v(s'),  γ_α = λ/(λ+α).
std::vector<double> discounted_value(const Ctmdp& m, const RewardSpec& r, const Schedule& sigma,
                                     double alpha);

/// The same value computed on the uniform model M_C with per-step reward
/// ρ(s,a)(α+λ)/(α+C) and constant discount C/(C+α).
std::vector<double> discounted_value_uniformized(const Ctmdp& m, const RewardSpec& r,
                                                 const Schedule& sigma, double alpha, double cap);

/// Discounted-optimal pure schedule: policy iteration on the uniformized model.
CheckResult discounted_optimal(const Ctmdp& m, const RewardSpec& r, double alpha,
                               const SolverOptions& opts = {});

/// Q*(s, choice) = ρ(s,a) + γ_α(s,a) Σ P(s,a,s') max Q*(s',.) for the optimal values.
std::vector<std::vector<double>> discounted_q_values(const Ctmdp& m, const RewardSpec& r,
                                                     double alpha, const SolverOptions& opts = {});

/// Expected long-run average reward per unit time under σ, per start state.
/// Built from the stationary distributions of the bottom SCCs of the
/// uniformized chain and the absorption probabilities into them.
std::vector<double> average_value(const Ctmdp& m, const RewardSpec& r, const Schedule& sigma);

/// Per-step gain of the uniform model M_C (uniformized at `cap`). Multiplying by
/// `cap` gives average_value.
std::vector<double> average_value_uniformized(const Ctmdp& m, const RewardSpec& r,
                                              const Schedule& sigma, double cap);

/// Average-optimal pure schedule by multichain policy iteration (gain and bias
/// improvement) on the uniformized model; values are per unit time.
CheckResult average_optimal(const Ctmdp& m, const RewardSpec& r, const SolverOptions& opts = {});

/// Optimal probability of visiting accepting states infinitely often: maximal
/// probability, on the embedded MDP, of reaching an accepting end-component.
CheckResult psem_optimal(const ProductCtmdp& p, double tol = 1e-10);

/// Optimal long-run fraction of time spent in accepting states.
CheckResult esem_optimal(const ProductCtmdp& p, double tol = 1e-10);

/// Probability, under σ, of ending in a bottom SCC that contains an accepting state.
std::vector<double> psem_of(const ProductCtmdp& p, const Schedule& sigma);

/// Long-run fraction of time in accepting states under σ. Exactly
/// average_value(p.model, RewardSpec::indicator(p.accepting), sigma).
std::vector<double> esem_of(const ProductCtmdp& p, const Schedule& sigma);

/// Maximal probability of reaching `target` on the embedded MDP (value iteration
/// from zero), with a schedule realizing it.
CheckResult max_reachability(const Ctmdp& m, const std::vector<bool>& target,
                             const SolverOptions& opts = {});

/// Maximal probability of reaching `target` within `jumps` steps of the embedded
/// MDP: the iterate after that many synchronous value-iteration sweeps from zero.
std::vector<double> bounded_reachability(const Ctmdp& m, const std::vector<bool>& target,
                                         std::size_t jumps);

/// Probability of reaching `target` under σ on the embedded chain.
std::vector<double> reachability_of(const Ctmdp& m, const std::vector<bool>& target,
                                    const Schedule& sigma);

struct BlackwellStep {
  double gamma = 0.0;
  double alpha = 0.0;
  Schedule schedule;
  bool same_as_previous = false;
  /// Largest shortfall of this schedule's average value below the optimal gain.
  double gain_gap = 0.0;
};

struct BlackwellReport {
  std::vector<BlackwellStep> steps;
  CheckResult average;  // average-optimal values and schedule, for comparison
  bool stabilized = false;            // last two schedules coincide
  bool final_average_optimal = false; // last schedule's gain gap below 1e-6
};

/// Discounted-optimal schedules for increasing discount factors γ of the
/// uniformized model, compared against the average-optimal schedule.
/// Reports empirical stabilization only; no threshold is certified.
BlackwellReport blackwell_probe(const Ctmdp& m, const RewardSpec& r,
                                const std::vector<double>& gammas);

}  // namespace ctmdp
