#include "ctmdp/learn.hpp"

#include <algorithm>
#include <string>

namespace ctmdp {

void Hyperparams::validate() const {
  const auto bad = [](const std::string& what) { throw ValidationError("invalid " + what); };
  if (!(alpha >= 0.0)) bad("alpha: must be nonnegative");
  if (alpha == 0.0 && gamma != 0.0 && !(gamma > 0.0 && gamma < 1.0)) {
    bad("gamma: must lie in (0,1)");
  }
  if (!(beta > 0.0 && beta <= 1.0)) bad("beta: must lie in (0,1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) bad("epsilon: must lie in [0,1]");
  if (!(zeta > 0.0 && zeta < 1.0)) bad("zeta: must lie in (0,1)");
  if (ep_len == 0) bad("episode length: must be positive");
  if (ep_n == 0) bad("episode count: must be positive");
  if (!(tol > 0.0)) bad("tolerance: must be positive");
}

double Hyperparams::discount_rate(double cap, double fallback) const {
  if (alpha > 0.0) return alpha;
  const double g = gamma != 0.0 ? gamma : fallback;
  return cap * (1.0 - g) / g;
}

void QTable::ensure(StateId s, std::size_t num_actions) {
  if (s >= values_.size()) {
    values_.resize(s + 1);
    visits_.resize(s + 1);
  }
  if (values_[s].empty()) {
    values_[s].assign(num_actions, 0.0);
    visits_[s].assign(num_actions, 0);
  }
}

double QTable::max_value(StateId s) const {
  if (!known(s)) return 0.0;
  return *std::max_element(values_[s].begin(), values_[s].end());
}

std::size_t QTable::argmax(StateId s) const {
  if (!known(s)) return 0;
  const auto& row = values_[s];
  // max_element returns the first maximizer, i.e. the lowest index
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

double q_update_towards(QTable& q, StateId s, std::size_t a, double reward, double tau,
                        double target, double alpha, double beta) {
  double& v = q.at(s, a);
  v = (1.0 - beta) * v + beta * (reward + std::exp(-alpha * tau) * target);
  return v;
}

double q_update(QTable& q, StateId s, std::size_t a, double reward, double tau, StateId next,
                double alpha, double beta, bool terminal) {
  const double target = terminal ? 0.0 : q.max_value(next);
  return q_update_towards(q, s, a, reward, tau, target, alpha, beta);
}

std::size_t select_action(const QTable& q, StateId s, std::size_t num_actions, double epsilon,
                          RngHandle& rng) {
  if (num_actions == 0) {
    throw ValidationError("state " + std::to_string(s) + " has no enabled action");
  }
  if (rng.uniform() < epsilon) return static_cast<std::size_t>(rng.below(num_actions));
  const std::size_t best = q.argmax(s);
  return best < num_actions ? best : 0;
}

Schedule extract_schedule(const QTable& q) {
  Schedule out(q.num_states(), 0);
  for (StateId s = 0; s < q.num_states(); ++s) out[s] = q.argmax(s);
  return out;
}

namespace {

LearnResult run(const Ctmdp& m, const BuchiAutomaton& a, const Hyperparams& hp,
                std::uint64_t seed, bool satisfaction) {
  hp.validate();
  LearnResult result{OnlineProduct(m, a), {}, {}, {}, 0.0};
  result.alpha = hp.discount_rate(m.max_exit_rate(), satisfaction ? kSatGamma : kExpGamma);
  StepRewardFn reward;
  SatReward coin(hp.zeta, RngHandle(seed, Stream::Coin));
  if (satisfaction) {
    reward = [&coin](const TrajectoryStep&, bool from_accepting) {
      const SatOutcome o = coin(from_accepting);
      return StepReward{o.reward, o.terminal};
    };
  } else {
    reward = [](const TrajectoryStep& step, bool from_accepting) {
      return StepReward{exp_reward(from_accepting, step.dwell), false};
    };
  }
  result.q = q_learning(result.env, hp, result.alpha, reward, seed, &result.stats);
  result.schedule = extract_schedule(result.q);
  return result;
}

}  // namespace

LearnResult learn_sat(const Ctmdp& m, const BuchiAutomaton& a, const Hyperparams& hp,
                      std::uint64_t seed) {
  return run(m, a, hp, seed, true);
}

LearnResult learn_exp(const Ctmdp& m, const BuchiAutomaton& a, const Hyperparams& hp,
                      std::uint64_t seed) {
  return run(m, a, hp, seed, false);
}

Schedule to_product_schedule(const LearnResult& result, const ProductCtmdp& p) {
  Schedule out(p.num_states(), 0);
  for (StateId x = 0; x < p.num_states(); ++x) {
    const ProductOrigin& o = p.origin[x];
    if (o.is_sink()) continue;
    const auto id = result.env.find(o.model_state, o.aut_state);
    if (!id || !result.q.known(*id) || !result.env.is_expanded(*id)) continue;
    const ProductAction& want = result.env.expanded_actions(*id).at(result.schedule.at(*id));
    const auto& choices = p.model.choices[x];
    for (std::size_t i = 0; i < choices.size(); ++i) {
      const ProductAction& have = p.actions[choices[i].action];
      if (have.model_action == want.model_action && have.aut_choice == want.aut_choice) {
        out[x] = i;
        break;
      }
    }
  }
  return out;
}

}  // namespace ctmdp
