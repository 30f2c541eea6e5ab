#include "ctmdp/simulate.hpp"

#include <cmath>

#include "ctmdp/errors.hpp"

namespace ctmdp {

Sample sample_transition(const Ctmdp& m, StateId s, std::size_t choice, RngHandle& rng) {
  if (s >= m.num_states() || choice >= m.choices[s].size()) {
    throw ValidationError("choice " + std::to_string(choice) + " is not enabled in state " +
                          std::to_string(s));
  }
  const Choice& c = m.choices[s][choice];
  const double lambda = exit_rate(c);
  Sample out;
  out.dwell = -std::log1p(-rng.uniform()) / lambda;
  const double target = rng.uniform() * lambda;
  double acc = 0.0;
  for (const Transition& t : c.transitions) {
    if (t.weight <= 0.0) continue;
    acc += t.weight;
    out.next = t.target;  // rounding can leave target == acc at the end
    if (target < acc) {
      out.next = t.target;
      break;
    }
  }
  return out;
}

Sample sample_action(const Ctmdp& m, StateId s, ActionId action, RngHandle& rng) {
  if (s >= m.num_states()) throw ValidationError("state out of range");
  const auto idx = m.choice_index(s, action);
  if (!idx) {
    throw ValidationError("action " + std::to_string(action) + " is not enabled in state " +
                          std::to_string(s));
  }
  return sample_transition(m, s, *idx, rng);
}

ModelEnv::ModelEnv(const Ctmdp& m, std::vector<bool> accepting)
    : model_(&m), accepting_(std::move(accepting)) {
  if (!accepting_.empty() && accepting_.size() != m.num_states()) {
    throw ValidationError("accepting mask size differs from state count");
  }
}

}  // namespace ctmdp
