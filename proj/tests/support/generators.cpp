#include "generators.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ctmdp::test {

Ctmdp make_model(std::size_t num_states, const std::vector<Edge>& edges,
                 const std::vector<std::string>& propositions,
                 const std::vector<std::vector<std::string>>& labels) {
  Ctmdp m;
  m.propositions = propositions;
  m.labels.assign(num_states, 0);
  m.choices.resize(num_states);
  for (std::size_t s = 0; s < num_states; ++s) m.state_names.push_back("s" + std::to_string(s));
  for (std::size_t s = 0; s < labels.size(); ++s) {
    for (const std::string& name : labels[s]) {
      const auto it = std::find(propositions.begin(), propositions.end(), name);
      if (it == propositions.end()) throw std::invalid_argument("unknown proposition " + name);
      m.labels[s] |= Letter{1} << (it - propositions.begin());
    }
  }
  for (const Edge& e : edges) {
    ActionId a = 0;
    if (auto found = m.find_action(e.action)) {
      a = *found;
    } else {
      a = static_cast<ActionId>(m.action_names.size());
      m.action_names.push_back(e.action);
    }
    auto& cs = m.choices.at(e.from);
    auto it = std::find_if(cs.begin(), cs.end(), [&](const Choice& c) { return c.action == a; });
    if (it == cs.end()) {
      cs.push_back(Choice{a, {}});
      it = cs.end() - 1;
    }
    it->transitions.push_back(Transition{e.to, e.rate});
  }
  for (auto& cs : m.choices) {
    std::sort(cs.begin(), cs.end(),
              [](const Choice& x, const Choice& y) { return x.action < y.action; });
  }
  return m;
}

namespace {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t below(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

Ctmdp random_model(Rng& rng, const ModelShape& shape) {
  const std::size_t n = shape.states;
  Ctmdp m;
  for (std::size_t a = 0; a < shape.max_actions; ++a) m.action_names.push_back("a" + std::to_string(a));
  for (std::size_t p = 0; p < shape.propositions; ++p) m.propositions.push_back("p" + std::to_string(p));
  m.choices.resize(n);
  m.labels.resize(n);
  for (StateId s = 0; s < n; ++s) {
    m.state_names.push_back("s" + std::to_string(s));
    m.labels[s] = shape.propositions == 0 ? 0 : rng() & ((Letter{1} << shape.propositions) - 1);
    std::vector<ActionId> pool(shape.max_actions);
    for (std::size_t a = 0; a < pool.size(); ++a) pool[a] = static_cast<ActionId>(a);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(1 + below(rng, shape.max_actions));
    std::sort(pool.begin(), pool.end());
    for (ActionId a : pool) {
      Choice c{a, {}};
      std::vector<StateId> targets(n);
      for (StateId t = 0; t < n; ++t) targets[t] = t;
      std::shuffle(targets.begin(), targets.end(), rng);
      targets.resize(1 + below(rng, std::min(shape.max_successors, n)));
      std::sort(targets.begin(), targets.end());
      for (StateId t : targets) c.transitions.push_back({t, uniform(rng, shape.min_rate, shape.max_rate)});
      m.choices[s].push_back(std::move(c));
    }
  }
  // every state reachable from 0: hook s onto a random earlier state
  for (StateId s = 1; s < n; ++s) {
    const StateId from = static_cast<StateId>(below(rng, s));
    Choice& c = m.choices[from][below(rng, m.choices[from].size())];
    const bool present = std::any_of(c.transitions.begin(), c.transitions.end(),
                                     [&](const Transition& t) { return t.target == s; });
    if (!present) {
      c.transitions.push_back({s, uniform(rng, shape.min_rate, shape.max_rate)});
      std::sort(c.transitions.begin(), c.transitions.end(),
                [](const Transition& x, const Transition& y) { return x.target < y.target; });
    }
  }
  return m;
}

ProductCtmdp random_product(Rng& rng, const ModelShape& shape, double p_accepting) {
  Ctmdp m = random_model(rng, shape);
  std::vector<bool> acc(m.num_states());
  std::bernoulli_distribution coin(p_accepting);
  for (std::size_t s = 0; s < acc.size(); ++s) acc[s] = coin(rng);
  return ProductCtmdp::from_model(std::move(m), std::move(acc));
}

RewardSpec random_rewards(Rng& rng, const Ctmdp& m) {
  RewardSpec r;
  std::bernoulli_distribution has_rate(0.7), has_lump(0.3);
  for (StateId s = 0; s < m.num_states(); ++s) {
    r.state_rate.push_back(has_rate(rng) ? uniform(rng, 0.0, 2.0) : 0.0);
    std::vector<double> lumps;
    for (std::size_t c = 0; c < m.choices[s].size(); ++c) {
      lumps.push_back(has_lump(rng) ? uniform(rng, 0.0, 1.0) : 0.0);
    }
    r.action_reward.push_back(std::move(lumps));
  }
  return r;
}

LabelFormula random_formula(Rng& rng, std::size_t props, int depth) {
  if (depth <= 0 || below(rng, 4) == 0) {
    const std::size_t pick = below(rng, props + 2);
    if (pick == props) return LabelFormula::constant(true);
    if (pick == props + 1) return LabelFormula::constant(false);
    return LabelFormula::prop(static_cast<std::uint32_t>(pick));
  }
  switch (below(rng, 3)) {
    case 0:
      return LabelFormula::negate(random_formula(rng, props, depth - 1));
    case 1:
      return LabelFormula::conj(random_formula(rng, props, depth - 1),
                                random_formula(rng, props, depth - 1));
    default:
      return LabelFormula::disj(random_formula(rng, props, depth - 1),
                                random_formula(rng, props, depth - 1));
  }
}

BuchiAutomaton random_automaton(Rng& rng, std::size_t states, std::size_t props) {
  BuchiAutomaton a;
  for (std::size_t p = 0; p < props; ++p) a.propositions.push_back("p" + std::to_string(p));
  a.edges.resize(states);
  a.accepting.resize(states);
  for (std::size_t q = 0; q < states; ++q) {
    a.state_names.push_back(below(rng, 2) == 0 ? "" : "q" + std::to_string(q));
    a.accepting[q] = below(rng, 3) == 0;
    const std::size_t k = 1 + below(rng, 3);
    for (std::size_t i = 0; i < k; ++i) {
      a.edges[q].push_back(
          AutEdge{random_formula(rng, props, 3), static_cast<AutState>(below(rng, states))});
    }
  }
  a.initial = static_cast<AutState>(below(rng, states));
  return a;
}

Schedule random_schedule(Rng& rng, const Ctmdp& m) {
  Schedule s(m.num_states());
  for (StateId x = 0; x < m.num_states(); ++x) s[x] = below(rng, m.choices[x].size());
  return s;
}

std::size_t count_schedules(const Ctmdp& m, std::size_t cap) {
  std::size_t n = 1;
  for (const auto& cs : m.choices) {
    n *= cs.size();
    if (n >= cap) return cap;
  }
  return n;
}

}  // namespace ctmdp::test
