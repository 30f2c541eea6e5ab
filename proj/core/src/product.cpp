#include "ctmdp/product.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "ctmdp/errors.hpp"

namespace ctmdp {
namespace {

std::uint64_t key_of(StateId s, AutState q) {
  return (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint64_t>(q);
}

std::string aut_state_name(const BuchiAutomaton& a, AutState q) {
  if (q < a.state_names.size() && !a.state_names[q].empty()) return a.state_names[q];
  return "q" + std::to_string(q);
}

std::string pair_name(const Ctmdp& m, const BuchiAutomaton& a, StateId s, AutState q) {
  const std::string sn =
      s < m.state_names.size() && !m.state_names[s].empty() ? m.state_names[s] : std::to_string(s);
  return "(" + sn + "," + aut_state_name(a, q) + ")";
}

// Self-loop rate of the rejecting sink. Using the model's largest exit rate keeps
// the product's uniformization constant equal to the model's.
double reject_loop_rate(const Ctmdp& m) { return m.max_exit_rate(); }

}  // namespace

std::optional<StateId> ProductCtmdp::find(StateId model_state, AutState aut_state) const {
  if (model_state == kNoModelState) return reject_sink;
  for (StateId i = 0; i < origin.size(); ++i) {
    if (origin[i].model_state == model_state && origin[i].aut_state == aut_state) return i;
  }
  return std::nullopt;
}

ProductCtmdp ProductCtmdp::from_model(Ctmdp m, std::vector<bool> accepting) {
  require_valid(m);
  if (accepting.size() != m.num_states()) {
    throw ValidationError("accepting mask size differs from state count");
  }
  ProductCtmdp p;
  for (StateId s = 0; s < m.num_states(); ++s) p.origin.push_back({s, 0});
  for (ActionId a = 0; a < m.action_names.size(); ++a) p.actions.push_back({a, kNoAutChoice});
  p.model = std::move(m);
  p.accepting = std::move(accepting);
  return p;
}

ProductCtmdp build_product(const Ctmdp& m, const BuchiAutomaton& a) {
  require_valid(m);
  require_valid(a);
  const PropositionBinding binding(m.propositions, a);

  ProductCtmdp p;
  p.model.propositions = m.propositions;
  std::unordered_map<std::uint64_t, StateId> index;
  std::map<std::pair<ActionId, AutState>, ActionId> action_index;
  std::deque<StateId> queue;

  const auto action_id = [&](ActionId model_action, AutState choice) {
    auto [it, fresh] =
        action_index.emplace(std::make_pair(model_action, choice),
                             static_cast<ActionId>(p.actions.size()));
    if (fresh) {
      p.actions.push_back({model_action, choice});
      std::string name = model_action == kNoModelAction ? std::string("reject")
                                                        : m.action_names[model_action];
      if (choice != kNoAutChoice) name += "_" + aut_state_name(a, choice);
      p.model.action_names.push_back(name);
    }
    return it->second;
  };
  const auto add_state = [&](StateId s, AutState q) {
    auto [it, fresh] = index.emplace(key_of(s, q), static_cast<StateId>(p.origin.size()));
    if (fresh) {
      p.origin.push_back({s, q});
      p.accepting.push_back(a.is_accepting(q));
      p.model.labels.push_back(m.labels[s]);
      p.model.state_names.push_back(pair_name(m, a, s, q));
      p.model.choices.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  };
  const auto sink = [&] {
    if (!p.reject_sink) {
      p.reject_sink = static_cast<StateId>(p.origin.size());
      p.origin.push_back({});
      p.accepting.push_back(false);
      p.model.labels.push_back(0);
      p.model.state_names.push_back("reject");
      p.model.choices.emplace_back();
      const ActionId loop = action_id(kNoModelAction, kNoAutChoice);
      p.model.choices.back().push_back({loop, {{*p.reject_sink, reject_loop_rate(m)}}});
    }
    return *p.reject_sink;
  };

  p.model.initial = add_state(m.initial, a.initial);
  while (!queue.empty()) {
    const StateId x = queue.front();
    queue.pop_front();
    const auto [s, q] = p.origin[x];
    const AutStateSet succ = step(a, q, binding.translate(m.labels[s]));
    std::vector<Choice> out;
    for (const Choice& c : m.choices[s]) {
      if (succ.empty()) {
        const StateId t = sink();
        out.push_back({action_id(c.action, kNoAutChoice), {{t, exit_rate(c)}}});
        continue;
      }
      for (AutState q2 : succ) {
        Choice pc{action_id(c.action, succ.size() > 1 ? q2 : kNoAutChoice), {}};
        for (const Transition& t : c.transitions) {
          if (t.weight <= 0.0) continue;
          pc.transitions.push_back({add_state(t.target, q2), t.weight});
        }
        out.push_back(std::move(pc));
      }
    }
    std::sort(out.begin(), out.end(),
              [](const Choice& l, const Choice& r) { return l.action < r.action; });
    p.model.choices[x] = std::move(out);
  }
  return p;
}

Schedule AugmentedProduct::project(const Schedule& augmented) const {
  if (augmented.size() < base_states) throw ValidationError("schedule too short to project");
  return Schedule(augmented.begin(), augmented.begin() + static_cast<long>(base_states));
}

Schedule AugmentedProduct::lift(const Schedule& base) const {
  if (base.size() != base_states) throw ValidationError("schedule size differs from product");
  Schedule out = base;
  out.push_back(0);
  return out;
}

AugmentedProduct augment(const ProductCtmdp& p, double zeta, double sink_rate) {
  if (!(zeta > 0.0 && zeta < 1.0)) {
    throw ValidationError("zeta must lie strictly between 0 and 1, got " + std::to_string(zeta));
  }
  if (!(sink_rate > 0.0) || !std::isfinite(sink_rate)) {
    throw ValidationError("sink rate must be positive");
  }
  AugmentedProduct out;
  out.zeta = zeta;
  out.sink_rate = sink_rate;
  out.base_states = p.num_states();
  out.product = p;
  ProductCtmdp& q = out.product;
  const StateId t = static_cast<StateId>(p.num_states());
  out.sink = t;

  for (StateId s = 0; s < p.num_states(); ++s) {
    if (!p.accepting[s]) continue;
    for (Choice& c : q.model.choices[s]) {
      const double lambda = exit_rate(c);
      for (Transition& tr : c.transitions) tr.weight *= zeta;
      c.transitions.push_back({t, lambda * (1.0 - zeta)});
    }
  }
  const ActionId loop = static_cast<ActionId>(q.model.action_names.size());
  q.model.action_names.push_back("sink");
  q.actions.push_back({kNoModelAction, kNoAutChoice});
  q.model.choices.push_back({{loop, {{t, sink_rate}}}});
  q.model.labels.push_back(0);
  q.model.state_names.push_back("t");
  q.origin.push_back({});
  q.accepting.assign(p.num_states() + 1, false);
  q.accepting[t] = true;
  return out;
}

OnlineProduct::OnlineProduct(const Ctmdp& m, const BuchiAutomaton& a)
    : model_(&m), automaton_(&a), binding_(m.propositions, a) {
  require_valid(m);
  require_valid(a);
  intern(m.initial, a.initial);
}

StateId OnlineProduct::intern(StateId model_state, AutState aut_state) {
  auto [it, fresh] =
      index_.emplace(key_of(model_state, aut_state), static_cast<StateId>(origin_.size()));
  if (fresh) {
    origin_.push_back({model_state, aut_state});
    accepting_.push_back(automaton_->is_accepting(aut_state));
    expanded_.push_back(false);
    actions_.emplace_back();
    entries_.emplace_back();
  }
  return it->second;
}

StateId OnlineProduct::sink_id() {
  if (!sink_) {
    sink_ = static_cast<StateId>(origin_.size());
    origin_.push_back({});
    accepting_.push_back(false);
    expanded_.push_back(true);
    actions_.push_back({{kNoModelAction, kNoAutChoice}});
    entries_.push_back({{0, kNoAutChoice}});
  }
  return *sink_;
}

const std::vector<ProductAction>& OnlineProduct::expand(StateId s) {
  if (expanded_.at(s)) return actions_[s];
  const auto [ms, q] = origin_[s];
  const AutStateSet succ = step(*automaton_, q, binding_.translate(model_->labels[ms]));
  std::vector<ProductAction> acts;
  std::vector<Entry> entries;
  const auto& choices = model_->choices[ms];
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (succ.empty()) {
      acts.push_back({choices[i].action, kNoAutChoice});
      entries.push_back({i, kNoAutChoice});
      continue;
    }
    for (AutState q2 : succ) {
      acts.push_back({choices[i].action, succ.size() > 1 ? q2 : kNoAutChoice});
      entries.push_back({i, q2});
    }
  }
  expanded_[s] = true;
  actions_[s] = std::move(acts);
  entries_[s] = std::move(entries);
  return actions_[s];
}

Sample OnlineProduct::sample(StateId s, std::size_t a, RngHandle& rng) {
  expand(s);
  if (sink_ && s == *sink_) {
    const double u = rng.uniform();
    return {s, -std::log1p(-u) / reject_loop_rate(*model_)};
  }
  const Entry e = entries_[s].at(a);
  const StateId ms = origin_[s].model_state;
  const Sample x = sample_transition(*model_, ms, e.model_choice, rng);
  if (e.aut_next == kNoAutChoice) return {sink_id(), x.dwell};
  return {intern(x.next, e.aut_next), x.dwell};
}

const std::vector<ProductAction>& OnlineProduct::expanded_actions(StateId s) const {
  if (!is_expanded(s)) throw ValidationError("product state " + std::to_string(s) + " not explored");
  return actions_[s];
}

std::optional<StateId> OnlineProduct::find(StateId model_state, AutState aut_state) const {
  if (model_state == kNoModelState) return sink_;
  const auto it = index_.find(key_of(model_state, aut_state));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace ctmdp
