#include "ctmdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctmdp/errors.hpp"

namespace ctmdp {

std::size_t Ctmdp::num_choices() const noexcept {
  std::size_t n = 0;
  for (const auto& cs : choices) n += cs.size();
  return n;
}

std::optional<std::size_t> Ctmdp::choice_index(StateId s, ActionId action) const {
  const auto& cs = choices.at(s);
  const auto it = std::lower_bound(cs.begin(), cs.end(), action,
                                   [](const Choice& c, ActionId a) { return c.action < a; });
  if (it == cs.end() || it->action != action) return std::nullopt;
  return static_cast<std::size_t>(it - cs.begin());
}

std::optional<ActionId> Ctmdp::find_action(const std::string& name) const {
  for (std::size_t i = 0; i < action_names.size(); ++i) {
    if (action_names[i] == name) return static_cast<ActionId>(i);
  }
  return std::nullopt;
}

std::optional<StateId> Ctmdp::find_state(const std::string& name) const {
  for (std::size_t i = 0; i < state_names.size(); ++i) {
    if (state_names[i] == name) return static_cast<StateId>(i);
  }
  return std::nullopt;
}

double Ctmdp::max_exit_rate() const {
  double best = 0.0;
  for (const auto& cs : choices) {
    for (const auto& c : cs) best = std::max(best, exit_rate(c));
  }
  return best;
}

double exit_rate(const Choice& c) noexcept {
  double sum = 0.0;
  for (const auto& t : c.transitions) sum += t.weight;
  return sum;
}

double exit_rate(const Ctmdp& m, StateId s, ActionId action) {
  if (s >= m.num_states()) throw ValidationError("state " + std::to_string(s) + " out of range");
  const auto idx = m.choice_index(s, action);
  if (!idx) {
    const std::string name =
        action < m.action_names.size() ? m.action_names[action] : std::to_string(action);
    throw ValidationError("action '" + name + "' is not enabled in state " + std::to_string(s));
  }
  return exit_rate(m.choices[s][*idx]);
}

EmbeddedMdp embed(const Ctmdp& m) {
  EmbeddedMdp e;
  e.initial = m.initial;
  e.choices.resize(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (const auto& c : m.choices[s]) {
      const double lambda = exit_rate(c);
      Choice out{c.action, {}};
      out.transitions.reserve(c.transitions.size());
      for (const auto& t : c.transitions) {
        if (t.weight > 0.0) out.transitions.push_back({t.target, t.weight / lambda});
      }
      e.choices[s].push_back(std::move(out));
    }
  }
  return e;
}

Ctmdp uniformize(const Ctmdp& m, double cap) {
  const double lmax = m.max_exit_rate();
  if (!(cap >= lmax) || !std::isfinite(cap)) {
    throw ValidationError("uniformization constant " + std::to_string(cap) +
                          " is below the largest exit rate " + std::to_string(lmax));
  }
  Ctmdp u = m;
  for (StateId s = 0; s < u.num_states(); ++s) {
    for (auto& c : u.choices[s]) {
      const double extra = cap - exit_rate(c);
      if (extra <= 0.0) continue;
      auto it = std::find_if(c.transitions.begin(), c.transitions.end(),
                             [s](const Transition& t) { return t.target == s; });
      if (it != c.transitions.end()) {
        it->weight += extra;
      } else {
        c.transitions.push_back({s, extra});
      }
    }
  }
  return u;
}

Ctmdp uniformize(const Ctmdp& m) { return uniformize(m, m.max_exit_rate()); }

std::vector<Violation> validate(const Ctmdp& m) {
  std::vector<Violation> out;
  const std::size_t n = m.num_states();
  const auto add = [&](std::optional<StateId> s, std::optional<ActionId> a, const char* rule,
                       std::string msg) { out.push_back({s, a, rule, std::move(msg)}); };

  if (n == 0) {
    add(std::nullopt, std::nullopt, "nonempty", "model has no states");
    return out;
  }
  if (m.initial >= n) add(std::nullopt, std::nullopt, "initial", "initial state out of range");
  if (m.labels.size() != n) {
    add(std::nullopt, std::nullopt, "labels", "label table size differs from state count");
  }
  if (!m.state_names.empty() && m.state_names.size() != n) {
    add(std::nullopt, std::nullopt, "names", "state name table size differs from state count");
  }
  if (m.propositions.size() > kMaxPropositions) {
    add(std::nullopt, std::nullopt, "propositions", "more than 64 atomic propositions");
  }
  const Letter allowed = m.propositions.size() >= 64
                             ? ~Letter{0}
                             : ((Letter{1} << m.propositions.size()) - 1);

  for (StateId s = 0; s < n; ++s) {
    if (s < m.labels.size() && (m.labels[s] & ~allowed) != 0) {
      add(s, std::nullopt, "label", "label uses an undeclared proposition");
    }
    const auto& cs = m.choices[s];
    if (cs.empty()) {
      add(s, std::nullopt, "enabled", "state " + std::to_string(s) + " has no enabled action");
      continue;
    }
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const Choice& c = cs[i];
      if (i > 0 && cs[i - 1].action >= c.action) {
        add(s, c.action, "order", "choices are not sorted by action id");
      }
      if (c.action >= m.action_names.size()) {
        add(s, c.action, "action", "action id out of range");
      }
      bool bad = false;
      for (const auto& t : c.transitions) {
        if (t.target >= n) {
          add(s, c.action, "target", "transition target out of range");
          bad = true;
        } else if (!std::isfinite(t.weight) || t.weight < 0.0) {
          add(s, c.action, "rate", "negative or non-finite rate");
          bad = true;
        }
      }
      if (!bad && !(exit_rate(c) > 0.0)) {
        add(s, c.action, "exit-rate", "zero exit rate in state " + std::to_string(s));
      }
    }
  }
  return out;
}

void require_valid(const Ctmdp& m) {
  const auto v = validate(m);
  if (v.empty()) return;
  std::ostringstream msg;
  msg << "invalid model: " << v.front().message;
  if (v.front().state) msg << " (state " << *v.front().state << ")";
  if (v.front().action && *v.front().action < m.action_names.size()) {
    msg << " (action " << m.action_names[*v.front().action] << ")";
  }
  if (v.size() > 1) msg << " and " << v.size() - 1 << " more";
  throw ValidationError(msg.str());
}

std::string format_letter(const std::vector<std::string>& propositions, Letter letter) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < propositions.size() && i < kMaxPropositions; ++i) {
    if ((letter >> i) & 1U) {
      if (!first) out += ",";
      out += propositions[i];
      first = false;
    }
  }
  return out + "}";
}

}  // namespace ctmdp
