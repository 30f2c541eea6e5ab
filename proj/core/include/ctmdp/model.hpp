#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ctmdp {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

/// Set of atomic propositions, one bit per AP index (at most 64 propositions).
using Letter = std::uint64_t;

inline constexpr std::size_t kMaxPropositions = 64;

/// Outgoing edge of a state-action pair. `weight` is a rate in a Ctmdp and a
/// probability in an EmbeddedMdp.
struct Transition {
  StateId target = 0;
  double weight = 0.0;
};

/// An action enabled in a state together with its outgoing edges.
struct Choice {
  ActionId action = 0;
  std::vector<Transition> transitions;
};

/// Finite labelled continuous-time MDP. States and actions are dense ids; names
/// live in side tables. choices[s] lists the enabled actions of s in increasing
/// action-id order.
struct Ctmdp {
  std::vector<std::string> state_names;
  std::vector<std::string> action_names;
  std::vector<std::string> propositions;
  std::vector<Letter> labels;
  std::vector<std::vector<Choice>> choices;
  StateId initial = 0;

  std::size_t num_states() const noexcept { return choices.size(); }
  std::size_t num_choices() const noexcept;
  const Choice& choice(StateId s, std::size_t index) const { return choices.at(s).at(index); }

  /// Index of `action` within choices[s], if enabled.
  std::optional<std::size_t> choice_index(StateId s, ActionId action) const;
  std::optional<ActionId> find_action(const std::string& name) const;
  std::optional<StateId> find_state(const std::string& name) const;

  /// Largest exit rate over all enabled state-action pairs.
  double max_exit_rate() const;
};

/// Discrete-time view of a Ctmdp: transition weights are P(s,a,s') = R(s,a,s') / λ(s,a).
/// Shares the choice layout (same indices) of its source model.
struct EmbeddedMdp {
  std::vector<std::vector<Choice>> choices;
  StateId initial = 0;

  std::size_t num_states() const noexcept { return choices.size(); }
};

/// A pure stationary schedule: for each state, the index of the chosen entry in choices[s].
using Schedule = std::vector<std::size_t>;

/// Sum of outgoing rates λ(s,a). Throws ValidationError if `action` is not enabled in `s`.
double exit_rate(const Ctmdp& m, StateId s, ActionId action);
double exit_rate(const Choice& c) noexcept;

EmbeddedMdp embed(const Ctmdp& m);

/// Uniform CTMDP with every exit rate equal to `cap`, obtained by adding
/// self-loop mass cap - λ(s,a). Throws ValidationError if cap < max λ(s,a).
Ctmdp uniformize(const Ctmdp& m, double cap);

/// Uniformization at the tightest legal constant, max λ(s,a).
Ctmdp uniformize(const Ctmdp& m);

struct Violation {
  std::optional<StateId> state;
  std::optional<ActionId> action;
  std::string rule;
  std::string message;
};

/// Checks the structural invariants of a Ctmdp. Never throws.
std::vector<Violation> validate(const Ctmdp& m);

/// Throws ValidationError describing the first violation, if any.
void require_valid(const Ctmdp& m);

/// Letter rendered as `{p,g}` using the model's proposition names.
std::string format_letter(const std::vector<std::string>& propositions, Letter letter);

}  // namespace ctmdp
