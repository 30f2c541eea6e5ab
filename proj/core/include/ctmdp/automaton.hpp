#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctmdp/model.hpp"

namespace ctmdp {

using AutState = std::uint32_t;
using AutStateSet = std::vector<AutState>;  // sorted, duplicate-free

/// Boolean formula over proposition indices, stored as a node pool.
class LabelFormula {
 public:
  enum class Kind : std::uint8_t { True, False, Prop, Not, And, Or };

  struct Node {
    Kind kind = Kind::True;
    std::uint32_t prop = 0;   // Kind::Prop
    std::int32_t lhs = -1;    // Not, And, Or
    std::int32_t rhs = -1;    // And, Or
  };

  static LabelFormula constant(bool value);
  static LabelFormula prop(std::uint32_t index);
  static LabelFormula negate(LabelFormula f);
  static LabelFormula conj(LabelFormula a, LabelFormula b);
  static LabelFormula disj(LabelFormula a, LabelFormula b);

  bool eval(Letter letter) const;
  /// Largest proposition index referenced, or -1 for constants.
  int max_prop() const;
  /// HOA label syntax, e.g. `!0 & 1`.
  std::string to_hoa() const;

 private:
  std::int32_t append(const LabelFormula& other);
  bool eval_node(std::int32_t n, Letter letter) const;
  void print_node(std::int32_t n, int parent_prec, std::string& out) const;

  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

struct AutEdge {
  LabelFormula guard;
  AutState target = 0;
};

/// Nondeterministic Büchi automaton over 2^AP with state-based acceptance.
/// Letters are bitsets over the automaton's own proposition indices.
struct BuchiAutomaton {
  std::vector<std::string> propositions;
  std::vector<std::string> state_names;  // may be empty strings
  std::vector<std::vector<AutEdge>> edges;
  std::vector<bool> accepting;
  AutState initial = 0;
  std::string name;

  std::size_t num_states() const noexcept { return edges.size(); }
  bool is_accepting(AutState q) const { return accepting.at(q); }
  bool is_deterministic() const;
};

/// δ(q, letter). Empty when no edge matches.
AutStateSet step(const BuchiAutomaton& a, AutState q, Letter letter);

/// δ applied to every state of `qs`.
AutStateSet step(const BuchiAutomaton& a, const AutStateSet& qs, Letter letter);

/// δ̂(qs, word), letter by letter. The empty word returns `qs`.
AutStateSet extended_step(const BuchiAutomaton& a, const AutStateSet& qs,
                          std::span<const Letter> word);

/// Throws ValidationError if the automaton is structurally broken (dangling
/// targets, out-of-range propositions, bad initial state).
void require_valid(const BuchiAutomaton& a);

/// Maps letters over a model's propositions onto the automaton's proposition indices.
class PropositionBinding {
 public:
  /// Throws ValidationError naming every automaton proposition absent from the model.
  PropositionBinding(const std::vector<std::string>& model_propositions,
                     const BuchiAutomaton& automaton);

  Letter translate(Letter model_letter) const noexcept;

 private:
  std::vector<int> aut_to_model_;
};

/// Automaton state along a single monitored CTMDP run, with the acceptance flag
/// of the most recent step.
struct MonitorState {
  AutState current = 0;
  bool accepting_hit = false;
};

}  // namespace ctmdp
