#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ctmdp/automaton.hpp"
#include "ctmdp/model.hpp"
#include "ctmdp/random.hpp"
#include "ctmdp/simulate.hpp"

namespace ctmdp {

inline constexpr AutState kNoAutChoice = std::numeric_limits<AutState>::max();
inline constexpr StateId kNoModelState = std::numeric_limits<StateId>::max();
inline constexpr ActionId kNoModelAction = std::numeric_limits<ActionId>::max();

/// Back-reference of a product state. The rejecting sink has no origin.
struct ProductOrigin {
  StateId model_state = kNoModelState;
  AutState aut_state = kNoAutChoice;

  bool is_sink() const noexcept { return model_state == kNoModelState; }
};

/// What a product action means in the underlying model: the model action and,
/// when δ(q, L(s)) is not a singleton, the automaton successor the agent picked.
struct ProductAction {
  ActionId model_action = 0;
  AutState aut_choice = kNoAutChoice;
};

/// Synchronous product M × A. The automaton reads the label of the state being
/// left: R×((s,q),(a,q'),(s',q')) = R(s,a,s') for q' ∈ δ(q, L(s)). Pairs with
/// δ(q, L(s)) = ∅ move (at the same exit rates) into one non-accepting sink.
struct ProductCtmdp {
  Ctmdp model;
  std::vector<ProductOrigin> origin;
  std::vector<bool> accepting;
  std::vector<ProductAction> actions;  // indexed by model.action_names id
  std::optional<StateId> reject_sink;

  std::size_t num_states() const noexcept { return model.num_states(); }
  std::optional<StateId> find(StateId model_state, AutState aut_state) const;

  /// A "product" that is just a model with an explicit accepting mask; each
  /// state's origin is (s, 0). Used for analysis of hand-built instances.
  static ProductCtmdp from_model(Ctmdp m, std::vector<bool> accepting);
};

/// Builds the reachable part of M × A. Throws ValidationError when the
/// automaton uses a proposition missing from the model.
ProductCtmdp build_product(const Ctmdp& m, const BuchiAutomaton& a);

/// Product with the sink t: outgoing rates of accepting states scaled by ζ and
/// a new edge to t carrying λ(s,a)·(1-ζ). t is the only accepting state.
struct AugmentedProduct {
  ProductCtmdp product;
  StateId sink = 0;
  std::size_t base_states = 0;
  double zeta = 0.0;
  double sink_rate = 1.0;

  /// Drops t from an augmented schedule.
  Schedule project(const Schedule& augmented) const;
  /// Extends a base schedule with t's only choice.
  Schedule lift(const Schedule& base) const;
};

/// Throws ValidationError unless 0 < zeta < 1 and sink_rate > 0.
AugmentedProduct augment(const ProductCtmdp& p, double zeta, double sink_rate = 1.0);

/// The product explored lazily during interaction: states get ids in the order
/// they are first reached, and nothing beyond them is ever enumerated.
class OnlineProduct {
 public:
  OnlineProduct(const Ctmdp& m, const BuchiAutomaton& a);
  // both arguments are referenced, not copied
  OnlineProduct(Ctmdp&&, const BuchiAutomaton&) = delete;
  OnlineProduct(const Ctmdp&, BuchiAutomaton&&) = delete;
  OnlineProduct(Ctmdp&&, BuchiAutomaton&&) = delete;

  StateId initial() const noexcept { return 0; }
  std::size_t num_actions(StateId s) { return expand(s).size(); }
  bool accepting(StateId s) const { return accepting_[s]; }
  Sample sample(StateId s, std::size_t a, RngHandle& rng);

  /// Product actions of `s` in choice order (model choice order, then automaton successor).
  const std::vector<ProductAction>& actions(StateId s) { return expand(s); }

  bool is_expanded(StateId s) const { return s < expanded_.size() && expanded_[s]; }
  /// Actions of an already expanded state. Throws ValidationError otherwise.
  const std::vector<ProductAction>& expanded_actions(StateId s) const;

  std::size_t num_discovered() const noexcept { return origin_.size(); }
  const ProductOrigin& origin(StateId s) const { return origin_[s]; }
  std::optional<StateId> find(StateId model_state, AutState aut_state) const;

 private:
  struct Entry {
    std::size_t model_choice;
    AutState aut_next;  // kNoAutChoice: run rejected, move to sink
  };

  StateId intern(StateId model_state, AutState aut_state);
  StateId sink_id();
  const std::vector<ProductAction>& expand(StateId s);

  const Ctmdp* model_;
  const BuchiAutomaton* automaton_;
  PropositionBinding binding_;
  std::unordered_map<std::uint64_t, StateId> index_;
  std::vector<ProductOrigin> origin_;
  std::vector<bool> accepting_;
  std::vector<bool> expanded_;
  std::vector<std::vector<ProductAction>> actions_;
  std::vector<std::vector<Entry>> entries_;
  std::optional<StateId> sink_;
};

}  // namespace ctmdp
