#pragma once

#include <cstddef>
#include <vector>

#include "ctmdp/model.hpp"

namespace ctmdp {

/// A maximal end-component: a state set with, for each member, the retained
/// choice indices whose support stays inside the component.
struct EndComponent {
  std::vector<StateId> states;                      // sorted
  std::vector<std::vector<std::size_t>> choices;    // parallel to `states`
  bool accepting = false;

  bool contains(StateId s) const;
};

struct MecSet {
  std::vector<EndComponent> components;
  /// component index per state, or kNone for states outside every MEC.
  std::vector<std::size_t> component_of;

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
};

/// Maximal end-component decomposition by iterated SCC pruning.
/// `accepting` is indexed by state; a component is flagged accepting iff it
/// contains at least one accepting state. An empty `accepting` flags nothing.
MecSet mec_decompose(const EmbeddedMdp& e, const std::vector<bool>& accepting = {});

/// Restricts the decomposition to the states in `allowed` (states outside keep no choices).
MecSet mec_decompose(const EmbeddedMdp& e, const std::vector<bool>& accepting,
                     const std::vector<bool>& allowed);

/// Strongly connected components of the graph given by adjacency lists.
/// Returns component index per vertex; components are numbered in reverse
/// topological order (sinks first), as produced by Tarjan's algorithm.
std::vector<std::size_t> strongly_connected_components(
    const std::vector<std::vector<StateId>>& adjacency, std::size_t& num_components);

}  // namespace ctmdp
