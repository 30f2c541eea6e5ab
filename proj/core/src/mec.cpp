#include "ctmdp/mec.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace ctmdp {

bool EndComponent::contains(StateId s) const {
  return std::binary_search(states.begin(), states.end(), s);
}

std::vector<std::size_t> strongly_connected_components(
    const std::vector<std::vector<StateId>>& adjacency, std::size_t& num_components) {
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  const std::size_t n = adjacency.size();
  std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<bool> on_stack(n, false);
  std::vector<StateId> stack;
  // explicit DFS frames (vertex, next edge position) instead of recursion
  std::vector<std::pair<StateId, std::size_t>> frames;
  std::size_t counter = 0;
  num_components = 0;

  for (StateId root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < adjacency[v].size()) {
        const StateId w = adjacency[v][pos++];
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const StateId done = v;
      frames.pop_back();
      if (!frames.empty()) {
        const StateId parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        StateId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = num_components;
        } while (w != done);
        ++num_components;
      }
    }
  }
  return comp;
}

MecSet mec_decompose(const EmbeddedMdp& e, const std::vector<bool>& accepting) {
  return mec_decompose(e, accepting, std::vector<bool>(e.num_states(), true));
}

MecSet mec_decompose(const EmbeddedMdp& e, const std::vector<bool>& accepting,
                     const std::vector<bool>& allowed) {
  const std::size_t n = e.num_states();
  std::vector<bool> alive(n);
  std::vector<std::vector<bool>> live_choice(n);
  for (StateId s = 0; s < n; ++s) {
    alive[s] = s < allowed.size() && allowed[s];
    live_choice[s].assign(e.choices[s].size(), alive[s]);
  }

  std::vector<std::size_t> scc;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<StateId>> adj(n);
    for (StateId s = 0; s < n; ++s) {
      if (!alive[s]) continue;
      for (std::size_t i = 0; i < e.choices[s].size(); ++i) {
        if (!live_choice[s][i]) continue;
        for (const auto& t : e.choices[s][i].transitions) {
          if (alive[t.target]) adj[s].push_back(t.target);
        }
      }
    }
    std::size_t count = 0;
    scc = strongly_connected_components(adj, count);

    for (StateId s = 0; s < n; ++s) {
      if (!alive[s]) continue;
      bool any = false;
      for (std::size_t i = 0; i < e.choices[s].size(); ++i) {
        if (!live_choice[s][i]) continue;
        const bool leaves = std::any_of(
            e.choices[s][i].transitions.begin(), e.choices[s][i].transitions.end(),
            [&](const Transition& t) { return !alive[t.target] || scc[t.target] != scc[s]; });
        if (leaves) {
          live_choice[s][i] = false;
          changed = true;
        } else {
          any = true;
        }
      }
      if (!any) {
        alive[s] = false;
        changed = true;
      }
    }
  }

  MecSet out;
  out.component_of.assign(n, MecSet::kNone);
  std::vector<std::size_t> slot_of_scc;
  for (StateId s = 0; s < n; ++s) {
    if (!alive[s]) continue;
    if (scc[s] >= slot_of_scc.size()) slot_of_scc.resize(scc[s] + 1, MecSet::kNone);
    std::size_t& slot = slot_of_scc[scc[s]];
    if (slot == MecSet::kNone) {
      slot = out.components.size();
      out.components.emplace_back();
    }
    EndComponent& c = out.components[slot];
    c.states.push_back(s);
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < live_choice[s].size(); ++i) {
      if (live_choice[s][i]) kept.push_back(i);
    }
    c.choices.push_back(std::move(kept));
    if (s < accepting.size() && accepting[s]) c.accepting = true;
    out.component_of[s] = slot;
  }
  return out;
}

}  // namespace ctmdp
