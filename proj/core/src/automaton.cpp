#include "ctmdp/automaton.hpp"

#include <algorithm>

#include "ctmdp/errors.hpp"

namespace ctmdp {

LabelFormula LabelFormula::constant(bool value) {
  LabelFormula f;
  f.nodes_.push_back({value ? Kind::True : Kind::False, 0, -1, -1});
  f.root_ = 0;
  return f;
}

LabelFormula LabelFormula::prop(std::uint32_t index) {
  LabelFormula f;
  f.nodes_.push_back({Kind::Prop, index, -1, -1});
  f.root_ = 0;
  return f;
}

std::int32_t LabelFormula::append(const LabelFormula& other) {
  const auto offset = static_cast<std::int32_t>(nodes_.size());
  for (Node n : other.nodes_) {
    if (n.lhs >= 0) n.lhs += offset;
    if (n.rhs >= 0) n.rhs += offset;
    nodes_.push_back(n);
  }
  return other.root_ < 0 ? -1 : other.root_ + offset;
}

LabelFormula LabelFormula::negate(LabelFormula f) {
  LabelFormula out;
  const std::int32_t a = out.append(f);
  out.nodes_.push_back({Kind::Not, 0, a, -1});
  out.root_ = static_cast<std::int32_t>(out.nodes_.size() - 1);
  return out;
}

LabelFormula LabelFormula::conj(LabelFormula a, LabelFormula b) {
  LabelFormula out;
  const std::int32_t l = out.append(a);
  const std::int32_t r = out.append(b);
  out.nodes_.push_back({Kind::And, 0, l, r});
  out.root_ = static_cast<std::int32_t>(out.nodes_.size() - 1);
  return out;
}

LabelFormula LabelFormula::disj(LabelFormula a, LabelFormula b) {
  LabelFormula out;
  const std::int32_t l = out.append(a);
  const std::int32_t r = out.append(b);
  out.nodes_.push_back({Kind::Or, 0, l, r});
  out.root_ = static_cast<std::int32_t>(out.nodes_.size() - 1);
  return out;
}

bool LabelFormula::eval_node(std::int32_t n, Letter letter) const {
  const Node& node = nodes_[static_cast<std::size_t>(n)];
  switch (node.kind) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Prop: return node.prop < kMaxPropositions && ((letter >> node.prop) & 1U) != 0;
    case Kind::Not: return !eval_node(node.lhs, letter);
    case Kind::And: return eval_node(node.lhs, letter) && eval_node(node.rhs, letter);
    case Kind::Or: return eval_node(node.lhs, letter) || eval_node(node.rhs, letter);
  }
  return false;
}

bool LabelFormula::eval(Letter letter) const {
  return root_ < 0 ? true : eval_node(root_, letter);
}

int LabelFormula::max_prop() const {
  int best = -1;
  for (const Node& n : nodes_) {
    if (n.kind == Kind::Prop) best = std::max(best, static_cast<int>(n.prop));
  }
  return best;
}

void LabelFormula::print_node(std::int32_t n, int parent_prec, std::string& out) const {
  const Node& node = nodes_[static_cast<std::size_t>(n)];
  switch (node.kind) {
    case Kind::True: out += 't'; return;
    case Kind::False: out += 'f'; return;
    case Kind::Prop: out += std::to_string(node.prop); return;
    case Kind::Not:
      out += '!';
      print_node(node.lhs, 3, out);
      return;
    case Kind::And:
    case Kind::Or: {
      const int prec = node.kind == Kind::And ? 2 : 1;
      const bool paren = prec < parent_prec;
      if (paren) out += '(';
      print_node(node.lhs, prec, out);
      out += node.kind == Kind::And ? " & " : " | ";
      print_node(node.rhs, prec + 1, out);
      if (paren) out += ')';
      return;
    }
  }
}

std::string LabelFormula::to_hoa() const {
  if (root_ < 0) return "t";
  std::string out;
  print_node(root_, 0, out);
  return out;
}

bool BuchiAutomaton::is_deterministic() const {
  const std::size_t ap = propositions.size();
  if (ap > 16) return false;  // not worth enumerating
  for (const auto& out : edges) {
    for (Letter l = 0; l < (Letter{1} << ap); ++l) {
      int hits = 0;
      for (const auto& e : out) hits += e.guard.eval(l) ? 1 : 0;
      if (hits > 1) return false;
    }
  }
  return true;
}

AutStateSet step(const BuchiAutomaton& a, AutState q, Letter letter) {
  AutStateSet out;
  for (const auto& e : a.edges.at(q)) {
    if (e.guard.eval(letter)) out.push_back(e.target);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AutStateSet step(const BuchiAutomaton& a, const AutStateSet& qs, Letter letter) {
  AutStateSet out;
  for (AutState q : qs) {
    for (const auto& e : a.edges.at(q)) {
      if (e.guard.eval(letter)) out.push_back(e.target);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AutStateSet extended_step(const BuchiAutomaton& a, const AutStateSet& qs,
                          std::span<const Letter> word) {
  AutStateSet cur = qs;
  for (Letter l : word) {
    if (cur.empty()) break;
    cur = step(a, cur, l);
  }
  return cur;
}

void require_valid(const BuchiAutomaton& a) {
  const std::size_t n = a.num_states();
  if (n == 0) throw ValidationError("automaton has no states");
  if (a.initial >= n) throw ValidationError("automaton initial state out of range");
  if (a.accepting.size() != n) throw ValidationError("acceptance table size mismatch");
  if (a.propositions.size() > kMaxPropositions) {
    throw ValidationError("automaton uses more than 64 propositions");
  }
  for (std::size_t q = 0; q < n; ++q) {
    for (const auto& e : a.edges[q]) {
      if (e.target >= n) {
        throw ValidationError("edge from state " + std::to_string(q) + " to undefined state " +
                              std::to_string(e.target));
      }
      if (e.guard.max_prop() >= static_cast<int>(a.propositions.size())) {
        throw ValidationError("edge label of state " + std::to_string(q) +
                              " uses undeclared proposition " +
                              std::to_string(e.guard.max_prop()));
      }
    }
  }
}

PropositionBinding::PropositionBinding(const std::vector<std::string>& model_propositions,
                                       const BuchiAutomaton& automaton) {
  std::string missing;
  for (const auto& name : automaton.propositions) {
    const auto it = std::find(model_propositions.begin(), model_propositions.end(), name);
    if (it == model_propositions.end()) {
      missing += missing.empty() ? "" : ", ";
      missing += "\"" + name + "\"";
      aut_to_model_.push_back(-1);
    } else {
      aut_to_model_.push_back(static_cast<int>(it - model_propositions.begin()));
    }
  }
  if (!missing.empty()) {
    throw ValidationError("automaton propositions not defined by the model: " + missing);
  }
}

Letter PropositionBinding::translate(Letter model_letter) const noexcept {
  Letter out = 0;
  for (std::size_t i = 0; i < aut_to_model_.size(); ++i) {
    if ((model_letter >> aut_to_model_[i]) & 1U) out |= Letter{1} << i;
  }
  return out;
}

}  // namespace ctmdp
