#pragma once

#include <optional>
#include <vector>

#include "ubacheck/automata.hpp"
#include "ubacheck/graph.hpp"

namespace ubacheck::cuts {

using graph::SccDag;
using product::ProductAutomaton;

/// members = Δ_C(anchor, word); every member sits on the anchor's chain state.
struct Cut {
  NodeId anchor = kNone;
  std::vector<std::uint32_t> word;  // chain states
  std::vector<NodeId> members;      // sorted
  std::size_t growth_steps = 0;
  std::vector<std::size_t> sizes;   // |Δ_C(anchor, z_i)| for i = 0..growth_steps
  bool shortcut = false;            // produced by the separated-automaton shortcut
};

struct ExtensionWitness {
  std::vector<std::uint32_t> word;  // y, ends on the anchor's chain state
  NodeId partner = kNone;           // ⟨s,p⟩ with p != q
};

/// Frontier sets for the nodes of one chain-state layer of a component.
/// `layer[i]` is a node; `sets[i]` holds layer positions of Δ_C(layer[i], z).
struct Frontier {
  std::vector<NodeId> layer;
  std::vector<std::vector<std::uint32_t>> sets;
};

Frontier initial_frontier(const ProductAutomaton& prod, const SccDag& dag, std::uint32_t component,
                          NodeId anchor);

/// Shortest y such that both anchor and some partner v != anchor with a
/// nonempty frontier lie in Δ_C(anchor, y).
std::optional<ExtensionWitness> find_extension(const ProductAutomaton& prod, const SccDag& dag,
                                               std::uint32_t component, NodeId anchor,
                                               const Frontier& frontier);

/// Grows Δ_C(anchor, z) until no extension exists. Throws PreconditionError
/// when a step does not strictly grow the set or more than |layer| steps occur.
Cut generate_pure_cut(const ProductAutomaton& prod, const SccDag& dag, std::uint32_t component,
                      NodeId anchor);

/// Nodes of `component` reached from `from` along `word` inside the component.
std::vector<NodeId> delta_in_component(const ProductAutomaton& prod, const SccDag& dag,
                                       std::uint32_t component, const std::vector<NodeId>& from,
                                       const std::vector<std::uint32_t>& word);

/// Σ_q Σ_a |δ(q,a)| == |Σ|·|Q|, checked together with separation (pairwise
/// disjoint state languages); returns the full state set when both hold.
std::optional<StateSet> separated_shortcut(const automata::Nba& nba_scc);

/// Every final state has δ(q,a) = {q} for all symbols a.
bool cosafety_shortcut(const automata::Nba& nba);

}  // namespace ubacheck::cuts
