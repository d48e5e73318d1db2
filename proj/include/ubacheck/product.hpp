#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ubacheck/automata.hpp"
#include "ubacheck/markov.hpp"

namespace ubacheck::product {

struct ProductBuilder;

struct Node {
  std::uint32_t s;  // chain state
  State q;          // automaton state
};

struct Edge {
  NodeId target;
  double weight;  // P(s,t)
};

/// Reachable fragment of M ⊗ U. Node ⟨s,q⟩ means the chain is in s and the
/// automaton is in q after reading L(s). Edges leaving a node are sorted by
/// target chain state, then by automaton state.
class ProductAutomaton {
 public:
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  const Node& node(NodeId n) const { return nodes_[n]; }
  std::span<const Edge> edges(NodeId n) const {
    return {edges_.data() + offsets_[n], edges_.data() + offsets_[n + 1]};
  }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  const std::vector<NodeId>& initial() const noexcept { return initial_; }
  double init_weight(NodeId n) const;
  bool is_final(NodeId n) const { return final_.test(n); }
  const StateSet& final() const noexcept { return final_; }

  std::optional<NodeId> find(std::uint32_t s, State q) const;

  std::size_t num_chain_states() const noexcept { return chain_states_; }
  std::size_t num_automaton_states() const noexcept { return automaton_states_; }

 private:
  friend struct ProductBuilder;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<Edge> edges_;
  std::vector<NodeId> initial_;
  std::vector<double> init_weight_;  // parallel to initial_
  StateSet final_;
  std::unordered_map<std::uint64_t, NodeId> index_;
  std::size_t chain_states_ = 0;
  std::size_t automaton_states_ = 0;
};

/// For each chain label symbol, the automaton symbol it stands for. AP
/// alphabets are matched by name: the chain may declare extra APs, but
/// every automaton AP must exist in the chain.
std::vector<Symbol> label_map(const markov::Dtmc& dtmc, const automata::Nba& nba);

/// Q0' = {⟨s,q⟩ : ι(s) > 0, q ∈ δ(Q0, L(s))}, explored breadth first.
ProductAutomaton build_product(const markov::Dtmc& dtmc, const automata::Nba& nba);

/// Reachable product from explicit start nodes, each with weight 1.
ProductAutomaton build_product_from(const markov::Dtmc& dtmc, const automata::Nba& nba,
                                    const std::vector<std::pair<std::uint32_t, State>>& start);

std::vector<std::pair<NodeId, double>> node_matrix_row(const ProductAutomaton& prod, NodeId n);

void write_dot(const ProductAutomaton& prod, const markov::Dtmc& dtmc, const automata::Nba& nba,
               std::ostream& out);

/// The product as an automaton over the chain states (edge ⟨s,q⟩ → ⟨t,p⟩ reads t).
/// An extra state numbered num_nodes() is the only initial state; it reads s into ⟨s,q⟩.
automata::Nba product_as_nba(const ProductAutomaton& prod);

}  // namespace ubacheck::product
