#include <algorithm>
#include <deque>
#include <ostream>

#include "ubacheck/product.hpp"

namespace ubacheck::product {

using automata::Nba;
using markov::Dtmc;

std::vector<Symbol> label_map(const Dtmc& dtmc, const Nba& nba) {
  const auto& chain = dtmc.alphabet();
  const auto& aut = nba.alphabet();
  std::vector<Symbol> map(chain.size());
  if (chain.has_aps() && aut.has_aps()) {
    std::vector<std::size_t> position;
    for (const auto& ap : aut.ap_names()) {
      auto it = std::find(chain.ap_names().begin(), chain.ap_names().end(), ap);
      if (it == chain.ap_names().end())
        throw ValidationError("alphabet mismatch: automaton proposition '" + ap +
                              "' is not declared by the Markov chain");
      position.push_back(static_cast<std::size_t>(it - chain.ap_names().begin()));
    }
    for (Symbol v = 0; v < chain.size(); ++v) {
      Symbol a = 0;
      for (std::size_t j = 0; j < position.size(); ++j)
        if ((v >> position[j]) & 1u) a |= Symbol{1} << j;
      map[v] = a;
    }
    return map;
  }
  if (!(chain == aut)) throw ValidationError("alphabet mismatch between Markov chain labels and automaton");
  for (Symbol v = 0; v < chain.size(); ++v) map[v] = v;
  return map;
}

struct ProductBuilder {
  static ProductAutomaton run(const Dtmc& dtmc, const Nba& nba,
                              const std::vector<std::pair<std::uint32_t, State>>& start,
                              const std::vector<double>& weights) {
    ProductAutomaton prod;
    prod.chain_states_ = dtmc.num_states();
    prod.automaton_states_ = nba.num_states();
    auto lmap = label_map(dtmc, nba);
    const std::uint64_t nq = nba.num_states();
    std::deque<NodeId> queue;
    auto intern = [&](std::uint32_t s, State q) {
      auto [it, inserted] = prod.index_.try_emplace(s * nq + q, static_cast<NodeId>(prod.nodes_.size()));
      if (inserted) {
        prod.nodes_.push_back({s, q});
        queue.push_back(it->second);
      }
      return it->second;
    };

    std::vector<std::pair<std::pair<std::uint32_t, State>, double>> sorted;
    for (std::size_t i = 0; i < start.size(); ++i) sorted.push_back({start[i], weights[i]});
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [sq, w] : sorted) {
      if (sq.first >= dtmc.num_states() || sq.second >= nba.num_states())
        throw ValidationError("start node out of range");
      NodeId n = intern(sq.first, sq.second);
      if (n == prod.initial_.size()) {
        prod.initial_.push_back(n);
        prod.init_weight_.push_back(w);
      }
    }

    // Nodes are discovered in BFS order, so CSR rows can be appended in queue order.
    std::vector<std::vector<Edge>> pending;
    std::vector<NodeId> order;
    while (!queue.empty()) {
      NodeId u = queue.front();
      queue.pop_front();
      order.push_back(u);
      auto [s, q] = prod.nodes_[u];
      std::vector<Edge> out;
      for (const auto& tr : dtmc.row(s)) {
        Symbol a = lmap[dtmc.label(tr.target)];
        for (State p : nba.successors(q, a)) out.push_back({intern(tr.target, p), tr.prob.value});
      }
      pending.push_back(std::move(out));
    }
    prod.offsets_.assign(1, 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
      // BFS pops nodes in index order.
      prod.edges_.insert(prod.edges_.end(), pending[i].begin(), pending[i].end());
      prod.offsets_.push_back(static_cast<std::uint32_t>(prod.edges_.size()));
    }
    prod.final_.resize(prod.nodes_.size());
    for (NodeId n = 0; n < prod.nodes_.size(); ++n)
      if (nba.is_final(prod.nodes_[n].q)) prod.final_.set(n);
    return prod;
  }
};

double ProductAutomaton::init_weight(NodeId n) const {
  return n < init_weight_.size() ? init_weight_[n] : 0.0;
}

std::optional<NodeId> ProductAutomaton::find(std::uint32_t s, State q) const {
  auto it = index_.find(static_cast<std::uint64_t>(s) * automaton_states_ + q);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ProductAutomaton build_product(const Dtmc& dtmc, const Nba& nba) {
  auto lmap = label_map(dtmc, nba);
  std::vector<std::pair<std::uint32_t, State>> start;
  std::vector<double> weights;
  auto init = members(nba.initial());
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
    double iota = dtmc.initial(s).value;
    if (iota <= 0) continue;
    StateSet reached(nba.num_states());
    Symbol a = lmap[dtmc.label(s)];
    for (State q0 : init)
      for (State q : nba.successors(q0, a)) reached.set(q);
    for (auto q : members(reached)) {
      start.emplace_back(s, q);
      weights.push_back(iota);
    }
  }
  return ProductBuilder::run(dtmc, nba, start, weights);
}

ProductAutomaton build_product_from(const Dtmc& dtmc, const Nba& nba,
                                    const std::vector<std::pair<std::uint32_t, State>>& start) {
  return ProductBuilder::run(dtmc, nba, start, std::vector<double>(start.size(), 1.0));
}

std::vector<std::pair<NodeId, double>> node_matrix_row(const ProductAutomaton& prod, NodeId n) {
  if (n >= prod.num_nodes()) throw ValidationError("unknown product node " + std::to_string(n));
  std::vector<std::pair<NodeId, double>> row;
  for (const auto& e : prod.edges(n)) row.emplace_back(e.target, e.weight);
  return row;
}

void write_dot(const ProductAutomaton& prod, const Dtmc& dtmc, const Nba& nba, std::ostream& out) {
  out << "digraph product {\n  rankdir=LR;\n";
  for (NodeId n = 0; n < prod.num_nodes(); ++n) {
    const auto& [s, q] = prod.node(n);
    out << "  n" << n << " [label=\"" << dtmc.state_name(s) << ',' << nba.state_name(q) << "\"";
    if (prod.is_final(n)) out << ", shape=box";
    if (prod.init_weight(n) > 0) out << ", penwidth=2";
    out << "];\n";
  }
  for (NodeId n = 0; n < prod.num_nodes(); ++n)
    for (const auto& e : prod.edges(n)) out << "  n" << n << " -> n" << e.target << " [label=\"" << e.weight << "\"];\n";
  out << "}\n";
}

automata::Nba product_as_nba(const ProductAutomaton& prod) {
  std::vector<std::string> symbols;
  for (std::size_t s = 0; s < prod.num_chain_states(); ++s) symbols.push_back(std::to_string(s));
  if (symbols.size() < 2) symbols.push_back("_");
  const auto start = static_cast<State>(prod.num_nodes());
  automata::NbaBuilder b(automata::Alphabet::from_symbols(symbols), prod.num_nodes() + 1);
  for (NodeId n = 0; n < prod.num_nodes(); ++n) {
    if (prod.is_final(n)) b.set_final(n);
    for (const auto& e : prod.edges(n)) b.add_transition(n, prod.node(e.target).s, e.target);
  }
  b.set_initial(start).set_state_name(start, "start");
  for (NodeId n : prod.initial()) b.add_transition(start, prod.node(n).s, n);
  return b.build();
}

}  // namespace ubacheck::product
