#include <algorithm>
#include <deque>
#include <unordered_map>

#include "ubacheck/cuts.hpp"

namespace ubacheck::cuts {
namespace {

bool inside(const SccDag& dag, std::uint32_t component, NodeId n) {
  return dag.component_of[n] == component && dag.alive(n);
}

void check_anchor(const SccDag& dag, std::uint32_t component, NodeId anchor) {
  if (component >= dag.components.size()) throw ValidationError("unknown component");
  if (anchor >= dag.component_of.size() || !inside(dag, component, anchor))
    throw PreconditionError("anchor " + std::to_string(anchor) + " is not in component " +
                            std::to_string(component));
}

}  // namespace

Frontier initial_frontier(const ProductAutomaton& prod, const SccDag& dag, std::uint32_t component,
                          NodeId anchor) {
  check_anchor(dag, component, anchor);
  Frontier f;
  const auto s = prod.node(anchor).s;
  for (NodeId n : dag.components[component])
    if (prod.node(n).s == s && dag.alive(n)) f.layer.push_back(n);
  for (std::uint32_t i = 0; i < f.layer.size(); ++i) f.sets.push_back({i});
  return f;
}

std::vector<NodeId> delta_in_component(const ProductAutomaton& prod, const SccDag& dag,
                                       std::uint32_t component, const std::vector<NodeId>& from,
                                       const std::vector<std::uint32_t>& word) {
  std::vector<NodeId> cur = from, next;
  for (auto t : word) {
    next.clear();
    for (NodeId u : cur)
      for (const auto& e : prod.edges(u))
        if (prod.node(e.target).s == t && inside(dag, component, e.target)) next.push_back(e.target);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cur.swap(next);
  }
  return cur;
}

std::optional<ExtensionWitness> find_extension(const ProductAutomaton& prod, const SccDag& dag,
                                               std::uint32_t component, NodeId anchor,
                                               const Frontier& frontier) {
  check_anchor(dag, component, anchor);
  std::unordered_map<NodeId, std::uint32_t> position;
  for (std::uint32_t i = 0; i < frontier.layer.size(); ++i) position[frontier.layer[i]] = i;

  const std::uint64_t n = prod.num_nodes();
  auto key = [n](NodeId u, NodeId v) { return static_cast<std::uint64_t>(u) * n + v; };
  struct Parent {
    std::uint64_t prev;
    std::uint32_t symbol;
  };
  std::unordered_map<std::uint64_t, Parent> parent;
  std::deque<std::pair<NodeId, NodeId>> queue;
  const std::uint64_t root = key(anchor, anchor);
  parent.emplace(root, Parent{root, 0});
  queue.emplace_back(anchor, anchor);

  auto witness = [&](std::uint64_t k, NodeId partner) {
    ExtensionWitness w;
    w.partner = partner;
    while (k != root) {
      const auto& p = parent.at(k);
      w.word.push_back(p.symbol);
      k = p.prev;
    }
    std::reverse(w.word.begin(), w.word.end());
    return w;
  };

  while (!queue.empty()) {
    auto [u, v] = queue.front();
    queue.pop_front();
    const std::uint64_t here = key(u, v);
    auto eu = prod.edges(u);
    auto ev = prod.edges(v);
    // Both edge lists are grouped by target chain state; walk them in lockstep.
    std::size_t i = 0, j = 0;
    while (i < eu.size() && j < ev.size()) {
      auto tu = prod.node(eu[i].target).s, tv = prod.node(ev[j].target).s;
      if (tu < tv) { ++i; continue; }
      if (tv < tu) { ++j; continue; }
      std::size_t i_end = i, j_end = j;
      while (i_end < eu.size() && prod.node(eu[i_end].target).s == tu) ++i_end;
      while (j_end < ev.size() && prod.node(ev[j_end].target).s == tu) ++j_end;
      for (std::size_t a = i; a < i_end; ++a) {
        NodeId u2 = eu[a].target;
        if (!inside(dag, component, u2)) continue;
        for (std::size_t b = j; b < j_end; ++b) {
          NodeId v2 = ev[b].target;
          if (!inside(dag, component, v2)) continue;
          auto k = key(u2, v2);
          if (!parent.emplace(k, Parent{here, tu}).second) continue;
          if (u2 == anchor && v2 != anchor) {
            auto it = position.find(v2);
            if (it != position.end() && !frontier.sets[it->second].empty()) return witness(k, v2);
          }
          queue.emplace_back(u2, v2);
        }
      }
      i = i_end;
      j = j_end;
    }
  }
  return std::nullopt;
}

Cut generate_pure_cut(const ProductAutomaton& prod, const SccDag& dag, std::uint32_t component,
                      NodeId anchor) {
  Frontier frontier = initial_frontier(prod, dag, component, anchor);
  std::unordered_map<NodeId, std::uint32_t> position;
  for (std::uint32_t i = 0; i < frontier.layer.size(); ++i) position[frontier.layer[i]] = i;
  const std::uint32_t a = position.at(anchor);

  Cut cut;
  cut.anchor = anchor;
  cut.sizes.push_back(1);
  std::vector<char> mark(frontier.layer.size(), 0);
  while (auto ext = find_extension(prod, dag, component, anchor, frontier)) {
    if (++cut.growth_steps > frontier.layer.size())
      throw PreconditionError("cut generation exceeded " + std::to_string(frontier.layer.size()) +
                              " growth steps; the component is not positive or the automaton is ambiguous");
    std::vector<std::vector<std::uint32_t>> next(frontier.layer.size());
    for (std::uint32_t i = 0; i < frontier.layer.size(); ++i) {
      auto reached = delta_in_component(prod, dag, component, {frontier.layer[i]}, ext->word);
      std::fill(mark.begin(), mark.end(), 0);
      for (NodeId r : reached) {
        auto it = position.find(r);
        if (it == position.end()) throw NumericError("extension word left the anchor layer");
        for (auto m : frontier.sets[it->second]) mark[m] = 1;
      }
      for (std::uint32_t m = 0; m < mark.size(); ++m)
        if (mark[m]) next[i].push_back(m);
    }
    if (next[a].size() <= frontier.sets[a].size())
      throw PreconditionError("extension did not enlarge the cut; the automaton is not unambiguous");
    frontier.sets = std::move(next);
    cut.word.insert(cut.word.begin(), ext->word.begin(), ext->word.end());
    cut.sizes.push_back(frontier.sets[a].size());
  }
  for (auto m : frontier.sets[a]) cut.members.push_back(frontier.layer[m]);
  return cut;
}

std::optional<StateSet> separated_shortcut(const automata::Nba& nba_scc) {
  const std::size_t q = nba_scc.num_states();
  if (q == 0 || nba_scc.final().none()) return std::nullopt;
  if (nba_scc.num_transitions() != nba_scc.alphabet().size() * q) return std::nullopt;
  StateSet all(q);
  all.set();
  if (!automata::verify_unambiguous(automata::with_initial(nba_scc, all)).unambiguous) return std::nullopt;
  return all;
}

bool cosafety_shortcut(const automata::Nba& nba) {
  for (auto q : members(nba.final()))
    for (Symbol a = 0; a < nba.alphabet().size(); ++a) {
      auto succ = nba.successors(q, a);
      if (succ.size() != 1 || succ[0] != q) return false;
    }
  return true;
}

}  // namespace ubacheck::cuts
