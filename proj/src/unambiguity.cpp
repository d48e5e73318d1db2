#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

#include "ubacheck/automata.hpp"
#include "ubacheck/scc.hpp"

namespace ubacheck::automata {
namespace {

// Reachable part of the self-product with a "diverged" flag.
struct SelfProduct {
  struct Node {
    State p, q;
    bool diverged;
  };
  struct Edge {
    std::uint32_t to;
    Symbol symbol;
  };
  std::vector<Node> nodes;
  std::vector<std::vector<Edge>> edges;
  std::vector<std::uint32_t> initial;
  std::vector<std::uint32_t> parent;  // BFS tree for prefix reconstruction
  std::vector<Symbol> parent_symbol;
};

SelfProduct explore(const Nba& nba) {
  SelfProduct sp;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  const std::uint64_t n = nba.num_states();
  auto key = [n](State p, State q, bool d) { return ((p * n + q) << 1) | (d ? 1u : 0u); };
  std::deque<std::uint32_t> queue;
  auto intern = [&](State p, State q, bool d, std::uint32_t from, Symbol a) {
    auto [it, inserted] = index.try_emplace(key(p, q, d), static_cast<std::uint32_t>(sp.nodes.size()));
    if (inserted) {
      sp.nodes.push_back({p, q, d});
      sp.edges.emplace_back();
      sp.parent.push_back(from);
      sp.parent_symbol.push_back(a);
      queue.push_back(it->second);
    }
    return it->second;
  };

  auto init = members(nba.initial());
  for (State p : init)
    for (State q : init) sp.initial.push_back(intern(p, q, p != q, kNone, 0));

  const std::size_t sigma = nba.alphabet().size();
  while (!queue.empty()) {
    std::uint32_t u = queue.front();
    queue.pop_front();
    auto [p, q, d] = sp.nodes[u];
    for (Symbol a = 0; a < sigma; ++a) {
      auto ps = nba.successors(p, a);
      auto qs = nba.successors(q, a);
      for (State p2 : ps)
        for (State q2 : qs) {
          std::uint32_t v = intern(p2, q2, d || p2 != q2, u, a);
          sp.edges[u].push_back({v, a});
        }
    }
  }
  return sp;
}

// Shortest path from `from` to `to` inside component `comp`; `nonempty` forces a cycle when from == to.
std::vector<std::pair<Symbol, std::uint32_t>> path_within(const SelfProduct& sp,
                                                          const std::vector<std::uint32_t>& comp_of,
                                                          std::uint32_t comp, std::uint32_t from,
                                                          std::uint32_t to, bool nonempty) {
  std::vector<std::pair<Symbol, std::uint32_t>> path;
  if (from == to && !nonempty) return path;
  std::unordered_map<std::uint32_t, std::pair<std::uint32_t, Symbol>> parent;
  std::deque<std::uint32_t> queue;
  // Seed with successors of `from` so that a path back to `from` has length >= 1.
  for (const auto& e : sp.edges[from]) {
    if (comp_of[e.to] != comp || parent.count(e.to)) continue;
    parent[e.to] = {from, e.symbol};
    queue.push_back(e.to);
  }
  while (!queue.empty() && !parent.count(to)) {
    std::uint32_t u = queue.front();
    queue.pop_front();
    for (const auto& e : sp.edges[u]) {
      if (comp_of[e.to] != comp || parent.count(e.to)) continue;
      parent[e.to] = {u, e.symbol};
      queue.push_back(e.to);
    }
  }
  std::uint32_t cur = to;
  do {
    auto [prev, sym] = parent.at(cur);
    path.emplace_back(sym, cur);
    cur = prev;
  } while (cur != from || path.empty());
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

UnambiguityReport verify_unambiguous(const Nba& nba) {
  UnambiguityReport report;
  if (nba.initial().none() || nba.final().none()) return report;

  SelfProduct sp = explore(nba);
  StateSet active(sp.nodes.size());
  active.set();
  auto scc = tarjan_scc(sp.nodes.size(), active, [&](std::uint32_t u, std::vector<std::uint32_t>& out) {
    for (const auto& e : sp.edges[u]) out.push_back(e.to);
  });

  for (std::uint32_t c = 0; c < scc.components.size(); ++c) {
    const auto& comp = scc.components[c];
    std::uint32_t first = comp.front();
    if (!sp.nodes[first].diverged) continue;
    bool nontrivial = comp.size() > 1;
    if (!nontrivial)
      for (const auto& e : sp.edges[first]) nontrivial |= e.to == first;
    if (!nontrivial) continue;
    std::uint32_t left = kNone, right = kNone;
    for (std::uint32_t u : comp) {
      if (left == kNone && nba.is_final(sp.nodes[u].p)) left = u;
      if (right == kNone && nba.is_final(sp.nodes[u].q)) right = u;
    }
    if (left == kNone || right == kNone) continue;

    // Entry: the first node of the component met by the exploration BFS.
    std::uint32_t entry = comp.front();
    for (std::uint32_t u : comp) entry = std::min(entry, u);

    AmbiguityWitness w;
    std::vector<std::uint32_t> prefix_nodes;
    for (std::uint32_t u = entry; u != kNone; u = sp.parent[u]) prefix_nodes.push_back(u);
    std::reverse(prefix_nodes.begin(), prefix_nodes.end());
    for (std::size_t i = 1; i < prefix_nodes.size(); ++i)
      w.prefix.push_back(sp.parent_symbol[prefix_nodes[i]]);

    std::vector<std::uint32_t> cycle_nodes;
    auto append = [&](const std::vector<std::pair<Symbol, std::uint32_t>>& seg) {
      for (auto [sym, node] : seg) {
        w.cycle.push_back(sym);
        cycle_nodes.push_back(node);
      }
    };
    append(path_within(sp, scc.component_of, c, entry, left, false));
    std::uint32_t at = cycle_nodes.empty() ? entry : cycle_nodes.back();
    append(path_within(sp, scc.component_of, c, at, right, false));
    at = cycle_nodes.empty() ? entry : cycle_nodes.back();
    append(path_within(sp, scc.component_of, c, at, entry, cycle_nodes.empty()));

    for (std::uint32_t u : prefix_nodes) {
      w.run1.push_back(sp.nodes[u].p);
      w.run2.push_back(sp.nodes[u].q);
    }
    for (std::uint32_t u : cycle_nodes) {
      w.run1.push_back(sp.nodes[u].p);
      w.run2.push_back(sp.nodes[u].q);
    }
    report.unambiguous = false;
    report.witness = std::move(w);
    return report;
  }
  return report;
}

std::string describe(const Nba& nba, const AmbiguityWitness& w) {
  const Alphabet& sigma = nba.alphabet();
  std::ostringstream os;
  auto word = [&](const std::vector<Symbol>& symbols) {
    if (symbols.empty()) return std::string("ε");
    std::string out;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i) out += ' ';
      out += sigma.name(symbols[i]);
    }
    return out;
  };
  auto run = [&](const std::vector<State>& states) {
    std::string out;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (i) out += ' ';
      out += nba.state_name(states[i]);
    }
    return out;
  };
  os << "prefix: " << word(w.prefix) << "\n";
  os << "cycle:  " << word(w.cycle) << "\n";
  os << "run 1:  " << run(w.run1) << "\n";
  os << "run 2:  " << run(w.run2) << "\n";
  return os.str();
}

}  // namespace ubacheck::automata
