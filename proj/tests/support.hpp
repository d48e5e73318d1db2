#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ubacheck/automata.hpp"
#include "ubacheck/engine.hpp"
#include "ubacheck/families.hpp"
#include "ubacheck/graph.hpp"
#include "ubacheck/markov.hpp"
#include "ubacheck/product.hpp"

namespace testing {

using namespace ubacheck;

inline const char* kFig1RightHoa = R"(HOA: v1
name: "fig1-right"
States: 2
Start: 0
Start: 1
AP: 1 "a"
acc-name: Buchi
Acceptance: 1 Inf(0)
--BODY--
State: 0 "qa" {0}
[0] 0
[0] 1
State: 1 "qb" {0}
[!0] 0
[!0] 1
--END--
)";

/// Random automaton over one AP (|Σ| = 2). Each (q, a) gets 0, 1 or 2 successors;
/// `total` rules out 0, which makes positive components common.
inline automata::Nba random_nba(std::mt19937_64& rng, std::size_t n, bool total = false) {
  automata::NbaBuilder b(automata::Alphabet::from_aps({"p"}), n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::discrete_distribution<int> fanout{total ? 0.0 : 2.0, 5.0, 2.0};
  for (State q = 0; q < n; ++q)
    for (Symbol a = 0; a < 2; ++a) {
      int k = fanout(rng);
      for (int i = 0; i < k; ++i) b.add_transition(q, a, static_cast<State>(pick(rng)));
    }
  b.set_initial(static_cast<State>(pick(rng)));
  if (rng() % 3 == 0) b.set_initial(static_cast<State>(pick(rng)));
  std::bernoulli_distribution fin(0.35);
  bool any = false;
  for (State q = 0; q < n; ++q)
    if (fin(rng)) b.set_final(q), any = true;
  if (!any) b.set_final(static_cast<State>(pick(rng)));
  return b.build();
}

/// Rejection sampling through verify_unambiguous.
inline automata::Nba random_uba(std::mt19937_64& rng, std::size_t max_states, bool total = false) {
  std::uniform_int_distribution<std::size_t> size(1, max_states);
  for (;;) {
    auto nba = random_nba(rng, size(rng), total);
    if (automata::verify_unambiguous(nba).unambiguous) return nba;
  }
}

/// Number of runs reading `word` from some initial state and ending in `target`.
inline std::size_t count_runs(const automata::Nba& nba, const std::vector<Symbol>& word, State target) {
  std::vector<std::size_t> count(nba.num_states(), 0);
  for (auto q : members(nba.initial())) count[q] = 1;
  for (auto a : word) {
    std::vector<std::size_t> next(nba.num_states(), 0);
    for (State q = 0; q < nba.num_states(); ++q)
      for (auto p : nba.successors(q, a)) next[p] += count[q];
    count = std::move(next);
  }
  return count[target];
}

/// Every word of length `len` over `sigma` symbols.
inline std::vector<std::vector<Symbol>> all_words(std::size_t sigma, std::size_t len) {
  std::vector<std::vector<Symbol>> out{{}};
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<std::vector<Symbol>> next;
    for (const auto& w : out)
      for (Symbol a = 0; a < sigma; ++a) {
        next.push_back(w);
        next.back().push_back(a);
      }
    out = std::move(next);
  }
  return out;
}

/// Product edges enumerated from the definition, keyed by (s,q) pairs.
struct BruteProduct {
  std::set<std::pair<std::uint32_t, State>> nodes;
  std::map<std::pair<std::uint32_t, State>, std::map<std::pair<std::uint32_t, State>, double>> edges;
};

inline BruteProduct brute_product(const markov::Dtmc& dtmc, const automata::Nba& nba) {
  auto lmap = product::label_map(dtmc, nba);
  BruteProduct out;
  std::vector<std::pair<std::uint32_t, State>> work;
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
    if (dtmc.initial(s).value <= 0) continue;
    for (auto q0 : members(nba.initial()))
      for (auto q : nba.successors(q0, lmap[dtmc.label(s)]))
        if (out.nodes.insert({s, q}).second) work.push_back({s, q});
  }
  while (!work.empty()) {
    auto [s, q] = work.back();
    work.pop_back();
    for (const auto& t : dtmc.row(s))
      for (auto p : nba.successors(q, lmap[dtmc.label(t.target)])) {
        out.edges[{s, q}][{t.target, p}] += t.prob.value;
        if (out.nodes.insert({t.target, p}).second) work.push_back({t.target, p});
      }
  }
  return out;
}

inline std::uint32_t largest_component(const graph::SccDag& dag) {
  std::uint32_t best = 0;
  for (std::uint32_t c = 0; c < dag.components.size(); ++c)
    if (dag.components[c].size() > dag.components[best].size()) best = c;
  return best;
}

/// Reachable product is one SCC containing a final node.
inline bool oracle_applicable(const markov::Dtmc& dtmc, const automata::Nba& nba) {
  auto prod = product::build_product(dtmc, nba);
  if (prod.num_nodes() == 0 || prod.final().none()) return false;
  auto dag = graph::sccs(prod);
  return dag.components.size() == 1 && !dag.info[0].trivial;
}

}  // namespace testing
