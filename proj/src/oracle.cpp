// Powerset-absorption oracle and Monte-Carlo sampling. Both work directly on
// the automaton and the chain and share no numerics with the main pipeline.

#include <algorithm>
#include <deque>
#include <cmath>
#include <map>
#include <random>

#include "ubacheck/engine.hpp"
#include "ubacheck/scc.hpp"

namespace ubacheck::engine {
namespace {

struct PowersetChain {
  struct Step {
    std::uint32_t target;  // kNone for ∅
    const markov::Probability* prob;
  };
  std::vector<std::vector<Step>> steps;
};

void require_strongly_connected(const product::ProductAutomaton& prod) {
  if (prod.num_nodes() == 0) return;
  StateSet all(prod.num_nodes());
  all.set();
  auto scc = tarjan_scc(prod.num_nodes(), all, [&](std::uint32_t u, std::vector<std::uint32_t>& out) {
    for (const auto& e : prod.edges(u)) out.push_back(e.target);
  });
  if (scc.components.size() != 1)
    throw PreconditionError("oracle needs a strongly connected product, found " +
                            std::to_string(scc.components.size()) + " components");
  if (prod.final().none()) throw PreconditionError("oracle needs a reachable final state");
}

PowersetChain explore(const Nba& nba, const Dtmc& dtmc, std::vector<std::pair<std::uint32_t, StateSet>> start,
                      std::vector<std::uint32_t>& start_ids, std::size_t max_states) {
  auto lmap = product::label_map(dtmc, nba);
  PowersetChain chain;
  std::map<std::pair<std::uint32_t, StateSet>, std::uint32_t> index;
  std::deque<std::pair<std::uint32_t, StateSet>> queue;
  auto intern = [&](std::uint32_t s, StateSet r) -> std::uint32_t {
    if (r.none()) return kNone;
    auto [it, inserted] = index.try_emplace({s, r}, static_cast<std::uint32_t>(chain.steps.size()));
    if (inserted) {
      if (chain.steps.size() >= max_states)
        throw PreconditionError("powerset chain exceeds " + std::to_string(max_states) + " states");
      chain.steps.emplace_back();
      queue.emplace_back(s, std::move(r));
    }
    return it->second;
  };
  for (auto& [s, r] : start) start_ids.push_back(intern(s, r));
  while (!queue.empty()) {
    auto [s, r] = std::move(queue.front());
    queue.pop_front();
    const auto id = index.at({s, r});
    for (const auto& tr : dtmc.row(s)) {
      StateSet next(nba.num_states());
      Symbol a = lmap[dtmc.label(tr.target)];
      for (auto q = r.find_first(); q != StateSet::npos; q = r.find_next(q))
        for (State p : nba.successors(static_cast<State>(q), a)) next.set(p);
      auto target = intern(tr.target, std::move(next));
      chain.steps[id].push_back({target, &tr.prob});
    }
  }
  return chain;
}

// Which states can reach ∅.
std::vector<char> can_block(const std::vector<std::vector<std::pair<std::uint32_t, bool>>>& succ) {
  const std::size_t n = succ.size();
  std::vector<std::vector<std::uint32_t>> pred(n);
  std::vector<char> blocks(n, 0);
  std::deque<std::uint32_t> queue;
  for (std::uint32_t i = 0; i < n; ++i)
    for (auto [t, empty] : succ[i]) {
      if (empty) {
        if (!blocks[i]) queue.push_back(i);
        blocks[i] = 1;
      } else {
        pred[t].push_back(i);
      }
    }
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (auto p : pred[u])
      if (!blocks[p]) {
        blocks[p] = 1;
        queue.push_back(p);
      }
  }
  return blocks;
}

// Exact solution of x = A x + b over the states that can block.
std::vector<mpq_class> solve_exact(const PowersetChain& chain, const std::vector<char>& blocks) {
  const std::size_t n = chain.steps.size();
  std::vector<std::uint32_t> local(n, kNone);
  std::vector<std::uint32_t> vars;
  for (std::uint32_t i = 0; i < n; ++i)
    if (blocks[i]) {
      local[i] = static_cast<std::uint32_t>(vars.size());
      vars.push_back(i);
    }
  const std::size_t k = vars.size();
  std::vector<std::vector<mpq_class>> a(k, std::vector<mpq_class>(k + 1, 0));
  for (std::size_t r = 0; r < k; ++r) {
    a[r][r] += 1;
    for (const auto& st : chain.steps[vars[r]]) {
      if (st.target == kNone) {
        a[r][k] += st.prob->exact;
      } else if (local[st.target] != kNone) {
        a[r][local[st.target]] -= st.prob->exact;
      }
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = c;
    while (p < k && a[p][c] == 0) ++p;
    if (p == k) throw NumericError("singular absorption system");
    std::swap(a[c], a[p]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c || a[r][c] == 0) continue;
      mpq_class f = a[r][c] / a[c][c];
      for (std::size_t j = c; j <= k; ++j)
        if (a[c][j] != 0) a[r][j] -= f * a[c][j];
    }
  }
  std::vector<mpq_class> x(n, 0);
  for (std::size_t r = 0; r < k; ++r) x[vars[r]] = a[r][k] / a[r][r];
  return x;
}

std::vector<double> solve_double(const PowersetChain& chain, const std::vector<char>& blocks) {
  const std::size_t n = chain.steps.size();
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
  std::vector<double> b(n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!blocks[i]) continue;
    for (const auto& st : chain.steps[i]) {
      if (st.target == kNone) {
        b[i] += st.prob->value;
      } else if (blocks[st.target]) {
        rows[i].emplace_back(st.target, st.prob->value);
      }
    }
  }
  return linalg::solve_absorbing(linalg::SparseMatrix::from_rows(rows), b).x;
}

OracleResult run(const Nba& nba, const Dtmc& dtmc, std::vector<std::pair<std::uint32_t, StateSet>> start,
                 const std::vector<mpq_class>& weights, const OracleOptions& opts) {
  std::vector<std::uint32_t> ids;
  auto chain = explore(nba, dtmc, std::move(start), ids, opts.max_states);
  std::vector<std::vector<std::pair<std::uint32_t, bool>>> succ(chain.steps.size());
  for (std::size_t i = 0; i < chain.steps.size(); ++i)
    for (const auto& st : chain.steps[i]) succ[i].emplace_back(st.target, st.target == kNone);
  auto blocks = can_block(succ);

  OracleResult res;
  res.powerset_states = chain.steps.size();
  const auto unknowns = static_cast<std::size_t>(std::count(blocks.begin(), blocks.end(), 1));
  if (opts.exact && unknowns <= opts.exact_limit) {
    auto x = solve_exact(chain, blocks);
    mpq_class blocked = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) blocked += weights[i] * (ids[i] == kNone ? mpq_class(1) : x[ids[i]]);
    mpq_class value = 1 - blocked;
    value.canonicalize();
    res.value = value.get_d();
    res.exact = value;
  } else {
    auto x = solve_double(chain, blocks);
    double blocked = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) blocked += weights[i].get_d() * (ids[i] == kNone ? 1.0 : x[ids[i]]);
    res.value = 1.0 - blocked;
  }
  return res;
}

}  // namespace

OracleResult powerset_absorption_oracle(const Nba& nba, const Dtmc& dtmc, const OracleOptions& opts) {
  require_strongly_connected(product::build_product(dtmc, nba));
  auto lmap = product::label_map(dtmc, nba);
  std::vector<std::pair<std::uint32_t, StateSet>> start;
  std::vector<mpq_class> weights;
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
    if (dtmc.initial(s).exact == 0) continue;
    start.emplace_back(s, automata::delta_word(nba, nba.initial(), std::vector<Symbol>{lmap[dtmc.label(s)]}));
    weights.push_back(dtmc.initial(s).exact);
  }
  return run(nba, dtmc, std::move(start), weights, opts);
}

OracleResult absorption_from(const Nba& nba, const Dtmc& dtmc, std::uint32_t s, const StateSet& r,
                             const OracleOptions& opts) {
  if (s >= dtmc.num_states()) throw ValidationError("unknown chain state " + std::to_string(s));
  if (r.size() != nba.num_states()) throw ValidationError("state set has wrong universe size");
  std::vector<std::pair<std::uint32_t, State>> nodes;
  for (auto q : members(r)) nodes.emplace_back(s, q);
  require_strongly_connected(product::build_product_from(dtmc, nba, nodes));
  return run(nba, dtmc, {{s, r}}, {mpq_class(1)}, opts);
}

double absorption_in_component(const product::ProductAutomaton& prod, const graph::SccDag& dag,
                               std::uint32_t component, const std::vector<NodeId>& start,
                               std::size_t max_states) {
  std::map<std::vector<NodeId>, std::uint32_t> index;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> steps;  // target kNone = ∅
  std::deque<std::vector<NodeId>> queue;
  auto intern = [&](std::vector<NodeId> set) -> std::uint32_t {
    if (set.empty()) return kNone;
    auto [it, inserted] = index.try_emplace(set, static_cast<std::uint32_t>(steps.size()));
    if (inserted) {
      if (steps.size() >= max_states)
        throw PreconditionError("powerset chain exceeds " + std::to_string(max_states) + " states");
      steps.emplace_back();
      queue.push_back(std::move(set));
    }
    return it->second;
  };
  std::vector<NodeId> init = start;
  std::sort(init.begin(), init.end());
  init.erase(std::unique(init.begin(), init.end()), init.end());
  const auto root = intern(init);
  if (root == kNone) return 0.0;

  while (!queue.empty()) {
    auto set = std::move(queue.front());
    queue.pop_front();
    const auto id = index.at(set);
    // chain successor t -> (weight, reached nodes)
    std::map<std::uint32_t, std::pair<double, std::vector<NodeId>>> by_t;
    for (NodeId u : set)
      for (const auto& e : prod.edges(u)) {
        auto& slot = by_t[prod.node(e.target).s];
        slot.first = e.weight;
        if (dag.component_of[e.target] == component && dag.alive(e.target)) slot.second.push_back(e.target);
      }
    for (auto& [t, slot] : by_t) {
      auto& nodes = slot.second;
      std::sort(nodes.begin(), nodes.end());
      nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
      auto target = intern(std::move(nodes));
      steps[id].emplace_back(target, slot.first);
    }
  }

  // Chain successors that no member can follow block immediately; their
  // mass is the part of each row missing from `steps`.
  const std::size_t n = steps.size();
  std::vector<std::vector<std::pair<std::uint32_t, bool>>> succ(n);
  std::vector<double> b(n, 0.0);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (auto [t, w] : steps[i]) {
      total += w;
      succ[i].emplace_back(t, t == kNone);
    }
    if (total < 1.0 - 1e-12) succ[i].emplace_back(kNone, true);
    b[i] = 1.0 - total;
    for (auto [t, w] : steps[i]) {
      if (t == kNone) b[i] += w;
    }
  }
  auto blocks = can_block(succ);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!blocks[i]) {
      b[i] = 0.0;
      continue;
    }
    for (auto [t, w] : steps[i])
      if (t != kNone && blocks[t]) rows[i].emplace_back(t, w);
  }
  auto x = linalg::solve_absorbing(linalg::SparseMatrix::from_rows(rows), b).x;
  return 1.0 - x[root];
}

SampleResult sample_alive(const Nba& nba, const Dtmc& dtmc, std::size_t samples, std::size_t horizon,
                          std::uint64_t seed) {
  auto lmap = product::label_map(dtmc, nba);
  std::mt19937_64 rng(seed);
  std::vector<double> init;
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) init.push_back(dtmc.initial(s).value);
  std::discrete_distribution<std::uint32_t> start(init.begin(), init.end());
  std::vector<std::discrete_distribution<std::size_t>> rows;
  for (std::uint32_t s = 0; s < dtmc.num_states(); ++s) {
    std::vector<double> w;
    for (const auto& t : dtmc.row(s)) w.push_back(t.prob.value);
    rows.emplace_back(w.begin(), w.end());
  }

  SampleResult res;
  res.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    std::uint32_t s = start(rng);
    StateSet r = automata::delta_word(nba, nba.initial(), std::vector<Symbol>{lmap[dtmc.label(s)]});
    for (std::size_t step = 0; step < horizon && r.any(); ++step) {
      s = dtmc.row(s)[rows[s](rng)].target;
      r = automata::delta_word(nba, r, std::vector<Symbol>{lmap[dtmc.label(s)]});
    }
    if (r.none()) ++res.blocked;
  }
  if (samples > 0) {
    res.estimate = 1.0 - static_cast<double>(res.blocked) / static_cast<double>(samples);
    res.std_error = std::sqrt(res.estimate * (1.0 - res.estimate) / static_cast<double>(samples));
  }
  return res;
}

}  // namespace ubacheck::engine
