#include <algorithm>
#include <deque>

#include "ubacheck/graph.hpp"
#include "ubacheck/parallel.hpp"
#include "ubacheck/scc.hpp"

namespace ubacheck::graph {

SccDag sccs(const ProductAutomaton& prod) {
  StateSet all(prod.num_nodes());
  all.set();
  return sccs(prod, all);
}

SccDag sccs(const ProductAutomaton& prod, const StateSet& live) {
  const std::size_t n = prod.num_nodes();
  auto decomposition = tarjan_scc(n, live, [&](std::uint32_t u, std::vector<std::uint32_t>& out) {
    for (const auto& e : prod.edges(u)) out.push_back(e.target);
  });

  SccDag dag;
  dag.live = live;
  dag.components = std::move(decomposition.components);
  dag.component_of = std::move(decomposition.component_of);
  dag.index_in_component.assign(n, kNone);
  const std::size_t m = dag.components.size();
  dag.succ.resize(m);
  dag.pred.resize(m);
  dag.info.resize(m);

  for (std::uint32_t c = 0; c < m; ++c) {
    const auto& comp = dag.components[c];
    auto& info = dag.info[c];
    info.trivial = comp.size() == 1;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      NodeId u = comp[i];
      dag.index_in_component[u] = static_cast<std::uint32_t>(i);
      info.has_final |= prod.is_final(u);
      for (const auto& e : prod.edges(u)) {
        if (!live.test(e.target)) continue;
        std::uint32_t d = dag.component_of[e.target];
        if (d == c) {
          info.trivial = false;
        } else {
          dag.succ[c].push_back(d);
        }
      }
    }
    auto& s = dag.succ[c];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (auto d : s) dag.pred[d].push_back(c);
    info.bottom = s.empty();
  }
  return dag;
}

SccDag prune_unreachable_and_dead(const ProductAutomaton& prod, const SccDag& dag) {
  const std::size_t n = prod.num_nodes();
  StateSet forward(n), backward(n);
  std::deque<NodeId> queue;
  for (NodeId u : prod.initial())
    if (dag.alive(u) && !forward.test(u)) {
      forward.set(u);
      queue.push_back(u);
    }
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (const auto& e : prod.edges(u))
      if (dag.alive(e.target) && !forward.test(e.target)) {
        forward.set(e.target);
        queue.push_back(e.target);
      }
  }

  std::vector<std::uint32_t> rev_offsets(n + 1, 0);
  for (NodeId u = 0; u < n; ++u)
    if (forward.test(u))
      for (const auto& e : prod.edges(u))
        if (forward.test(e.target)) ++rev_offsets[e.target + 1];
  for (std::size_t i = 0; i < n; ++i) rev_offsets[i + 1] += rev_offsets[i];
  std::vector<NodeId> rev(rev_offsets[n]);
  auto fill = rev_offsets;
  for (NodeId u = 0; u < n; ++u)
    if (forward.test(u))
      for (const auto& e : prod.edges(u))
        if (forward.test(e.target)) rev[fill[e.target]++] = u;

  for (NodeId u = 0; u < n; ++u)
    if (forward.test(u) && prod.is_final(u)) {
      backward.set(u);
      queue.push_back(u);
    }
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (auto i = rev_offsets[u]; i < rev_offsets[u + 1]; ++i)
      if (!backward.test(rev[i])) {
        backward.set(rev[i]);
        queue.push_back(rev[i]);
      }
  }
  return sccs(prod, forward & backward);
}

void preprocess_bsccs(const ProductAutomaton& /*prod*/, SccDag& dag, const PositivityFn& positive,
                      unsigned workers) {
  const std::size_t m = dag.components.size();
  std::vector<std::size_t> remaining(m, 0);
  std::vector<std::uint32_t> worklist;
  for (std::uint32_t c = 0; c < m; ++c) {
    if (dag.info[c].status == SccStatus::Removed) continue;
    for (auto d : dag.succ[c])
      if (dag.info[d].status != SccStatus::Removed) ++remaining[c];
    dag.info[c].bottom = remaining[c] == 0;
    if (dag.info[c].bottom && dag.info[c].status == SccStatus::Unmarked) worklist.push_back(c);
  }

  auto remove = [&](std::uint32_t c) {
    dag.info[c].status = SccStatus::Removed;
    for (NodeId u : dag.components[c]) dag.live.reset(u);
    for (auto p : dag.pred[c]) {
      if (dag.info[p].status == SccStatus::Removed) continue;
      if (--remaining[p] == 0) {
        dag.info[p].bottom = true;
        if (dag.info[p].status == SccStatus::Unmarked) worklist.push_back(p);
      }
    }
  };

  while (!worklist.empty()) {
    std::vector<std::uint32_t> batch;
    batch.swap(worklist);
    std::sort(batch.begin(), batch.end());
    std::vector<std::uint32_t> queries;
    for (auto c : batch) {
      const auto& info = dag.info[c];
      if (info.trivial || !info.has_final) {
        remove(c);
      } else {
        queries.push_back(c);
      }
    }
    std::vector<char> verdict(queries.size(), 0);
    parallel_for(queries.size(), workers, [&](std::size_t i) { verdict[i] = positive(queries[i]) ? 1 : 0; });
    for (std::size_t i = 0; i < queries.size(); ++i) {
      auto c = queries[i];
      dag.info[c].queried = true;
      if (verdict[i]) {
        dag.info[c].status = SccStatus::Positive;
      } else {
        remove(c);
      }
    }
  }
}

}  // namespace ubacheck::graph
