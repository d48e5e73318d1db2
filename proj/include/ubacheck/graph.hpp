#pragma once

#include <functional>
#include <vector>

#include "ubacheck/product.hpp"

namespace ubacheck::graph {

using product::ProductAutomaton;

enum class SccStatus { Unmarked, Positive, Removed };

struct SccInfo {
  bool trivial = true;
  bool bottom = false;
  bool has_final = false;
  bool queried = false;  // positivity was evaluated
  SccStatus status = SccStatus::Unmarked;
};

/// Condensation of the live part of a product. Components are listed sinks
/// first: every DAG edge goes from a higher to a lower component id.
struct SccDag {
  std::vector<std::vector<NodeId>> components;
  std::vector<std::vector<std::uint32_t>> succ;
  std::vector<std::vector<std::uint32_t>> pred;
  std::vector<SccInfo> info;
  std::vector<std::uint32_t> component_of;       // kNone for dead nodes
  std::vector<std::uint32_t> index_in_component;  // position inside components[component_of[n]]
  StateSet live;

  bool alive(NodeId n) const { return live.test(n); }
};

SccDag sccs(const ProductAutomaton& prod);
SccDag sccs(const ProductAutomaton& prod, const StateSet& live);

/// Keeps nodes reachable from an initial node that can also reach a final node.
SccDag prune_unreachable_and_dead(const ProductAutomaton& prod, const SccDag& dag);

using PositivityFn = std::function<bool(std::uint32_t component)>;

/// Bottom-up BSCC loop. Trivial or final-free bottom components are removed;
/// the rest are queried and marked positive or removed, until every bottom
/// component is marked. Queries for components that are bottom at the same
/// time are run on up to `workers` threads.
void preprocess_bsccs(const ProductAutomaton& prod, SccDag& dag, const PositivityFn& positive,
                      unsigned workers = 1);

}  // namespace ubacheck::graph
