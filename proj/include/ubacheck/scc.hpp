#pragma once

#include <algorithm>
#include <vector>

#include "ubacheck/common.hpp"

namespace ubacheck {

struct SccDecomposition {
  // Components in order of completion: every edge between distinct
  // components points from a later component to an earlier one.
  std::vector<std::vector<std::uint32_t>> components;
  std::vector<std::uint32_t> component_of;  // kNone for nodes not in `active`
};

/// Iterative Tarjan over nodes 0..n-1 restricted to `active`.
/// `successors(u, out)` must append the successors of u to `out`;
/// successors outside `active` are ignored.
template <class SuccessorFn>
SccDecomposition tarjan_scc(std::size_t n, const StateSet& active, SuccessorFn&& successors) {
  SccDecomposition result;
  result.component_of.assign(n, kNone);

  std::vector<std::uint32_t> index(n, kNone), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  std::uint32_t counter = 0;

  struct Frame {
    std::uint32_t node;
    std::vector<std::uint32_t> succ;
    std::size_t pos = 0;
  };
  std::vector<Frame> frames;

  auto open = [&](std::uint32_t u) {
    index[u] = lowlink[u] = counter++;
    stack.push_back(u);
    on_stack[u] = true;
    Frame f{u, {}, 0};
    successors(u, f.succ);
    frames.push_back(std::move(f));
  };

  for (std::uint32_t root = 0; root < n; ++root) {
    if (!active.test(root) || index[root] != kNone) continue;
    open(root);
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.pos < f.succ.size()) {
        std::uint32_t v = f.succ[f.pos++];
        if (!active.test(v)) continue;
        if (index[v] == kNone) {
          open(v);
        } else if (on_stack[v]) {
          lowlink[f.node] = std::min(lowlink[f.node], index[v]);
        }
        continue;
      }
      std::uint32_t u = f.node;
      frames.pop_back();
      if (!frames.empty())
        lowlink[frames.back().node] = std::min(lowlink[frames.back().node], lowlink[u]);
      if (lowlink[u] == index[u]) {
        auto id = static_cast<std::uint32_t>(result.components.size());
        std::vector<std::uint32_t> comp;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          result.component_of[w] = id;
          comp.push_back(w);
        } while (w != u);
        std::sort(comp.begin(), comp.end());
        result.components.push_back(std::move(comp));
      }
    }
  }
  return result;
}

}  // namespace ubacheck
